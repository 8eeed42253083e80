"""Recall curves, zone accuracy and Spearman correlation, assembled into reports."""

from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Literal
import csv
import json
import logging

import numpy as np
import scipy.stats

from ._strategy import all_knowing, select_tested
from .exceptions import (
    EmptyInfectedSetError,
    EvaluationError,
    InsufficientDataError,
    InvalidParameterError,
    NoCasesError,
    ZeroVarianceError,
)
from .types import (
    EvalReport,
    ExperimentSpec,
    LocationTable,
    PriorityList,
    RecallCurve,
    ScoreVector,
    StrategyKind,
    ZoneReport,
    ZoneScores,
)

logger = logging.getLogger(__name__)

# zones above this percentile of zone scores are high risk
HIGH_RISK_PERCENTILE = 80.0

# recall ===============================================================================


def recall(tested: Iterable[str], infected: Iterable[str]) -> float:
    """Fraction of the infected persons that were tested.

    Raises
    ------
    EmptyInfectedSetError
        If nobody is infected.

    """
    infected = set(infected)
    if not infected:
        raise EmptyInfectedSetError()
    return len(infected.intersection(tested)) / len(infected)


def _check_capacities(capacities: Sequence[float]) -> None:
    if not capacities:
        raise InvalidParameterError("must not be empty.", "capacities")
    for c in capacities:
        if not 0 < c <= 1:
            raise InvalidParameterError(f"must lie in (0, 1], got {c}.", "capacities")
    if any(b <= a for a, b in zip(capacities, capacities[1:])):
        raise InvalidParameterError("must be strictly increasing.", "capacities")


def recall_curve(
    priority: PriorityList, infected: Iterable[str], capacities: Sequence[float]
) -> RecallCurve:
    """Recall of a priority list at each capacity of a strictly increasing grid."""
    _check_capacities(capacities)
    infected = frozenset(infected)
    return RecallCurve(
        priority.strategy,
        tuple((c, recall(select_tested(priority, c), infected)) for c in capacities),
    )


def first_full_recall(curve: RecallCurve) -> float | None:
    """The smallest capacity at which a curve reaches recall 1, if any."""
    for capacity, value in curve.points:
        if value >= 1.0:
            return capacity
    return None


# zones ================================================================================


def aggregate_zone_scores(
    scores: ScoreVector | Mapping[str, float], meta: LocationTable
) -> ZoneScores:
    """Sum location scores per zone.

    Locations without a zone are skipped; their number is available as ``.skipped`` on
    the result and a warning is logged. Zones without scored locations are absent.

    """
    if isinstance(scores, ScoreVector):
        scores = scores.by_location()

    totals: dict[str, float] = {}
    skipped = 0
    for location in sorted(scores):
        entry = meta.get(location)
        if entry is None or entry.zone_id is None:
            skipped += 1
            continue
        totals[entry.zone_id] = totals.get(entry.zone_id, 0.0) + scores[location]

    if skipped:
        logger.warning("Skipped %d locations without a zone.", skipped)

    return ZoneScores(dict(sorted(totals.items())), skipped)


def classify_high_risk(zone_scores: Mapping[str, float]) -> frozenset[str]:
    """Zones scoring strictly above the 80th percentile of all zone scores.

    The percentile interpolates linearly between order statistics, so with equal
    scores no zone is high risk.

    Raises
    ------
    EvaluationError
        If there are no zones.

    """
    if not zone_scores:
        raise EvaluationError("Cannot classify an empty set of zones.")
    threshold = np.percentile(list(zone_scores.values()), HIGH_RISK_PERCENTILE)
    return frozenset(zone for zone, score in zone_scores.items() if score > threshold)


def accuracy(high_risk: Iterable[str], case_counts: Mapping[str, int]) -> float:
    """Share of all observed cases that fall in the high-risk zones.

    Raises
    ------
    NoCasesError
        If there are no cases at all.

    """
    total = sum(case_counts.values())
    if total <= 0:
        raise NoCasesError("Accuracy is undefined: there are no cases.")
    return sum(case_counts.get(zone, 0) for zone in set(high_risk)) / total


# rank correlation =====================================================================


def spearman(
    x: Sequence[float],
    y: Sequence[float],
    method: Literal["auto", "formula", "pearson"] = "auto",
) -> float:
    """Spearman's rank correlation coefficient.

    Without ties, this is ``1 - 6 * sum(d**2) / (n * (n**2 - 1))`` with ``d`` the rank
    differences. With ties, average ranks are assigned and the coefficient is the
    Pearson correlation of the rank vectors, which agrees with the formula on tie-free
    data.

    Parameters
    ----------
    x, y
        Paired observations.
    method
        ``"auto"`` uses the formula when there are no ties and the Pearson correlation
        of ranks otherwise. ``"formula"`` and ``"pearson"`` force one of them.

    Raises
    ------
    InvalidParameterError
        If the lengths differ, or ``method="formula"`` is used on tied data.
    InsufficientDataError
        If there are fewer than two observations.
    ZeroVarianceError
        If all ranks of ``x`` or of ``y`` are equal.

    """
    if len(x) != len(y):
        raise InvalidParameterError(
            f"x and y must have equal lengths, got {len(x)} and {len(y)}.", "y"
        )
    n = len(x)
    if n < 2:
        raise InsufficientDataError(
            f"Spearman correlation needs at least 2 observations, got {n}."
        )

    rank_x = scipy.stats.rankdata(x, method="average")
    rank_y = scipy.stats.rankdata(y, method="average")

    for name, ranks in (("x", rank_x), ("y", rank_y)):
        if np.ptp(ranks) == 0:
            raise ZeroVarianceError(
                f"Spearman correlation is undefined: all values of {name} are tied."
            )

    tie_free = len(np.unique(rank_x)) == n and len(np.unique(rank_y)) == n

    if method == "formula" or (method == "auto" and tie_free):
        if not tie_free:
            raise InvalidParameterError("the formula requires tie-free data.", "method")
        d_squared = float(np.sum((rank_x - rank_y) ** 2))
        denominator = n * (n * n - 1)
        result = (denominator - 6 * d_squared) / denominator
    else:
        result = float(np.corrcoef(rank_x, rank_y)[0, 1])

    return float(np.clip(result, -1.0, 1.0))


# reports ==============================================================================


def _zone_report(
    zone_scores: Mapping[str, float], case_counts: Mapping[str, int]
) -> ZoneReport:
    high_risk = classify_high_risk(zone_scores)
    return ZoneReport(dict(zone_scores), high_risk, dict(case_counts))


def build_report(spec: ExperimentSpec) -> EvalReport:
    """Assemble recall curves and, given zone scores and cases, accuracy and Spearman.

    The curves contain one entry per requested strategy followed by the all-knowing
    curve over the same population. Accuracy and Spearman are computed per strategy
    when ``spec.zone_scores`` and ``spec.case_counts`` are both given; Spearman pairs
    each scored zone with its case count (0 when absent).

    Raises
    ------
    EvaluationError
        If no strategies are given, or any metric is undefined for its inputs.

    """
    if not spec.priorities:
        raise EvaluationError("No strategies to evaluate.")

    curves = [
        recall_curve(priority, spec.infected, spec.capacities)
        for priority in spec.priorities.values()
    ]

    population = next(iter(spec.priorities.values())).persons
    curves.append(
        recall_curve(
            all_knowing(spec.infected, population), spec.infected, spec.capacities
        )
    )

    accuracies: dict[StrategyKind, float] = {}
    correlations: dict[StrategyKind, float] = {}
    zones: dict[StrategyKind, ZoneReport] = {}

    if spec.zone_scores is not None and spec.case_counts is not None:
        for kind in spec.priorities:
            zone_scores = spec.zone_scores[kind]
            report = _zone_report(zone_scores, spec.case_counts)
            zones[kind] = report
            accuracies[kind] = accuracy(report.high_risk, spec.case_counts)
            ordered = sorted(zone_scores)
            correlations[kind] = spearman(
                [zone_scores[z] for z in ordered],
                [spec.case_counts.get(z, 0) for z in ordered],
            )

    return EvalReport(tuple(curves), accuracies, correlations, zones)


def write_report(report: EvalReport, out_dir: str | Path) -> list[Path]:
    """Write ``report.json`` plus ``recall.csv``, ``accuracy.csv``, ``spearman.csv`` and
    ``zones.csv`` into a directory, creating it if needed.

    Returns
    -------
    list[Path]
        The files written.

    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / "report.json"
    path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    written.append(path)

    tables: dict[str, tuple[list[str], list[list[object]]]] = {
        "recall.csv": (
            ["strategy", "capacity", "recall"],
            [
                [str(curve.strategy), repr(c), repr(r)]
                for curve in report.curves
                for c, r in curve.points
            ],
        ),
        "accuracy.csv": (
            ["strategy", "accuracy"],
            [[str(k), repr(v)] for k, v in report.accuracy.items()],
        ),
        "spearman.csv": (
            ["strategy", "spearman"],
            [[str(k), repr(v)] for k, v in report.spearman.items()],
        ),
        "zones.csv": (
            ["strategy", "zone", "score", "high_risk", "cases"],
            [
                [
                    str(k),
                    zone,
                    repr(score),
                    int(zone in z.high_risk),
                    z.case_counts.get(zone, 0),
                ]
                for k, z in report.zones.items()
                for zone, score in sorted(z.zone_scores.items())
            ],
        ),
    }

    for filename, (header, rows) in tables.items():
        path = out_dir / filename
        with path.open("w", newline="", encoding="utf-8") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        written.append(path)

    logger.info("Wrote report to %s.", out_dir)
    return written
