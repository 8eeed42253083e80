"""Experiment configuration and the pipeline from mobility records to reports.

An experiment is described by an :class:`ExperimentConfig`, resolved from a JSON or
TOML file merged with command-line overrides. The pipeline functions below load the
inputs it names, build the people-location network, rank, simulate, prioritize and
evaluate.

"""

from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, TextIO
import csv
import dataclasses
import logging

from ._evaluate import aggregate_zone_scores, build_report, first_full_recall
from ._graph import build_graph
from ._ingest import builtin, parse_case_counts, parse_location_meta, parse_visits
from ._rank import pagerank, personalized_pagerank
from ._simulate import ContactIndex, infected_set, run_simulation, source_spec_for
from ._strategy import check_requirements, location_scores, prioritize
from .config import Capacity, Prototype
from .exceptions import (
    ConfigurationError,
    EvaluationError,
    InvalidParameterError,
)
from .types import (
    ALL_KNOWING,
    DEFAULT_CAPACITIES,
    BipartiteGraph,
    EvalReport,
    ExperimentSpec,
    InfectionTally,
    LocationTable,
    MobilityDataset,
    NodeClass,
    NodeRef,
    PriorityList,
    RankConfig,
    ScoreVector,
    SimConfig,
    StrategyContext,
    StrategyKind,
    WeightingMode,
)

logger = logging.getLogger(__name__)

# the all-knowing capacity reported for the builtin synthetic experiment
EXPECTED_ALL_KNOWING_CAPACITY = 0.33
ALL_KNOWING_TOLERANCE = 0.15

# configuration ========================================================================


class Inputs(Prototype):
    """Where the data comes from: files, or a builtin dataset."""

    visits: str | None = None
    meta: str | None = None
    cases: str | None = None
    builtin: str | None = None


class GraphSettings(Prototype):
    weighting: WeightingMode = WeightingMode.BINARY


class RankSettings(Prototype):
    algorithm: str = "ppr"
    damping: float = 0.85
    tol: float = 1e-10
    max_iter: int = 1000
    normalize: bool = False


class SimulationSettings(Prototype):
    beta: float = 0.4
    isolation_step: int = 1
    replications: int = 1000
    seed: int = 0
    threshold: int = 1
    workers: int = 1


class ExperimentConfig(Prototype):
    """A complete experiment.

    ``vars`` holds free-form values that other entries may refer to, as in
    ``${vars.study}``; they are not used by the pipeline itself.

    Example (TOML)::

        source = "person:18"
        strategies = ["base", "pr", "ppr"]
        out = "results/${vars.study}/beta-${simulation.beta}"

        [vars]
        study = "pilot"

        [inputs]
        builtin = "paper-synthetic"

        [simulation]
        beta = 0.4
        replications = 1000

    """

    inputs: Inputs = Inputs()
    graph: GraphSettings = GraphSettings()
    rank: RankSettings = RankSettings()
    simulation: SimulationSettings = SimulationSettings()
    source: NodeRef | None = None
    strategies: list[StrategyKind] = [
        StrategyKind.BASE,
        StrategyKind.PR_BASED,
        StrategyKind.PPR_BASED,
    ]
    route: str | None = None
    capacities: list[Capacity] = [Capacity(c) for c in DEFAULT_CAPACITIES]
    exclude_source: bool = True
    out: str = "results"
    vars: dict[str, Any] = {}


def rank_config(config: ExperimentConfig) -> RankConfig:
    """The ranking parameters of an experiment, seeded at its source."""
    return RankConfig(
        damping=config.rank.damping,
        tol=config.rank.tol,
        max_iter=config.rank.max_iter,
        source=config.source,
        normalize=config.rank.normalize,
    )


def sim_config(config: ExperimentConfig, beta: float | None = None) -> SimConfig:
    """The simulation parameters of an experiment.

    Raises
    ------
    ConfigurationError
        If the experiment has no source.

    """
    if config.source is None:
        raise ConfigurationError("The simulation requires a source node.")
    settings = config.simulation
    return SimConfig(
        source=source_spec_for(config.source),
        beta=settings.beta if beta is None else beta,
        isolation_step=settings.isolation_step,
        replications=settings.replications,
        seed=settings.seed,
        workers=settings.workers,
    )


# inputs ===============================================================================


@dataclasses.dataclass(frozen=True)
class ExperimentInputs:
    """The loaded data of an experiment."""

    dataset: MobilityDataset
    meta: LocationTable
    case_counts: Mapping[str, int] | None


def _read(path: str, parser):
    with Path(path).open(newline="", encoding="utf-8") as stream:
        return parser(stream, path)


def load_inputs(inputs: Inputs) -> ExperimentInputs:
    """Read the visit log (or builtin dataset), location metadata and case counts.

    Raises
    ------
    ConfigurationError
        If neither or both of ``visits`` and ``builtin`` are given.
    ParseError
        If a file is malformed.
    OSError
        If a file cannot be read.

    """
    if (inputs.visits is None) == (inputs.builtin is None):
        raise ConfigurationError("Exactly one of visits and builtin must be given.")

    if inputs.builtin is not None:
        dataset = builtin(inputs.builtin)
    else:
        dataset = _read(inputs.visits, parse_visits)

    meta = _read(inputs.meta, parse_location_meta) if inputs.meta is not None else {}
    cases = _read(inputs.cases, parse_case_counts) if inputs.cases is not None else None

    logger.info("Loaded %r with metadata for %d locations.", dataset, len(meta))
    return ExperimentInputs(dataset.with_meta(meta), meta, cases)


# pipeline =============================================================================


def run_rank(config: ExperimentConfig, graph: BipartiteGraph) -> ScoreVector:
    """PageRank or Personalized PageRank, as selected by ``config.rank.algorithm``.

    Raises
    ------
    ConfigurationError
        If the algorithm is neither ``pr`` nor ``ppr``.
    MissingSourceError
        If Personalized PageRank is requested without a usable source.

    """
    match config.rank.algorithm:
        case "pr":
            without_source = dataclasses.replace(rank_config(config), source=None)
            return pagerank(graph, without_source)
        case "ppr":
            return personalized_pagerank(graph, rank_config(config))
    raise ConfigurationError(
        f"Unknown ranking algorithm: '{config.rank.algorithm}'. Expected pr or ppr."
    )


def excluded_persons(config: ExperimentConfig, tally: InfectionTally) -> frozenset[str]:
    """The known source persons to drop from the traced population.

    Only a person source is known in advance. A location source draws a new visitor as
    source in every replication, so every visitor stays traceable; the tally never
    counts a replication's source among its infections.

    """
    if not config.exclude_source or config.source is None:
        return frozenset()
    if config.source.kind is not NodeClass.PERSON:
        return frozenset()
    return frozenset(person for person, count in tally.sources.items() if count > 0)



def _strategy_context(
    config: ExperimentConfig, graph: BipartiteGraph, meta: LocationTable
) -> StrategyContext:
    return StrategyContext(
        graph=graph,
        meta=meta,
        source=config.source,
        route=config.route,
        rank_config=rank_config(config),
        seed=config.simulation.seed,
    )


def check_strategies(
    config: ExperimentConfig, graph: BipartiteGraph, meta: LocationTable
) -> list[StrategyKind]:
    """The distinct requested strategies, after checking their prerequisites.

    Raises
    ------
    ConfigurationError
        If no strategy is requested.
    StrategyError
        If a strategy lacks an input it requires.

    """
    kinds = list(dict.fromkeys(config.strategies))
    if not kinds:
        raise ConfigurationError("At least one strategy is required.")
    ctx = _strategy_context(config, graph, meta)
    for kind in kinds:
        check_requirements(kind, ctx)
    return kinds


def prioritize_all(
    config: ExperimentConfig,
    graph: BipartiteGraph,
    meta: LocationTable,
    exclude: frozenset[str] = frozenset(),
) -> dict[StrategyKind, PriorityList]:
    """One priority list per requested strategy, without the excluded persons.

    Raises
    ------
    StrategyError
        If a strategy lacks an input it requires.

    """
    kinds = check_strategies(config, graph, meta)
    ctx = _strategy_context(config, graph, meta)
    return {kind: prioritize(kind, ctx).excluding(set(exclude)) for kind in kinds}


def zone_scores_all(
    config: ExperimentConfig, graph: BipartiteGraph, meta: LocationTable
) -> dict[StrategyKind, Mapping[str, float]]:
    """Zone-level risk per requested strategy.

    Raises
    ------
    EvaluationError
        If no location carries a zone.

    """
    if not any(entry.zone_id is not None for entry in meta.values()):
        raise EvaluationError(
            "Case counts were given, but no location in the metadata has a zone."
        )
    ctx = _strategy_context(config, graph, meta)
    return {
        kind: aggregate_zone_scores(location_scores(kind, ctx), meta)
        for kind in dict.fromkeys(config.strategies)
    }


def _check_all_knowing_capacity(report: EvalReport) -> None:
    capacity = first_full_recall(report.curve(ALL_KNOWING))
    logger.info("All-knowing strategy reaches full recall at capacity %s.", capacity)
    if (
        capacity is None
        or abs(capacity - EXPECTED_ALL_KNOWING_CAPACITY) > ALL_KNOWING_TOLERANCE
    ):
        logger.warning(
            "All-knowing capacity %s deviates from %.2f by more than %.2f.",
            capacity,
            EXPECTED_ALL_KNOWING_CAPACITY,
            ALL_KNOWING_TOLERANCE,
        )


def evaluate(
    config: ExperimentConfig,
    graph: BipartiteGraph,
    meta: LocationTable,
    case_counts: Mapping[str, int] | None,
    tally: InfectionTally,
    priorities: Mapping[StrategyKind, PriorityList] | None = None,
) -> EvalReport:
    """Evaluate the requested strategies against the persons infected in ``tally``."""
    exclude = excluded_persons(config, tally)
    if priorities is None:
        priorities = prioritize_all(config, graph, meta, exclude)

    infected = infected_set(tally, config.simulation.threshold) - exclude
    population = set(next(iter(priorities.values())).persons)

    spec = ExperimentSpec(
        priorities=priorities,
        infected=frozenset(infected & population),
        capacities=tuple(config.capacities),
        zone_scores=(
            zone_scores_all(config, graph, meta) if case_counts is not None else None
        ),
        case_counts=case_counts,
    )
    return build_report(spec)


def run_experiment(config: ExperimentConfig) -> EvalReport:
    """Run the full pipeline: load, build, simulate, prioritize and evaluate.

    Raises
    ------
    Error
        Any error of the stages, unchanged.

    """
    inputs = load_inputs(config.inputs)
    graph = build_graph(inputs.dataset, config.graph.weighting)
    check_strategies(config, graph, inputs.meta)
    tally = run_simulation(ContactIndex(inputs.dataset), sim_config(config))
    report = evaluate(config, graph, inputs.meta, inputs.case_counts, tally)

    if config.inputs.builtin == "paper-synthetic":
        _check_all_knowing_capacity(report)

    return report


def run_sweep(
    config: ExperimentConfig, betas: Sequence[float]
) -> dict[float, EvalReport]:
    """Evaluate the strategies once per rate of infection.

    The priority lists do not depend on ``beta`` and are computed once. Replications
    share their random numbers across rates, so infected sets grow with ``beta``.

    Raises
    ------
    InvalidParameterError
        If no rates are given.

    """
    if not betas:
        raise InvalidParameterError("must not be empty.", "betas")

    inputs = load_inputs(config.inputs)
    graph = build_graph(inputs.dataset, config.graph.weighting)
    check_strategies(config, graph, inputs.meta)
    index = ContactIndex(inputs.dataset)

    reports: dict[float, EvalReport] = {}
    priorities = None
    for beta in betas:
        tally = run_simulation(index, sim_config(config, beta))
        if priorities is None:
            exclude = excluded_persons(config, tally)
            priorities = prioritize_all(config, graph, inputs.meta, exclude)
        reports[beta] = evaluate(
            config, graph, inputs.meta, inputs.case_counts, tally, priorities
        )
        logger.info("Evaluated beta=%g.", beta)
    return reports


def write_sweep(reports: Mapping[float, EvalReport], stream: TextIO) -> None:
    """Write sweep results in long format, ``beta,strategy,capacity,recall``."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["beta", "strategy", "capacity", "recall"])
    for beta, report in reports.items():
        for curve in report.curves:
            for capacity, value in curve.points:
                writer.writerow(
                    [repr(beta), str(curve.strategy), repr(capacity), repr(value)]
                )
