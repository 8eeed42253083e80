"""PageRank and source-seeded Personalized PageRank by power iteration.

Every undirected visit edge is traversed in both directions, so the out-degree of a node
is the sum of the weights of its edges. Both algorithms start from ``1 / N`` on every
node and iterate

    x_new = base + d * A @ (x / outdeg)

until the largest per-node change falls below ``tol``. They differ only in ``base``:
PageRank spreads ``(1 - d)`` uniformly as ``(1 - d) / N`` per node, whereas Personalized
PageRank injects the whole ``(1 - d)`` at the source (split uniformly when several
seeds are given). Personalized PageRank scores therefore do not sum to one unless
``normalize`` is set.

"""

from collections.abc import Iterable, Mapping, Sequence
from typing import TextIO
import csv
import logging
import math

import numpy as np

from .exceptions import GraphError, InvalidParameterError, MissingSourceError
from .types import BipartiteGraph, NodeClass, NodeRef, RankConfig, ScoreVector

logger = logging.getLogger(__name__)

# power iteration ======================================================================


def _power_iteration(
    graph: BipartiteGraph, config: RankConfig, base: np.ndarray, label: str
) -> ScoreVector:
    n = graph.n_nodes
    adjacency = graph.adjacency.astype(np.float64)

    out_degree = np.asarray(adjacency.sum(axis=1), dtype=np.float64).ravel()
    inverse_degree = np.zeros(n)
    np.divide(1.0, out_degree, out=inverse_degree, where=out_degree > 0)

    d = config.damping
    scores = np.full(n, 1.0 / n)
    converged = False
    iterations = 0

    for iterations in range(1, config.max_iter + 1):
        updated = base + d * (adjacency @ (scores * inverse_degree))
        change = float(np.max(np.abs(updated - scores)))
        scores = updated
        logger.debug("%s iteration %d: max change %.3e", label, iterations, change)
        if change < config.tol:
            converged = True
            break

    if converged:
        logger.info("%s converged after %d iterations.", label, iterations)
    else:
        logger.warning(
            "%s did not converge within %d iterations (tol=%g).",
            label,
            config.max_iter,
            config.tol,
        )

    result = ScoreVector(graph, scores, iterations, converged)
    return result.normalized() if config.normalize else result


def pagerank(graph: BipartiteGraph, config: RankConfig = RankConfig()) -> ScoreVector:
    """PageRank with uniform teleportation ``(1 - d) / N``.

    Non-convergence within ``config.max_iter`` is not an error: the result is returned
    with ``converged=False`` and a warning is logged.

    Raises
    ------
    GraphError
        If the graph has no nodes.
    InvalidParameterError
        If a source or seeds are configured; use :func:`personalized_pagerank`.

    """
    if graph.n_nodes == 0:
        raise GraphError("Cannot rank an empty graph.")
    if config.personalization():
        raise InvalidParameterError(
            "PageRank takes no source; use personalized_pagerank.", "source"
        )

    base = np.full(graph.n_nodes, (1.0 - config.damping) / graph.n_nodes)
    return _power_iteration(graph, config, base, "PageRank")


def personalized_pagerank(graph: BipartiteGraph, config: RankConfig) -> ScoreVector:
    """Personalized PageRank with the ``(1 - d)`` injection at the source.

    The source node receives ``(1 - d) + d * (inflow)`` and every other node only
    ``d * (inflow)``. With ``config.seeds`` the injection is split uniformly over the
    seeds. Persons and locations are both valid sources.

    Raises
    ------
    MissingSourceError
        If no source is configured or a source is not part of the graph.

    """
    seeds = list(dict.fromkeys(config.personalization()))
    if not seeds:
        raise MissingSourceError("Personalized PageRank requires a source node.")

    base = np.zeros(graph.n_nodes)
    for seed in seeds:
        if seed not in graph:
            raise MissingSourceError(f"Source node {seed} is not part of the graph.")
        base[graph.index_of(seed)] += (1.0 - config.damping) / len(seeds)

    label = f"Personalized PageRank from {', '.join(str(s) for s in seeds)}"
    return _power_iteration(graph, config, base, label)


# rankings =============================================================================


def rank_nodes(
    scores: ScoreVector | Mapping[NodeRef, float],
    class_filter: NodeClass | None = None,
) -> list[NodeRef]:
    """Nodes by descending score, ties broken by ascending (class, token).

    Parameters
    ----------
    scores
        A score vector or any mapping from nodes to scores.
    class_filter
        If given, only nodes of this class are returned.

    """
    items = scores.scores if isinstance(scores, ScoreVector) else scores
    ranked = sorted(items.items(), key=lambda item: (-item[1], item[0]))
    return [
        node for node, _ in ranked if class_filter is None or node.kind is class_filter
    ]


def capacity_count(fraction: float, n: int) -> int:
    """``ceil(fraction * n)``, immune to floating-point noise such as ``0.7 * 10``.

    Raises
    ------
    InvalidParameterError
        If ``fraction`` is outside of (0, 1].

    """
    if not 0 < fraction <= 1:
        raise InvalidParameterError(
            f"must lie in (0, 1], got {fraction}.", "capacity"
        )
    return min(n, math.ceil(round(fraction * n, 9)))


def top_fraction[T](ranking: Sequence[T], fraction: float) -> set[T]:
    """The first ``ceil(fraction * len(ranking))`` entries of a ranking, as a set."""
    return set(ranking[: capacity_count(fraction, len(ranking))])


def write_scores(
    scores: ScoreVector,
    stream: TextIO,
    class_filter: NodeClass | None = None,
) -> None:
    """Write scores as ``class,id,score,rank`` CSV, sorted by rank (1 is highest)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["class", "id", "score", "rank"])
    writer.writerows(_score_rows(scores, rank_nodes(scores, class_filter)))


def _score_rows(scores: ScoreVector, ranking: Iterable[NodeRef]):
    for rank, node in enumerate(ranking, start=1):
        yield node.kind.value, node.id, repr(scores[node]), rank
