"""Tracing/testing priority orders for the five strategies and the all-knowing oracle.

Location-based and route-based strategies place a person at the locations they visited
and use the nearest one: a person's distance to an origin is the smallest Euclidean
distance from any location they visited to any origin location. A route is represented
by its member stations. All ties are broken by person token.

"""

from collections.abc import Iterable
from typing import TextIO
import csv
import dataclasses
import logging

import numpy as np
import scipy.spatial.distance

from ._rank import capacity_count, pagerank, personalized_pagerank
from .exceptions import InvalidParameterError, StrategyError
from .types import (
    ALL_KNOWING,
    BipartiteGraph,
    NodeClass,
    PriorityList,
    StrategyContext,
    StrategyKind,
)

logger = logging.getLogger(__name__)

# requirements =========================================================================


def _missing_coordinates(ctx: StrategyContext) -> list[str]:
    return [
        location
        for location in ctx.graph.locations
        if location not in ctx.meta or ctx.meta[location].coord is None
    ]


def _route_locations(ctx: StrategyContext) -> list[int]:
    assert ctx.route is not None
    return [
        j
        for j, location in enumerate(ctx.graph.locations)
        if location in ctx.meta and ctx.route in ctx.meta[location].route_ids
    ]


def check_requirements(kind: StrategyKind, ctx: StrategyContext) -> None:
    """Check that a context provides what a strategy needs, without computing anything.

    Raises
    ------
    StrategyError
        Naming the strategy and the missing input.

    """
    if kind in (StrategyKind.LOCATION_BASED, StrategyKind.PPR_BASED):
        sources = [ctx.source] if ctx.source is not None else []
        if kind is StrategyKind.PPR_BASED and ctx.rank_config.personalization():
            sources = list(ctx.rank_config.personalization())
        if not sources:
            raise StrategyError(kind, "a source node")

        for source in sources:
            if source not in ctx.graph:
                raise StrategyError(kind, f"a source node in the graph, not {source}")

    if kind is StrategyKind.ROUTE_BASED:
        if ctx.route is None:
            raise StrategyError(kind, "a route")
        if not _route_locations(ctx):
            raise StrategyError(
                kind, f"route membership for route '{ctx.route}' in location metadata"
            )

    if kind in (StrategyKind.LOCATION_BASED, StrategyKind.ROUTE_BASED):
        missing = _missing_coordinates(ctx)
        if missing:
            shown = ", ".join(missing[:5]) + (", ..." if len(missing) > 5 else "")
            raise StrategyError(
                kind, f"coordinates for every location (missing: {shown})"
            )


# distances ============================================================================


def _coordinates(ctx: StrategyContext) -> np.ndarray:
    return np.array([ctx.meta[loc].coord for loc in ctx.graph.locations], dtype=float)


def _origin_locations(kind: StrategyKind, ctx: StrategyContext) -> list[int]:
    graph = ctx.graph
    if kind is StrategyKind.ROUTE_BASED:
        return _route_locations(ctx)

    assert ctx.source is not None
    index = graph.index_of(ctx.source)
    if ctx.source.kind is NodeClass.LOCATION:
        return [index - graph.n_persons]

    # a person source: the locations that person visited
    start, stop = graph.weights.indptr[index], graph.weights.indptr[index + 1]
    return graph.weights.indices[start:stop].tolist()


def location_distances(kind: StrategyKind, ctx: StrategyContext) -> np.ndarray:
    """Distance of every location to the nearest origin location, in index order."""
    coords = _coordinates(ctx)
    origins = _origin_locations(kind, ctx)
    return scipy.spatial.distance.cdist(coords, coords[origins]).min(axis=1)


def person_distances(
    graph: BipartiteGraph, location_distance: np.ndarray
) -> np.ndarray:
    """Smallest distance over the locations each person visited."""
    weights = graph.weights
    degrees = np.diff(weights.indptr)
    result = np.full(graph.n_persons, np.inf)

    visited = degrees > 0
    if visited.any():
        minima = np.minimum.reduceat(
            location_distance[weights.indices], weights.indptr[:-1][visited]
        )
        result[visited] = minima
    return result


# prioritization =======================================================================


def _ascending(graph: BipartiteGraph, keys: np.ndarray) -> tuple[str, ...]:
    # persons are indexed lexicographically, so the index breaks ties by token
    order = np.lexsort((np.arange(graph.n_persons), keys))
    return tuple(graph.persons[i] for i in order.tolist())


def _base_rng(seed: int) -> np.random.Generator:
    if seed < 0:
        raise InvalidParameterError(f"must be >= 0, got {seed}.", "seed")
    return np.random.default_rng(seed)


def prioritize(kind: StrategyKind, ctx: StrategyContext) -> PriorityList:
    """Order all persons of the graph by the given strategy, highest priority first.

    - ``BASE``: a uniformly random permutation drawn from ``ctx.seed``.
    - ``LOCATION_BASED``: ascending distance to the source location, or to the
      locations the source person visited.
    - ``ROUTE_BASED``: ascending distance to the stations of ``ctx.route``.
    - ``PR_BASED``: descending PageRank score.
    - ``PPR_BASED``: descending Personalized PageRank score seeded at ``ctx.source``.

    Raises
    ------
    StrategyError
        If the context lacks an input the strategy requires.

    """
    check_requirements(kind, ctx)
    graph = ctx.graph

    match kind:
        case StrategyKind.BASE:
            order = _base_rng(ctx.seed).permutation(graph.n_persons)
            persons = tuple(graph.persons[i] for i in order.tolist())
        case StrategyKind.LOCATION_BASED | StrategyKind.ROUTE_BASED:
            distances = person_distances(graph, location_distances(kind, ctx))
            persons = _ascending(graph, distances)
        case StrategyKind.PR_BASED | StrategyKind.PPR_BASED:
            scores = _rank_scores(kind, ctx)
            persons = _ascending(graph, -scores.values[: graph.n_persons])

    logger.info("Prioritized %d persons with the %s strategy.", len(persons), kind)
    return PriorityList(persons, kind)


def _rank_scores(kind: StrategyKind, ctx: StrategyContext):
    if kind is StrategyKind.PR_BASED:
        config = dataclasses.replace(ctx.rank_config, source=None, seeds=())
        return pagerank(ctx.graph, config)

    config = ctx.rank_config
    if not config.personalization():
        config = dataclasses.replace(config, source=ctx.source)
    return personalized_pagerank(ctx.graph, config)


def location_scores(kind: StrategyKind, ctx: StrategyContext) -> dict[str, float]:
    """Risk score of every location under a strategy, for zone aggregation.

    PageRank-based strategies use their location scores. Location-based and route-based
    strategies score ``1 / (1 + distance)``. The base strategy draws uniform scores from
    ``ctx.seed``, carrying no information.

    Raises
    ------
    StrategyError
        If the context lacks an input the strategy requires.

    """
    check_requirements(kind, ctx)
    graph = ctx.graph

    match kind:
        case StrategyKind.BASE:
            # a stream distinct from the one behind the base permutation
            rng = np.random.default_rng(np.random.SeedSequence([ctx.seed, 1]))
            values = rng.random(graph.n_locations)
        case StrategyKind.LOCATION_BASED | StrategyKind.ROUTE_BASED:
            values = 1.0 / (1.0 + location_distances(kind, ctx))
        case StrategyKind.PR_BASED | StrategyKind.PPR_BASED:
            values = _rank_scores(kind, ctx).values[graph.n_persons :]

    return dict(zip(graph.locations, values.tolist()))


def all_knowing(infected: Iterable[str], population: Iterable[str]) -> PriorityList:
    """The oracle order: infected persons first, then everyone else, each sorted.

    Raises
    ------
    InvalidParameterError
        If an infected person is not part of the population.

    """
    infected = set(infected)
    population = set(population)

    outside = infected - population
    if outside:
        raise InvalidParameterError(
            f"infected persons outside of the population: {sorted(outside)[:5]}.",
            "infected",
        )

    return PriorityList(
        tuple(sorted(infected)) + tuple(sorted(population - infected)), ALL_KNOWING
    )


def select_tested(priority: PriorityList, capacity: float) -> set[str]:
    """The first ``ceil(capacity * N)`` persons of a priority list.

    Raises
    ------
    InvalidParameterError
        If ``capacity`` is outside of (0, 1].

    """
    return set(priority.persons[: capacity_count(capacity, len(priority))])


def write_priorities(priority: PriorityList, stream: TextIO) -> None:
    """Write a priority list as ``rank,person,strategy`` CSV."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["rank", "person", "strategy"])
    for rank, person in enumerate(priority.persons, start=1):
        writer.writerow([rank, person, str(priority.strategy)])
