"""Types and type aliases."""

from collections.abc import Iterator, Mapping, Sequence
from typing import Any, Final, Literal
import dataclasses
import enum
import functools
import math

import numpy as np
import numpy.typing as npt
import scipy.sparse

from .exceptions import InvalidParameterError, UnknownNodeError

# mobility data ========================================================================


@dataclasses.dataclass(frozen=True, slots=True)
class VisitRecord:
    """One observation of a person at a location during a discrete time step."""

    person_id: str
    location_id: str
    time: int

    def __post_init__(self) -> None:
        if not self.person_id:
            raise InvalidParameterError("must be non-empty.", "person_id")
        if not self.location_id:
            raise InvalidParameterError("must be non-empty.", "location_id")
        if self.time < 0:
            raise InvalidParameterError(f"must be >= 0, got {self.time}.", "time")


@dataclasses.dataclass(frozen=True)
class LocationMeta:
    """Optional geometry, route membership and zone of a location."""

    location_id: str
    coord: tuple[float, float] | None = None
    route_ids: frozenset[str] = frozenset()
    zone_id: str | None = None

    def __post_init__(self) -> None:
        if self.coord is not None and not all(math.isfinite(c) for c in self.coord):
            raise InvalidParameterError(
                f"coordinates must be finite, got {self.coord}.", "coord"
            )


# location metadata keyed by location id
type LocationTable = Mapping[str, LocationMeta]


class MobilityDataset:
    """An ordered collection of visits together with optional location metadata.

    Visits are stored column-wise in read-only numpy arrays so that datasets with
    millions of visits stay cheap to hold and to turn into a graph. Iterating over the
    dataset (or reading :attr:`visits`) yields :class:`VisitRecord` objects in the
    original order. Duplicate (person, location, time) triples are kept as-is.

    Parameters
    ----------
    person_ids, location_ids
        Sequences of non-empty string tokens, one per visit.
    times
        Non-negative integer time steps, one per visit.
    meta
        Location metadata, possibly empty.

    """

    def __init__(
        self,
        person_ids: Sequence[str] | npt.NDArray[np.str_],
        location_ids: Sequence[str] | npt.NDArray[np.str_],
        times: Sequence[int] | npt.NDArray[np.integer],
        meta: LocationTable | None = None,
    ):
        self.person_ids = _token_column(person_ids, "person_id")
        self.location_ids = _token_column(location_ids, "location_id")
        self.times = np.asarray(times, dtype=np.int64)
        self.meta: dict[str, LocationMeta] = dict(meta or {})

        if not (len(self.person_ids) == len(self.location_ids) == len(self.times)):
            raise InvalidParameterError(
                "person, location and time columns must have equal length.", "visits"
            )
        if len(self.times) and self.times.min() < 0:
            raise InvalidParameterError("time steps must be >= 0.", "time")

        self.times.setflags(write=False)

    @classmethod
    def from_records(
        cls, records: Sequence[VisitRecord], meta: LocationTable | None = None
    ) -> MobilityDataset:
        """Build a dataset from a sequence of :class:`VisitRecord`."""
        return cls(
            [r.person_id for r in records],
            [r.location_id for r in records],
            [r.time for r in records],
            meta,
        )

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[VisitRecord]:
        for person, location, time in zip(
            self.person_ids.tolist(), self.location_ids.tolist(), self.times.tolist()
        ):
            yield VisitRecord(person, location, time)

    @property
    def visits(self) -> list[VisitRecord]:
        """The visits, in their original order."""
        return list(self)

    def persons(self) -> list[str]:
        """Distinct person ids, sorted."""
        return np.unique(self.person_ids).tolist()

    def locations(self) -> list[str]:
        """Distinct location ids, sorted."""
        return np.unique(self.location_ids).tolist()

    def time_window(self) -> tuple[int, int] | None:
        """The first and last time step, or ``None`` for an empty dataset."""
        if not len(self):
            return None
        return int(self.times.min()), int(self.times.max())

    def with_meta(self, meta: LocationTable) -> MobilityDataset:
        """Return a copy of this dataset that carries the given metadata."""
        return MobilityDataset(self.person_ids, self.location_ids, self.times, meta)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, MobilityDataset):
            return False
        return (
            np.array_equal(self.person_ids, other.person_ids)
            and np.array_equal(self.location_ids, other.location_ids)
            and np.array_equal(self.times, other.times)
            and self.meta == other.meta
        )

    def __repr__(self) -> str:
        return (
            f"MobilityDataset(visits={len(self)}, persons={len(self.persons())}, "
            f"locations={len(self.locations())})"
        )


def _token_column(values: Sequence[str] | npt.NDArray[np.str_], name: str):
    column = np.asarray(values, dtype=np.str_)
    if column.ndim != 1:
        raise InvalidParameterError("must be one-dimensional.", name)
    if len(column) and (np.char.str_len(column) == 0).any():
        raise InvalidParameterError("tokens must be non-empty.", name)
    column.setflags(write=False)
    return column


# graph ================================================================================


class NodeClass(enum.StrEnum):
    """The two node classes of the people-location network."""

    PERSON = "person"
    LOCATION = "location"


@dataclasses.dataclass(frozen=True, order=True)
class NodeRef:
    """Identity of a node: its class and its token.

    A person and a location may share a token without colliding.

    """

    kind: NodeClass
    id: str

    @classmethod
    def person(cls, id: str) -> NodeRef:
        return cls(NodeClass.PERSON, id)

    @classmethod
    def location(cls, id: str) -> NodeRef:
        return cls(NodeClass.LOCATION, id)

    @classmethod
    def parse(cls, text: str) -> NodeRef:
        """Parse a ``class:id`` string such as ``person:18`` or ``location:C``."""
        kind, sep, id = text.partition(":")
        if not sep or not id:
            raise InvalidParameterError(
                f"expected 'person:<id>' or 'location:<id>', got '{text}'.", "node"
            )
        try:
            node_class = NodeClass(kind.strip().lower())
        except ValueError:
            raise InvalidParameterError(
                f"unknown node class '{kind}' in '{text}'.", "node"
            )
        return cls(node_class, id.strip())

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.id}"


class WeightingMode(enum.StrEnum):
    """How repeated visits of a person to a location weight their edge."""

    BINARY = "binary"
    VISIT_COUNT = "count"


class BipartiteGraph:
    """The people-location network.

    Persons and locations are indexed lexicographically by token. Edges are held as a
    sparse ``persons x locations`` matrix of positive weights. For algorithms that
    treat all nodes alike, nodes have a global index: persons first, then locations.

    Instances are immutable after construction; use :func:`riskrank.build_graph` to
    create one from a dataset.

    """

    def __init__(
        self,
        persons: Sequence[str],
        locations: Sequence[str],
        weights: scipy.sparse.csr_array,
        weighting_mode: WeightingMode = WeightingMode.BINARY,
    ):
        self.persons: tuple[str, ...] = tuple(persons)
        self.locations: tuple[str, ...] = tuple(locations)
        self.weights = weights
        self.weighting_mode = weighting_mode
        self._person_index = {p: i for i, p in enumerate(self.persons)}
        self._location_index = {loc: i for i, loc in enumerate(self.locations)}

    @property
    def n_persons(self) -> int:
        return len(self.persons)

    @property
    def n_locations(self) -> int:
        return len(self.locations)

    @property
    def n_nodes(self) -> int:
        return self.n_persons + self.n_locations

    @property
    def n_edges(self) -> int:
        return int(self.weights.nnz)

    def __contains__(self, node: object) -> bool:
        if not isinstance(node, NodeRef):
            return False
        if node.kind is NodeClass.PERSON:
            return node.id in self._person_index
        return node.id in self._location_index

    def index_of(self, node: NodeRef) -> int:
        """Global index of a node (persons first, then locations)."""
        if node.kind is NodeClass.PERSON and node.id in self._person_index:
            return self._person_index[node.id]
        if node.kind is NodeClass.LOCATION and node.id in self._location_index:
            return self.n_persons + self._location_index[node.id]
        raise UnknownNodeError(node)

    def node_at(self, index: int) -> NodeRef:
        """Inverse of :meth:`index_of`."""
        if index < self.n_persons:
            return NodeRef.person(self.persons[index])
        return NodeRef.location(self.locations[index - self.n_persons])

    def nodes(self) -> list[NodeRef]:
        """All nodes in global index order."""
        return [NodeRef.person(p) for p in self.persons] + [
            NodeRef.location(loc) for loc in self.locations
        ]

    def person_degrees(self) -> npt.NDArray[np.int64]:
        return np.diff(self.weights.indptr).astype(np.int64)

    def location_degrees(self) -> npt.NDArray[np.int64]:
        return np.bincount(self.weights.indices, minlength=self.n_locations).astype(
            np.int64
        )

    @functools.cached_property
    def adjacency(self) -> scipy.sparse.csr_array:
        """Symmetric ``n_nodes x n_nodes`` weighted adjacency in global index order."""
        return scipy.sparse.block_array(
            [[None, self.weights], [self.weights.T, None]], format="csr"
        )

    def edges(self) -> Iterator[tuple[str, str, int]]:
        """Yield ``(person, location, weight)`` ordered by person then location."""
        coo = self.weights.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for i, j, w in zip(
            coo.row[order].tolist(), coo.col[order].tolist(), coo.data[order].tolist()
        ):
            yield self.persons[i], self.locations[j], int(w)

    def __repr__(self) -> str:
        return (
            f"BipartiteGraph(persons={self.n_persons}, locations={self.n_locations}, "
            f"edges={self.n_edges}, weighting_mode={self.weighting_mode.value!r})"
        )


@dataclasses.dataclass(frozen=True)
class GraphSummary:
    """Node and edge counts with the average degree of each class."""

    persons: int
    locations: int
    edges: int
    total_weight: int
    avg_person_degree: float
    avg_location_degree: float

    def __str__(self) -> str:
        return (
            f"{self.persons} persons, {self.locations} locations, {self.edges} edges "
            f"(average degree: persons {self.avg_person_degree:.2f}, "
            f"locations {self.avg_location_degree:.2f})"
        )


# ranking ==============================================================================


@dataclasses.dataclass(frozen=True)
class RankConfig:
    """Parameters of PageRank and Personalized PageRank.

    Attributes
    ----------
    damping : float
        The damping factor ``d`` in [0, 1].
    tol : float
        Convergence threshold on the largest per-node change between iterations.
    max_iter : int
        Iteration cap; hitting it yields a result with ``converged=False``.
    source : NodeRef | None
        The personalization source ``s``. Required for Personalized PageRank.
    seeds : tuple[NodeRef, ...]
        Several sources sharing the ``1 - d`` injection uniformly. Takes precedence
        over ``source`` when non-empty.
    normalize : bool
        Divide Personalized PageRank scores by their sum for presentation.

    """

    damping: float = 0.85
    tol: float = 1e-10
    max_iter: int = 1000
    source: NodeRef | None = None
    seeds: tuple[NodeRef, ...] = ()
    normalize: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.damping <= 1:
            raise InvalidParameterError(
                f"must lie in [0, 1], got {self.damping}.", "damping"
            )
        if not self.tol > 0:
            raise InvalidParameterError(f"must be positive, got {self.tol}.", "tol")
        if self.max_iter < 1:
            raise InvalidParameterError(
                f"must be at least 1, got {self.max_iter}.", "max_iter"
            )

    def personalization(self) -> tuple[NodeRef, ...]:
        """The source nodes that receive the ``1 - d`` injection."""
        if self.seeds:
            return self.seeds
        if self.source is not None:
            return (self.source,)
        return ()


@dataclasses.dataclass(frozen=True, eq=False)
class ScoreVector:
    """Scores over the nodes of a graph, with convergence metadata.

    ``values[i]`` is the score of ``graph.node_at(i)``.

    """

    graph: BipartiteGraph
    values: npt.NDArray[np.float64]
    iterations: int
    converged: bool

    def __getitem__(self, node: NodeRef) -> float:
        return float(self.values[self.graph.index_of(node)])

    def __len__(self) -> int:
        return len(self.values)

    @property
    def scores(self) -> dict[NodeRef, float]:
        return dict(zip(self.graph.nodes(), self.values.tolist()))

    def by_person(self) -> dict[str, float]:
        values = self.values[: self.graph.n_persons]
        return dict(zip(self.graph.persons, values.tolist()))

    def by_location(self) -> dict[str, float]:
        return dict(
            zip(self.graph.locations, self.values[self.graph.n_persons :].tolist())
        )

    def normalized(self) -> ScoreVector:
        """Scores divided by their sum; rankings are unchanged."""
        total = self.values.sum()
        values = self.values / total if total > 0 else self.values.copy()
        return dataclasses.replace(self, values=values)


# simulation ===========================================================================


@dataclasses.dataclass(frozen=True)
class FixedPerson:
    """The same person is the source in every replication."""

    person_id: str


@dataclasses.dataclass(frozen=True)
class RandomVisitorOf:
    """Each replication draws its source uniformly from a location's visitors."""

    location_id: str


type SourceSpec = FixedPerson | RandomVisitorOf


@dataclasses.dataclass(frozen=True)
class SimConfig:
    """Parameters of the first-generation transmission simulation.

    Attributes
    ----------
    source : SourceSpec
        Who starts the outbreak.
    beta : float
        Expected infections per infectious step; the per-contact probability is
        ``min(1, beta / k)`` for ``k`` susceptible close contacts.
    isolation_step : int
        Number of steps the source stays in the mobility system.
    replications : int
        Number of independent replications.
    seed : int
        Master seed; replication ``r`` draws from a stream keyed by ``(seed, r)``.
    workers : int
        Worker processes for running replications; results do not depend on it.

    """

    source: SourceSpec
    beta: float = 0.4
    isolation_step: int = 1
    replications: int = 1000
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.beta >= 0:
            raise InvalidParameterError(f"must be >= 0, got {self.beta}.", "beta")
        if self.isolation_step < 1:
            raise InvalidParameterError(
                f"must be at least 1, got {self.isolation_step}.", "isolation_step"
            )
        if self.replications < 1:
            raise InvalidParameterError(
                f"must be at least 1, got {self.replications}.", "replications"
            )
        if self.workers < 1:
            raise InvalidParameterError(
                f"must be at least 1, got {self.workers}.", "workers"
            )
        if self.seed < 0:
            raise InvalidParameterError(f"must be >= 0, got {self.seed}.", "seed")


@dataclasses.dataclass(frozen=True)
class ReplicationOutcome:
    """The result of one replication."""

    source: str
    infected: frozenset[str]
    steps_run: int


@dataclasses.dataclass(frozen=True)
class InfectionTally:
    """How often each person was infected across replications.

    ``counts`` covers every person of the dataset, including those never infected.
    ``sources`` records how often each person served as the source.

    """

    counts: Mapping[str, int]
    replications: int
    sources: Mapping[str, int] = dataclasses.field(default_factory=dict)

    @property
    def total_infections(self) -> int:
        return sum(self.counts.values())

    @property
    def mean_infections(self) -> float:
        """Mean number of infections per replication."""
        return self.total_infections / self.replications


# strategies ===========================================================================


class StrategyKind(enum.StrEnum):
    """The mass tracing/testing strategies that are compared."""

    BASE = "base"
    LOCATION_BASED = "location"
    ROUTE_BASED = "route"
    PR_BASED = "pr"
    PPR_BASED = "ppr"


# label of the oracle ordering that knows who is infected
ALL_KNOWING: Final = "all-knowing"

type CurveLabel = StrategyKind | Literal["all-knowing"]


@dataclasses.dataclass(frozen=True)
class StrategyContext:
    """Everything a strategy may need; which fields are required depends on the kind."""

    graph: BipartiteGraph
    meta: LocationTable = dataclasses.field(default_factory=dict)
    source: NodeRef | None = None
    route: str | None = None
    rank_config: RankConfig = RankConfig()
    seed: int = 0


@dataclasses.dataclass(frozen=True)
class PriorityList:
    """Persons ordered from highest to lowest tracing/testing priority."""

    persons: tuple[str, ...]
    strategy: CurveLabel

    def __post_init__(self) -> None:
        if len(set(self.persons)) != len(self.persons):
            raise InvalidParameterError("persons must not repeat.", "persons")

    def __len__(self) -> int:
        return len(self.persons)

    def __iter__(self) -> Iterator[str]:
        return iter(self.persons)

    def excluding(self, persons: set[str] | frozenset[str]) -> PriorityList:
        """The same ordering without the given persons."""
        return PriorityList(
            tuple(p for p in self.persons if p not in persons), self.strategy
        )


# evaluation ===========================================================================

# 5%, 10%, ..., 100%
DEFAULT_CAPACITIES: Final[tuple[float, ...]] = tuple(
    round(0.05 * i, 2) for i in range(1, 21)
)


class ZoneScores(dict[str, float]):
    """Zone-level scores; ``skipped`` counts scored locations that had no zone."""

    def __init__(self, scores: Mapping[str, float] | None = None, skipped: int = 0):
        super().__init__(scores or {})
        self.skipped = skipped


@dataclasses.dataclass(frozen=True)
class RecallCurve:
    """Recall at increasing testing capacities."""

    strategy: CurveLabel
    points: tuple[tuple[float, float], ...]

    @property
    def capacities(self) -> list[float]:
        return [c for c, _ in self.points]

    @property
    def recalls(self) -> list[float]:
        return [r for _, r in self.points]


@dataclasses.dataclass(frozen=True)
class ZoneReport:
    """Zone-level scores, the zones classified as high risk, and observed cases."""

    zone_scores: Mapping[str, float]
    high_risk: frozenset[str]
    case_counts: Mapping[str, int]


@dataclasses.dataclass(frozen=True)
class EvalReport:
    """Recall curves plus zone accuracy and Spearman correlation per strategy."""

    curves: tuple[RecallCurve, ...]
    accuracy: Mapping[StrategyKind, float]
    spearman: Mapping[StrategyKind, float]
    zones: Mapping[StrategyKind, ZoneReport] = dataclasses.field(default_factory=dict)

    def curve(self, strategy: CurveLabel) -> RecallCurve:
        for curve in self.curves:
            if curve.strategy == strategy:
                return curve
        raise KeyError(strategy)

    def to_dict(self) -> dict[str, Any]:
        """A JSON-ready representation."""
        return {
            "curves": [
                {
                    "strategy": str(curve.strategy),
                    "points": [
                        {"capacity": c, "recall": r} for c, r in curve.points
                    ],
                }
                for curve in self.curves
            ],
            "accuracy": {str(k): v for k, v in self.accuracy.items()},
            "spearman": {str(k): v for k, v in self.spearman.items()},
            "zones": {
                str(k): {
                    "zone_scores": dict(sorted(z.zone_scores.items())),
                    "high_risk": sorted(z.high_risk),
                }
                for k, z in self.zones.items()
            },
        }


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """The ingredients :func:`riskrank.build_report` assembles into a report.

    Attributes
    ----------
    priorities : Mapping[StrategyKind, PriorityList]
        One priority list per requested strategy, over the traced population.
    infected : frozenset[str]
        The persons considered positive.
    capacities : tuple[float, ...]
        Sorted capacity grid in (0, 1].
    zone_scores : Mapping[StrategyKind, Mapping[str, float]] | None
        Zone-level risk per strategy; required for accuracy and Spearman.
    case_counts : Mapping[str, int] | None
        Observed cases per zone; when absent only recall curves are reported.

    """

    priorities: Mapping[StrategyKind, PriorityList]
    infected: frozenset[str]
    capacities: tuple[float, ...] = DEFAULT_CAPACITIES
    zone_scores: Mapping[StrategyKind, Mapping[str, float]] | None = None
    case_counts: Mapping[str, int] | None = None
