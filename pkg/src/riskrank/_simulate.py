"""First-generation transmission simulation from a single infectious source.

At every step ``t = 0, ..., isolation_step - 1`` the source meets the persons sharing a
location with it at dataset time ``t_min + (t mod T)``, where ``T`` is the length of the
dataset's time window. Of these close contacts, the ``k`` still susceptible ones are
each infected independently with probability ``p = min(1, beta / k)``, so that a step
produces ``beta`` infections in expectation. After ``isolation_step`` steps the source
is isolated and the replication ends. Infected persons do not transmit further.

Each replication draws from its own generator seeded by ``(seed, replication)``; within
a replication, one stream picks the source and another decides infections. Every
close contact receives one uniform draw per step, infected or not, so runs that differ
only in ``beta`` share their random numbers and the infected set grows monotonically
with ``beta``.

"""

from collections import Counter, defaultdict
from typing import TextIO
import csv
import logging
import multiprocessing

import numpy as np

from .exceptions import InvalidParameterError, SimulationError, UnknownNodeError
from .types import (
    FixedPerson,
    InfectionTally,
    MobilityDataset,
    NodeClass,
    NodeRef,
    RandomVisitorOf,
    ReplicationOutcome,
    SimConfig,
    SourceSpec,
)

logger = logging.getLogger(__name__)

# contact structure ====================================================================


class ContactIndex:
    """Who is where when: the visitors of every (location, time) slot.

    Built once per dataset and shared by all replications. Duplicate visits collapse.

    """

    def __init__(self, dataset: MobilityDataset):
        slots: defaultdict[tuple[str, int], set[str]] = defaultdict(set)
        whereabouts: defaultdict[str, defaultdict[int, set[str]]] = defaultdict(
            lambda: defaultdict(set)
        )
        visitors: defaultdict[str, set[str]] = defaultdict(set)

        for person, location, time in zip(
            dataset.person_ids.tolist(),
            dataset.location_ids.tolist(),
            dataset.times.tolist(),
        ):
            slots[location, time].add(person)
            whereabouts[person][time].add(location)
            visitors[location].add(person)

        self._slots = {key: tuple(sorted(value)) for key, value in slots.items()}
        self._whereabouts = {
            person: {time: tuple(sorted(locs)) for time, locs in by_time.items()}
            for person, by_time in whereabouts.items()
        }
        self._visitors = {loc: tuple(sorted(value)) for loc, value in visitors.items()}

        self.persons: tuple[str, ...] = tuple(sorted(self._whereabouts))
        window = dataset.time_window()
        self.t_min, self.t_max = window if window is not None else (0, 0)

    def __contains__(self, person_id: object) -> bool:
        return person_id in self._whereabouts

    @property
    def window_length(self) -> int:
        return self.t_max - self.t_min + 1

    def dataset_time(self, step: int) -> int:
        """The dataset time of simulated step ``step``, cycling the time window."""
        return self.t_min + step % self.window_length

    def visitors_of(self, location_id: str) -> tuple[str, ...]:
        """All persons who ever visited a location, sorted."""
        return self._visitors.get(location_id, ())

    def close_contacts(self, person_id: str, time: int) -> set[str]:
        """Other persons sharing at least one location with ``person_id`` at ``time``.

        Raises
        ------
        UnknownNodeError
            If the person never appears in the dataset.

        """
        try:
            locations = self._whereabouts[person_id].get(time, ())
        except KeyError:
            raise UnknownNodeError(NodeRef.person(person_id))

        contacts: set[str] = set()
        for location in locations:
            contacts.update(self._slots[location, time])
        contacts.discard(person_id)
        return contacts


def close_contacts(
    dataset: MobilityDataset | ContactIndex, person_id: str, time: int
) -> set[str]:
    """Other persons sharing at least one location with ``person_id`` at ``time``.

    Raises
    ------
    UnknownNodeError
        If the person never appears in the dataset.

    """
    index = dataset if isinstance(dataset, ContactIndex) else ContactIndex(dataset)
    return index.close_contacts(person_id, time)


def source_spec_for(node: NodeRef) -> SourceSpec:
    """A person source is fixed; a location source draws a random visitor."""
    if node.kind is NodeClass.PERSON:
        return FixedPerson(node.id)
    return RandomVisitorOf(node.id)


# replications =========================================================================


def replication_streams(
    seed: int, replication: int
) -> tuple[np.random.Generator, np.random.Generator]:
    """The (source, transmission) generators of one replication."""
    root = np.random.SeedSequence([seed, replication])
    source_seq, transmission_seq = root.spawn(2)
    return np.random.default_rng(source_seq), np.random.default_rng(transmission_seq)


def _resolve_source(
    index: ContactIndex, spec: SourceSpec, rng: np.random.Generator
) -> str:
    match spec:
        case FixedPerson(person_id):
            if person_id not in index:
                raise SimulationError(
                    f"Source person '{person_id}' is not in the dataset."
                )
            return person_id
        case RandomVisitorOf(location_id):
            visitors = index.visitors_of(location_id)
            if not visitors:
                raise SimulationError(
                    f"Source location '{location_id}' has no visitors."
                )
            return visitors[int(rng.integers(len(visitors)))]
    raise SimulationError(f"Unknown source specification: {spec!r}.")


def run_replication(
    index: ContactIndex,
    config: SimConfig,
    source_rng: np.random.Generator,
    transmission_rng: np.random.Generator | None = None,
) -> ReplicationOutcome:
    """Run one replication.

    Parameters
    ----------
    index
        The contact structure of the dataset.
    config
        Simulation parameters; ``replications``, ``seed`` and ``workers`` are ignored.
    source_rng
        Generator used to draw a random source. Also used for transmission when
        ``transmission_rng`` is not given.
    transmission_rng
        Generator used for the infection draws.

    Raises
    ------
    SimulationError
        If the source cannot be resolved.

    """
    transmission_rng = transmission_rng if transmission_rng is not None else source_rng
    source = _resolve_source(index, config.source, source_rng)

    infected: set[str] = set()
    for step in range(config.isolation_step):
        contacts = sorted(index.close_contacts(source, index.dataset_time(step)))
        draws = transmission_rng.random(len(contacts))

        susceptible = [c for c in contacts if c not in infected]
        if not susceptible:
            continue

        p = min(1.0, config.beta / len(susceptible))
        infected.update(
            c for c, u in zip(contacts, draws.tolist()) if u < p and c not in infected
        )

    return ReplicationOutcome(source, frozenset(infected), config.isolation_step)


def _run_chunk(
    args: tuple[ContactIndex, SimConfig, int, int],
) -> tuple[Counter[str], Counter[str]]:
    index, config, start, stop = args
    infections: Counter[str] = Counter()
    sources: Counter[str] = Counter()
    for replication in range(start, stop):
        outcome = run_replication(
            index, config, *replication_streams(config.seed, replication)
        )
        infections.update(outcome.infected)
        sources[outcome.source] += 1
        logger.debug(
            "Replication %d: source %s infected %d.",
            replication,
            outcome.source,
            len(outcome.infected),
        )
    return infections, sources


def run_simulation(
    dataset: MobilityDataset | ContactIndex, config: SimConfig
) -> InfectionTally:
    """Run ``config.replications`` independent replications and tally infections.

    With ``config.workers > 1`` the replications are split into contiguous chunks run
    by a process pool; the tally does not depend on the number of workers.

    Raises
    ------
    SimulationError
        If the source cannot be resolved.

    """
    index = dataset if isinstance(dataset, ContactIndex) else ContactIndex(dataset)

    # fail early, before spawning workers
    _resolve_source(index, config.source, np.random.default_rng(config.seed))

    bounds = np.linspace(0, config.replications, config.workers + 1).astype(int)
    chunks = [
        (index, config, int(start), int(stop))
        for start, stop in zip(bounds[:-1], bounds[1:])
        if stop > start
    ]

    if config.workers == 1:
        results = [_run_chunk(chunk) for chunk in chunks]
    else:
        with multiprocessing.Pool(processes=config.workers) as pool:
            results = pool.map(_run_chunk, chunks)

    infections: Counter[str] = Counter()
    sources: Counter[str] = Counter()
    for chunk_infections, chunk_sources in results:
        infections.update(chunk_infections)
        sources.update(chunk_sources)

    tally = InfectionTally(
        counts={person: infections[person] for person in index.persons},
        replications=config.replications,
        sources=dict(sorted(sources.items())),
    )
    logger.info(
        "Simulated %d replications: %.4f infections per replication.",
        tally.replications,
        tally.mean_infections,
    )
    return tally


def infected_set(tally: InfectionTally, threshold: int = 1) -> frozenset[str]:
    """Persons infected in at least ``threshold`` replications.

    Raises
    ------
    InvalidParameterError
        If ``threshold`` is outside of ``1..tally.replications``.

    """
    if not 1 <= threshold <= tally.replications:
        raise InvalidParameterError(
            f"must lie in 1..{tally.replications}, got {threshold}.", "threshold"
        )
    return frozenset(p for p, count in tally.counts.items() if count >= threshold)


def write_tally(tally: InfectionTally, stream: TextIO) -> None:
    """Write the tally as ``person,infections,replications`` CSV, sorted by person."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["person", "infections", "replications"])
    for person in sorted(tally.counts):
        writer.writerow([person, tally.counts[person], tally.replications])


def mean_infections_interval(
    k: int, beta: float, replications: int
) -> tuple[float, float]:
    """Binomial mean and standard error of infections per replication.

    For a single-step source with ``k`` contacts, infections per replication follow
    ``Binomial(k, min(1, beta / k))``.

    """
    if k < 1 or replications < 1:
        raise InvalidParameterError("k and replications must be positive.", "k")
    p = min(1.0, beta / k)
    return k * p, float(np.sqrt(k * p * (1 - p) / replications))
