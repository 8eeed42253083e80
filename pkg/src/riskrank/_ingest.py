"""Reading and writing mobility data, plus builtin and randomly generated datasets."""

from collections.abc import Callable, Iterable, Mapping, Sequence
from typing import TextIO
import csv
import datetime
import logging
import math

import numpy as np

from .exceptions import InvalidParameterError, ParseError
from .types import LocationMeta, LocationTable, MobilityDataset

logger = logging.getLogger(__name__)

VISITS_HEADER = ("location", "user", "time")
META_HEADER = ("location", "x", "y", "routes", "zone")
CASES_HEADER = ("zone", "cases")

# helpers ==============================================================================


def _source_name(source: TextIO | Iterable[str], name: str | None) -> str | None:
    if name is not None:
        return name
    return getattr(source, "name", None)


def _rows(source: TextIO | Iterable[str], header: Sequence[str], name: str | None):
    """Yield ``(line_number, fields)`` for each non-blank data row after the header.

    Raises
    ------
    ParseError
        If the header is missing or differs from the expected one, or the text cannot
        be decoded.

    """
    reader = csv.reader(source)
    expected = ",".join(header)

    try:
        first = next(reader)
    except StopIteration:
        raise ParseError(f"missing header '{expected}'.", 1, name)
    except csv.Error as exc:
        raise ParseError(str(exc), reader.line_num, name)
    except UnicodeDecodeError:
        raise ParseError("not valid UTF-8 text.", reader.line_num + 1, name)

    if [field.strip() for field in first] != list(header):
        raise ParseError(
            f"missing header '{expected}', got '{','.join(first)}'.",
            reader.line_num,
            name,
        )

    while True:
        try:
            fields = next(reader)
        except StopIteration:
            return
        except csv.Error as exc:
            raise ParseError(str(exc), reader.line_num, name)
        except UnicodeDecodeError:
            raise ParseError("not valid UTF-8 text.", reader.line_num + 1, name)

        if not fields or all(not f.strip() for f in fields):
            continue

        if len(fields) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(fields)}.",
                reader.line_num,
                name,
            )

        yield reader.line_num, [f.strip() for f in fields]


def _token(value: str, field: str, line: int, name: str | None) -> str:
    if not value:
        raise ParseError(f"empty {field}.", line, name)
    return value


def _nonnegative_int(value: str, field: str, line: int, name: str | None) -> int:
    try:
        result = int(value)
    except ValueError:
        raise ParseError(f"{field} must be an integer, got '{value}'.", line, name)
    if result < 0:
        raise ParseError(f"{field} must be >= 0, got {result}.", line, name)
    return result


# parsing ==============================================================================


def parse_visits(
    source: TextIO | Iterable[str], name: str | None = None
) -> MobilityDataset:
    """Parse a visit log with header ``location,user,time``.

    Records are returned in file order and are not deduplicated. LF and CRLF line
    endings are both accepted; blank lines are ignored.

    Parameters
    ----------
    source
        A character stream (or any iterable of lines).
    name
        The name used in error messages. Defaults to the stream's ``name``.

    Raises
    ------
    ParseError
        On a missing header, a wrong field count, an empty token or a time that is not
        a non-negative integer. The error names the offending line.

    """
    name = _source_name(source, name)

    persons: list[str] = []
    locations: list[str] = []
    times: list[int] = []

    for line, (location, person, time) in _rows(source, VISITS_HEADER, name):
        locations.append(_token(location, "location", line, name))
        persons.append(_token(person, "user", line, name))
        times.append(_nonnegative_int(time, "time", line, name))

    logger.info("Parsed %d visits from %s.", len(times), name or "<input>")
    return MobilityDataset(persons, locations, times)


def parse_location_meta(
    source: TextIO | Iterable[str], name: str | None = None
) -> dict[str, LocationMeta]:
    """Parse location metadata with header ``location,x,y,routes,zone``.

    ``routes`` is a ``|``-separated list of route tokens. Coordinates and zone may be
    blank; blank coordinates must be blank together.

    Raises
    ------
    ParseError
        On a duplicate location id, a non-numeric or non-finite coordinate, or a
        coordinate pair with only one component.

    """
    name = _source_name(source, name)
    meta: dict[str, LocationMeta] = {}

    for line, (location, x, y, routes, zone) in _rows(source, META_HEADER, name):
        _token(location, "location", line, name)

        if location in meta:
            raise ParseError(f"duplicate location '{location}'.", line, name)

        if bool(x) != bool(y):
            raise ParseError("x and y must both be given or both be blank.", line, name)

        coord = None
        if x:
            try:
                coord = (float(x), float(y))
            except ValueError:
                raise ParseError(
                    f"non-numeric coordinate '{x},{y}'.", line, name
                )
            if not all(math.isfinite(c) for c in coord):
                raise ParseError(f"non-finite coordinate '{x},{y}'.", line, name)

        route_ids = frozenset(r.strip() for r in routes.split("|") if r.strip())

        meta[location] = LocationMeta(location, coord, route_ids, zone or None)

    logger.info(
        "Parsed metadata for %d locations from %s.", len(meta), name or "<input>"
    )
    return meta


def parse_case_counts(
    source: TextIO | Iterable[str], name: str | None = None
) -> dict[str, int]:
    """Parse observed case counts per zone, with header ``zone,cases``.

    Raises
    ------
    ParseError
        On a duplicate zone or a count that is not a non-negative integer.

    """
    name = _source_name(source, name)
    counts: dict[str, int] = {}

    for line, (zone, cases) in _rows(source, CASES_HEADER, name):
        _token(zone, "zone", line, name)
        if zone in counts:
            raise ParseError(f"duplicate zone '{zone}'.", line, name)
        counts[zone] = _nonnegative_int(cases, "cases", line, name)

    return counts


# writing ==============================================================================


def write_visits(dataset: MobilityDataset, stream: TextIO) -> None:
    """Write the visits of a dataset as ``location,user,time`` CSV, in order."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(VISITS_HEADER)
    writer.writerows(
        zip(
            dataset.location_ids.tolist(),
            dataset.person_ids.tolist(),
            dataset.times.tolist(),
        )
    )


def write_location_meta(meta: LocationTable, stream: TextIO) -> None:
    """Write location metadata as ``location,x,y,routes,zone`` CSV, sorted by id."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(META_HEADER)
    for location_id in sorted(meta):
        entry = meta[location_id]
        x, y = (repr(c) for c in entry.coord) if entry.coord else ("", "")
        writer.writerow(
            [location_id, x, y, "|".join(sorted(entry.route_ids)), entry.zone_id or ""]
        )


# builtin datasets =====================================================================

# visitors of each location in the 20-person synthetic network
_SYNTHETIC_VISITORS: dict[str, tuple[int, ...]] = {
    "A": (1, 2, 3, 4, 5, 6, 7, 10, 11, 12, 14, 15, 16, 17, 20),
    "B": (1, 2, 3, 4, 6, 7, 8, 11, 13, 15, 19),
    "C": (1, 2, 5, 9, 11, 12, 13, 14, 16, 17, 18, 19, 20),
}

# (location, person, time) rows of the 10-person travel history
_TRAVEL_HISTORY: tuple[tuple[str, str, int], ...] = (
    ("C", "1", 1), ("C", "2", 1), ("C", "5", 1), ("C", "9", 1),
    ("B", "1", 2), ("B", "2", 2), ("B", "3", 2), ("B", "4", 2),
    ("B", "6", 2), ("B", "7", 2), ("B", "8", 2),
    ("D", "1", 3), ("D", "2", 3), ("D", "5", 3),
    ("A", "1", 4), ("A", "2", 4), ("A", "6", 4), ("A", "7", 4), ("A", "10", 4),
)  # fmt: skip


def builtin_synthetic() -> MobilityDataset:
    """The 20-person, 3-location synthetic network with every visit at step 0.

    Location A has 15 visitors, B has 11 and C has 13, for 39 visits in total. Person
    18 visits only C.

    """
    rows = [
        (str(person), location, 0)
        for location, visitors in _SYNTHETIC_VISITORS.items()
        for person in visitors
    ]
    persons, locations, times = zip(*rows)
    return MobilityDataset(persons, locations, times)


def builtin_travel_history() -> MobilityDataset:
    """The travel history of 10 people among 4 locations, at steps 1 to 4."""
    locations, persons, times = zip(*_TRAVEL_HISTORY)
    return MobilityDataset(persons, locations, times)


BUILTIN_DATASETS: Mapping[str, Callable[[], MobilityDataset]] = {
    "paper-synthetic": builtin_synthetic,
    "travel-history": builtin_travel_history,
}


def builtin(name: str) -> MobilityDataset:
    """Look up a builtin dataset by name.

    Raises
    ------
    InvalidParameterError
        If there is no builtin dataset with that name.

    """
    try:
        factory = BUILTIN_DATASETS[name]
    except KeyError:
        choices = ", ".join(BUILTIN_DATASETS)
        raise InvalidParameterError(
            f"unknown builtin dataset '{name}'; expected one of: {choices}.",
            "builtin",
        )
    return factory()


# random datasets ======================================================================


def generate_random(
    n_people: int,
    n_locations: int,
    n_visits: int,
    n_timesteps: int,
    seed: int,
) -> MobilityDataset:
    """Draw ``n_visits`` visits uniformly over (person, location, time).

    Persons are named ``p0, p1, ...`` and locations ``l0, l1, ...``. The result is a
    pure function of the arguments.

    Raises
    ------
    InvalidParameterError
        If any count is not positive.

    """
    for parameter, value in (
        ("n_people", n_people),
        ("n_locations", n_locations),
        ("n_visits", n_visits),
        ("n_timesteps", n_timesteps),
    ):
        if value < 1:
            raise InvalidParameterError(f"must be positive, got {value}.", parameter)

    rng = np.random.default_rng(seed)
    persons = rng.integers(0, n_people, size=n_visits)
    locations = rng.integers(0, n_locations, size=n_visits)
    times = rng.integers(0, n_timesteps, size=n_visits)

    return MobilityDataset(
        np.char.add("p", persons.astype(np.str_)),
        np.char.add("l", locations.astype(np.str_)),
        times,
    )


# time steps ===========================================================================


def timestamps_to_steps(
    timestamps: Iterable[str | datetime.datetime],
    origin: str | datetime.datetime,
    step: datetime.timedelta,
) -> list[int]:
    """Convert timestamps to step indices ``floor((timestamp - origin) / step)``.

    Strings are parsed with :meth:`datetime.datetime.fromisoformat`.

    Raises
    ------
    InvalidParameterError
        If ``step`` is not positive or a timestamp precedes ``origin``.

    """
    if step <= datetime.timedelta(0):
        raise InvalidParameterError(f"must be positive, got {step}.", "step")

    def _parse(value: str | datetime.datetime) -> datetime.datetime:
        if isinstance(value, datetime.datetime):
            return value
        try:
            return datetime.datetime.fromisoformat(value)
        except ValueError:
            raise InvalidParameterError(
                f"not an ISO timestamp: '{value}'.", "timestamps"
            )

    start = _parse(origin)
    steps = []
    for timestamp in timestamps:
        offset = _parse(timestamp) - start
        if offset < datetime.timedelta(0):
            raise InvalidParameterError(
                f"{timestamp} precedes the origin {start}.", "timestamps"
            )
        steps.append(offset // step)
    return steps
