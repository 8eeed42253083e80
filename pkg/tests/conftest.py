"""Shared fixtures: the travel-history table, the builtin synthetic network, and a
corpus of small random graphs."""

import io

import numpy as np
import pytest

from riskrank import build_graph, builtin_synthetic, parse_visits
from riskrank.types import BipartiteGraph, MobilityDataset

TRAVEL_HISTORY_CSV = """\
location,user,time
C,1,1
C,2,1
C,5,1
C,9,1
B,1,2
B,2,2
B,3,2
B,4,2
B,6,2
B,7,2
B,8,2
D,1,3
D,2,3
D,5,3
A,1,4
A,2,4
A,6,4
A,7,4
A,10,4
"""

META_CSV = """\
location,x,y,routes,zone
A,0,0,red,z1
B,1,0,red|blue,z1
C,5,5,blue,z2
D,9,9,,z3
"""


@pytest.fixture
def travel_history_csv() -> str:
    return TRAVEL_HISTORY_CSV


@pytest.fixture
def meta_csv() -> str:
    return META_CSV


@pytest.fixture
def travel_history() -> MobilityDataset:
    return parse_visits(io.StringIO(TRAVEL_HISTORY_CSV), "travel.csv")


@pytest.fixture
def synthetic() -> MobilityDataset:
    return builtin_synthetic()


@pytest.fixture
def synthetic_graph(synthetic) -> BipartiteGraph:
    return build_graph(synthetic)


def random_dataset(rng: np.random.Generator, max_nodes: int = 12) -> MobilityDataset:
    """A random visit log whose graph has at most ``max_nodes`` nodes."""
    n_persons = int(rng.integers(1, max_nodes - 1))
    n_locations = int(rng.integers(1, max_nodes - n_persons + 1))
    n_visits = int(rng.integers(1, 3 * (n_persons + n_locations)))
    persons = [f"p{i}" for i in rng.integers(n_persons, size=n_visits)]
    locations = [f"l{i}" for i in rng.integers(n_locations, size=n_visits)]
    return MobilityDataset(persons, locations, [0] * n_visits)


@pytest.fixture
def random_graphs() -> list[BipartiteGraph]:
    rng = np.random.default_rng(20240101)
    return [build_graph(random_dataset(rng)) for _ in range(60)]
