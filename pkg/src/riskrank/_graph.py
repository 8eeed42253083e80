"""Construction of the people-location network and structural queries."""

from typing import TextIO
import csv
import logging

import numpy as np
import scipy.sparse

from .exceptions import GraphError, UnknownNodeError
from .types import (
    BipartiteGraph,
    GraphSummary,
    MobilityDataset,
    NodeClass,
    NodeRef,
    WeightingMode,
)

logger = logging.getLogger(__name__)


def build_graph(
    dataset: MobilityDataset, weighting_mode: WeightingMode = WeightingMode.BINARY
) -> BipartiteGraph:
    """Build the bipartite people-location network of a dataset.

    An edge joins a person and a location iff the person visited the location at least
    once. In ``BINARY`` mode every edge has weight 1; in ``VISIT_COUNT`` mode the weight
    is the number of such visits. Time is ignored. Persons and locations are indexed
    lexicographically by token.

    Raises
    ------
    GraphError
        If the dataset has no visits.

    """
    if len(dataset) == 0:
        raise GraphError("Cannot build a graph from an empty dataset.")

    persons, person_idx = np.unique(dataset.person_ids, return_inverse=True)
    locations, location_idx = np.unique(dataset.location_ids, return_inverse=True)
    n_persons, n_locations = len(persons), len(locations)

    # one code per (person, location) pair; repeated visits collapse into a count
    codes = person_idx.astype(np.int64) * n_locations + location_idx
    pairs, counts = np.unique(codes, return_counts=True)

    if weighting_mode is WeightingMode.BINARY:
        data = np.ones(len(pairs), dtype=np.int64)
    else:
        data = counts.astype(np.int64)

    weights = scipy.sparse.csr_array(
        (data, (pairs // n_locations, pairs % n_locations)),
        shape=(n_persons, n_locations),
    )

    graph = BipartiteGraph(
        persons.tolist(), locations.tolist(), weights, weighting_mode
    )
    logger.info("Built %r.", graph)
    return graph


def degree(graph: BipartiteGraph, node: NodeRef) -> int:
    """Number of edges incident to a node, ignoring weights.

    Raises
    ------
    UnknownNodeError
        If the node is not part of the graph.

    """
    index = graph.index_of(node)
    if node.kind is NodeClass.PERSON:
        return int(graph.person_degrees()[index])
    return int(graph.location_degrees()[index - graph.n_persons])


def neighbors(graph: BipartiteGraph, node: NodeRef) -> list[tuple[NodeRef, int]]:
    """The neighbors of a node with edge weights, ordered by token.

    Raises
    ------
    UnknownNodeError
        If the node is not part of the graph.

    """
    index = graph.index_of(node)
    adjacency = graph.adjacency
    start, stop = adjacency.indptr[index], adjacency.indptr[index + 1]
    columns = adjacency.indices[start:stop]
    weights = adjacency.data[start:stop]
    order = np.argsort(columns, kind="stable")
    return [
        (graph.node_at(int(c)), int(w))
        for c, w in zip(columns[order].tolist(), weights[order].tolist())
    ]


def node_index(graph: BipartiteGraph, node: NodeRef) -> int:
    """Dense index of a node: persons first, then locations, each lexicographic."""
    return graph.index_of(node)


def node_at(graph: BipartiteGraph, index: int) -> NodeRef:
    """Inverse of :func:`node_index`."""
    if not 0 <= index < graph.n_nodes:
        raise UnknownNodeError(index)
    return graph.node_at(index)


def graph_summary(graph: BipartiteGraph) -> GraphSummary:
    """Counts and average degrees per node class."""
    return GraphSummary(
        persons=graph.n_persons,
        locations=graph.n_locations,
        edges=graph.n_edges,
        total_weight=int(graph.weights.sum()),
        avg_person_degree=graph.n_edges / graph.n_persons if graph.n_persons else 0.0,
        avg_location_degree=(
            graph.n_edges / graph.n_locations if graph.n_locations else 0.0
        ),
    )


def write_edge_list(graph: BipartiteGraph, stream: TextIO) -> None:
    """Write the edges as ``class_u,u,class_v,v,weight`` CSV, ordered by person."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["class_u", "u", "class_v", "v", "weight"])
    for person, location, weight in graph.edges():
        writer.writerow(
            [NodeClass.PERSON.value, person, NodeClass.LOCATION.value, location, weight]
        )
