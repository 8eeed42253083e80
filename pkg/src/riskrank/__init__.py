from . import config
from . import exceptions
from . import types
from ._ingest import (
    parse_visits,
    parse_location_meta,
    parse_case_counts,
    write_visits,
    write_location_meta,
    builtin,
    builtin_synthetic,
    builtin_travel_history,
    generate_random,
    timestamps_to_steps,
    BUILTIN_DATASETS,
)
from ._graph import (
    build_graph,
    degree,
    neighbors,
    node_index,
    node_at,
    graph_summary,
    write_edge_list,
)
from ._rank import (
    pagerank,
    personalized_pagerank,
    rank_nodes,
    capacity_count,
    top_fraction,
    write_scores,
)
from ._simulate import (
    ContactIndex,
    close_contacts,
    source_spec_for,
    replication_streams,
    run_replication,
    run_simulation,
    infected_set,
    write_tally,
    mean_infections_interval,
)
from ._strategy import (
    check_requirements,
    prioritize,
    location_scores,
    all_knowing,
    select_tested,
    write_priorities,
)
from ._evaluate import (
    recall,
    recall_curve,
    first_full_recall,
    aggregate_zone_scores,
    classify_high_risk,
    accuracy,
    spearman,
    build_report,
    write_report,
)
from ._experiment import ExperimentConfig, run_experiment, run_sweep

__all__ = [
    "config",
    "exceptions",
    "types",
    "parse_visits",
    "parse_location_meta",
    "parse_case_counts",
    "write_visits",
    "write_location_meta",
    "builtin",
    "builtin_synthetic",
    "builtin_travel_history",
    "generate_random",
    "timestamps_to_steps",
    "BUILTIN_DATASETS",
    "build_graph",
    "degree",
    "neighbors",
    "node_index",
    "node_at",
    "graph_summary",
    "write_edge_list",
    "pagerank",
    "personalized_pagerank",
    "rank_nodes",
    "capacity_count",
    "top_fraction",
    "write_scores",
    "ContactIndex",
    "close_contacts",
    "source_spec_for",
    "replication_streams",
    "run_replication",
    "run_simulation",
    "infected_set",
    "write_tally",
    "mean_infections_interval",
    "check_requirements",
    "prioritize",
    "location_scores",
    "all_knowing",
    "select_tested",
    "write_priorities",
    "recall",
    "recall_curve",
    "first_full_recall",
    "aggregate_zone_scores",
    "classify_high_risk",
    "accuracy",
    "spearman",
    "build_report",
    "write_report",
    "ExperimentConfig",
    "run_experiment",
    "run_sweep",
]
