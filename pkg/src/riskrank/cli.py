"""Command-line interface: ``riskrank {build,rank,simulate,evaluate,sweep}``.

Every subcommand reads the same experiment configuration. An optional ``--config``
file (JSON or TOML) is merged with the flags given on the command line, flags winning,
and the result is resolved into an :class:`ExperimentConfig`. String values may refer
to other entries, e.g. ``out = "results/beta-${simulation.beta}"``, or to the
environment through ``${env.NAME}``.

``sweep`` repeats ``evaluate`` for each rate of infection given in ``--betas`` and
reports the recall over the full capacity grid at each rate, in one long-format
``sweep.csv``.

Exit codes: 0 on success, 1 on runtime or data errors, 2 on usage or configuration
errors.

"""

from collections.abc import Sequence
from pathlib import Path
from typing import Any
import argparse
import json
import logging
import os
import sys

from ._evaluate import write_report
from ._experiment import (
    ExperimentConfig,
    load_inputs,
    run_experiment,
    run_rank,
    run_sweep,
    sim_config,
    write_sweep,
)
from ._graph import build_graph, graph_summary, write_edge_list
from ._rank import write_scores
from ._simulate import run_simulation, write_tally
from .config import converters, deep_update, load_config_file, resolve
from .exceptions import ConfigurationError, Error, StrategyError

logger = logging.getLogger(__name__)

# flags ================================================================================

# flag destination -> keypath in the experiment configuration
_OVERRIDES: dict[str, tuple[str, ...]] = {
    "visits": ("inputs", "visits"),
    "meta": ("inputs", "meta"),
    "cases": ("inputs", "cases"),
    "builtin": ("inputs", "builtin"),
    "weighting": ("graph", "weighting"),
    "algo": ("rank", "algorithm"),
    "damping": ("rank", "damping"),
    "tol": ("rank", "tol"),
    "max_iter": ("rank", "max_iter"),
    "normalize": ("rank", "normalize"),
    "beta": ("simulation", "beta"),
    "isolation_step": ("simulation", "isolation_step"),
    "replications": ("simulation", "replications"),
    "seed": ("simulation", "seed"),
    "threshold": ("simulation", "threshold"),
    "workers": ("simulation", "workers"),
    "source": ("source",),
    "strategies": ("strategies",),
    "route": ("route",),
    "capacities": ("capacities",),
    "exclude_source": ("exclude_source",),
    "out": ("out",),
}


def _comma_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML experiment configuration")
    common.add_argument(
        "-v", "--verbose", action="store_true", help="log debugging output"
    )
    common.add_argument("-q", "--quiet", action="store_true", help="log errors only")

    inputs = common.add_argument_group("inputs")
    inputs.add_argument("--visits", help="visit log with header location,user,time")
    inputs.add_argument("--meta", help="location metadata: location,x,y,routes,zone")
    inputs.add_argument("--cases", help="observed cases per zone: zone,cases")
    inputs.add_argument("--builtin", help="builtin dataset, e.g. paper-synthetic")
    inputs.add_argument("--weighting", help="edge weights: binary or count")
    inputs.add_argument("--out", help="output directory")

    ranking = common.add_argument_group("ranking")
    ranking.add_argument("--damping", help="damping factor d in [0, 1]")
    ranking.add_argument("--tol", help="convergence threshold")
    ranking.add_argument("--max-iter", dest="max_iter", help="iteration cap")
    ranking.add_argument(
        "--normalize",
        action="store_const",
        const=True,
        help="divide Personalized PageRank scores by their sum",
    )

    simulation = common.add_argument_group("simulation")
    simulation.add_argument("--source", help="source node, person:ID or location:ID")
    simulation.add_argument("--beta", help="rate of infection")
    simulation.add_argument(
        "--isolation-step", dest="isolation_step", help="steps before isolation"
    )
    simulation.add_argument("--replications", help="number of replications")
    simulation.add_argument("--seed", help="master random seed")
    simulation.add_argument(
        "--threshold", help="replications a person must be infected in to count"
    )
    simulation.add_argument("--workers", help="worker processes for replications")

    strategies = common.add_argument_group("strategies")
    strategies.add_argument(
        "--strategies",
        type=_comma_list,
        help="comma-separated: base, location, route, pr, ppr",
    )
    strategies.add_argument("--route", help="route for the route-based strategy")
    strategies.add_argument(
        "--capacities", type=_comma_list, help="comma-separated capacities in (0, 1]"
    )
    strategies.add_argument(
        "--include-source",
        dest="exclude_source",
        action="store_const",
        const=False,
        help="keep a person source in the traced population",
    )
    return common


def make_parser() -> argparse.ArgumentParser:
    """The argument parser of the ``riskrank`` command."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="riskrank",
        description="Transmission-risk ranking on people-location networks.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    build = subparsers.add_parser(
        "build", parents=[common], help="build the network and summarize it"
    )
    build.add_argument(
        "--edges", action="store_true", help="write edges.csv to the output directory"
    )

    rank = subparsers.add_parser(
        "rank", parents=[common], help="write PageRank or Personalized PageRank scores"
    )
    rank.add_argument("--algo", choices=["pr", "ppr"], help="ranking algorithm")

    subparsers.add_parser(
        "simulate", parents=[common], help="tally infections over replications"
    )
    subparsers.add_parser(
        "evaluate", parents=[common], help="evaluate strategies and write a report"
    )

    sweep = subparsers.add_parser(
        "sweep",
        parents=[common],
        help="evaluate strategies over the capacity grid at each rate in --betas",
    )
    sweep.add_argument(
        "--betas",
        type=_comma_list,
        default=["0.1", "0.2", "0.4", "0.8"],
        help="comma-separated rates of infection",
    )
    return parser


# configuration ========================================================================


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    for dest, keypath in _OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        *parents, key = keypath
        target = overrides
        for parent in parents:
            target = target.setdefault(parent, {})
        target[key] = value
    return overrides


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Resolve the configuration file, if any, overlaid with the given flags.

    Raises
    ------
    ConfigurationError
        If the configuration is invalid.

    """
    raw = load_config_file(args.config) if args.config is not None else {}
    merged = deep_update([raw, _overrides(args)])
    return resolve(merged, ExperimentConfig, global_variables={"env": dict(os.environ)})


def _configure_logging(args: argparse.Namespace) -> None:
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


# commands =============================================================================


def cmd_build(config: ExperimentConfig, args: argparse.Namespace) -> None:
    graph = build_graph(load_inputs(config.inputs).dataset, config.graph.weighting)
    print(graph_summary(graph))

    if args.edges:
        path = Path(config.out) / "edges.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as stream:
            write_edge_list(graph, stream)
        print(f"wrote {path}")


def cmd_rank(config: ExperimentConfig, args: argparse.Namespace) -> None:
    graph = build_graph(load_inputs(config.inputs).dataset, config.graph.weighting)
    scores = run_rank(config, graph)

    path = Path(config.out) / "scores.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as stream:
        write_scores(scores, stream)

    status = "converged" if scores.converged else "did not converge"
    print(f"{status} after {scores.iterations} iterations")
    print(f"wrote {path}")


def cmd_simulate(config: ExperimentConfig, args: argparse.Namespace) -> None:
    tally = run_simulation(load_inputs(config.inputs).dataset, sim_config(config))

    path = Path(config.out) / "tally.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as stream:
        write_tally(tally, stream)

    print(f"mean infections per replication: {tally.mean_infections:.4f}")
    print(f"wrote {path}")


def cmd_evaluate(config: ExperimentConfig, args: argparse.Namespace) -> None:
    report = run_experiment(config)
    out = Path(config.out)
    written = write_report(report, out)

    path = out / "config.json"
    path.write_text(json.dumps(config._as_dict(), indent=2) + "\n", encoding="utf-8")
    written.append(path)

    for curve in report.curves:
        recalls = " ".join(f"{r:.2f}" for r in curve.recalls)
        print(f"{curve.strategy}: {recalls}")
    for path in written:
        print(f"wrote {path}")


def cmd_sweep(config: ExperimentConfig, args: argparse.Namespace) -> None:
    try:
        betas = [converters.float_(beta) for beta in args.betas]
    except ConfigurationError as exc:
        raise ConfigurationError(f"--betas: {exc}")

    reports = run_sweep(config, betas)

    path = Path(config.out) / "sweep.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as stream:
        write_sweep(reports, stream)
    print(f"wrote {path}")


_COMMANDS = {
    "build": cmd_build,
    "rank": cmd_rank,
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
}


# entry point ==========================================================================


def main(argv: Sequence[str] | None = None) -> int:
    """Run the ``riskrank`` command and return its exit code."""
    parser = make_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    try:
        config = load_config(args)

        needs_source = args.command == "rank" and config.rank.algorithm == "ppr"
        if needs_source and config.source is None:
            parser.error("rank with --algo ppr requires --source")
        _COMMANDS[args.command](config, args)

    except (ConfigurationError, StrategyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (Error, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    return 0
