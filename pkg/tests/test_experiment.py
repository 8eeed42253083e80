"""Tests for experiment configuration and the end-to-end pipeline."""

import io

import pytest
from pytest import raises

from riskrank import ExperimentConfig, run_experiment, run_sweep
from riskrank import exceptions
from riskrank._experiment import (
    check_strategies,
    excluded_persons,
    load_inputs,
    prioritize_all,
    run_rank,
    sim_config,
    write_sweep,
)
from riskrank._evaluate import first_full_recall
from riskrank._simulate import ContactIndex, run_simulation
from riskrank.config import resolve
from riskrank.types import ALL_KNOWING, FixedPerson, NodeRef, StrategyKind

CASES_CSV = "zone,cases\nz1,30\nz2,70\nz3,0\n"


def make_config(raw: dict) -> ExperimentConfig:
    return resolve(raw, ExperimentConfig)


@pytest.fixture
def travel_history_files(tmp_path, travel_history_csv, meta_csv):
    (tmp_path / "visits.csv").write_text(travel_history_csv)
    (tmp_path / "meta.csv").write_text(meta_csv)
    (tmp_path / "cases.csv").write_text(CASES_CSV)
    return {
        "visits": str(tmp_path / "visits.csv"),
        "meta": str(tmp_path / "meta.csv"),
        "cases": str(tmp_path / "cases.csv"),
    }


def synthetic_config(**overrides) -> ExperimentConfig:
    raw = {
        "inputs": {"builtin": "paper-synthetic"},
        "source": "person:18",
        "simulation": {"beta": 0.4, "replications": 300, "seed": 0},
    }
    raw.update(overrides)
    return make_config(raw)


# configuration ========================================================================


def test_experiment_config_defaults():
    # when
    config = make_config({})

    # then
    assert config.rank.algorithm == "ppr"
    assert config.rank.damping == 0.85
    assert config.simulation.replications == 1000
    assert config.strategies == [
        StrategyKind.BASE,
        StrategyKind.PR_BASED,
        StrategyKind.PPR_BASED,
    ]
    assert config.capacities[0] == 0.05
    assert config.capacities[-1] == 1.0
    assert len(config.capacities) == 20
    assert config.exclude_source


def test_experiment_config_interpolates_other_entries():
    # when
    config = make_config(
        {"simulation": {"beta": 0.8}, "out": "results/beta-${simulation.beta}"}
    )

    # then
    assert config.out == "results/beta-0.8"


def test_experiment_config_vars_can_be_referenced():
    # when
    config = make_config(
        {
            "vars": {"study": "pilot", "tags": ["a", "b"]},
            "out": "results/${vars.study}",
        }
    )

    # then
    assert config.out == "results/pilot"
    assert config.vars == {"study": "pilot", "tags": ["a", "b"]}


def test_experiment_config_rejects_invalid_capacity():
    with raises(exceptions.ResolutionError) as excinfo:
        make_config({"capacities": [0.5, 2]})

    assert excinfo.value.keypath == ("capacities", "1")


def test_sim_config_carries_the_source():
    # when
    config = sim_config(synthetic_config(), beta=0.8)

    # then
    assert config.source == FixedPerson("18")
    assert config.beta == 0.8
    assert config.replications == 300


def test_sim_config_raises_without_a_source():
    with raises(exceptions.ConfigurationError):
        sim_config(make_config({}))


# inputs ===============================================================================


def test_load_inputs_from_files(travel_history_files):
    # when
    inputs = load_inputs(make_config({"inputs": travel_history_files}).inputs)

    # then
    assert len(inputs.dataset) == 19
    assert set(inputs.meta) == {"A", "B", "C", "D"}
    assert inputs.case_counts == {"z1": 30, "z2": 70, "z3": 0}


def test_load_inputs_requires_exactly_one_of_visits_and_builtin(travel_history_files):
    with raises(exceptions.ConfigurationError):
        load_inputs(make_config({}).inputs)

    both = dict(travel_history_files, builtin="travel-history")
    with raises(exceptions.ConfigurationError):
        load_inputs(make_config({"inputs": both}).inputs)


def test_load_inputs_raises_os_error_on_missing_file(tmp_path):
    # given
    config = make_config({"inputs": {"visits": str(tmp_path / "missing.csv")}})

    # when / then
    with raises(OSError):
        load_inputs(config.inputs)


# stages ===============================================================================


def test_run_rank_selects_the_algorithm(synthetic_graph):
    # when
    pr = run_rank(synthetic_config(rank={"algorithm": "pr"}), synthetic_graph)
    ppr = run_rank(synthetic_config(), synthetic_graph)

    # then
    assert pr.values.sum() == pytest.approx(1)
    assert ppr[NodeRef.person("18")] > ppr[NodeRef.person("1")]


def test_run_rank_raises_on_unknown_algorithm(synthetic_graph):
    with raises(exceptions.ConfigurationError):
        run_rank(synthetic_config(rank={"algorithm": "hits"}), synthetic_graph)


def test_check_strategies_raises_on_an_empty_list(synthetic_graph):
    with raises(exceptions.ConfigurationError):
        check_strategies(synthetic_config(strategies=[]), synthetic_graph, {})


def test_check_strategies_raises_on_route_without_a_route(synthetic_graph):
    with raises(exceptions.StrategyError):
        check_strategies(synthetic_config(strategies=["route"]), synthetic_graph, {})


def test_check_strategies_drops_repeats(synthetic_graph):
    # when
    kinds = check_strategies(
        synthetic_config(strategies=["ppr", "base", "ppr"]), synthetic_graph, {}
    )

    # then
    assert kinds == [StrategyKind.PPR_BASED, StrategyKind.BASE]


# run_experiment =======================================================================


def test_ppr_recall_is_never_below_base_on_the_synthetic_network():
    # when
    report = run_experiment(synthetic_config())

    # then
    ppr = report.curve(StrategyKind.PPR_BASED).recalls
    base = report.curve(StrategyKind.BASE).recalls
    assert all(p >= b for p, b in zip(ppr, base))
    assert ppr[report.curve(ALL_KNOWING).capacities.index(0.65)] == 1.0
    # 12 infected of 19 traced persons: ceil(0.6 * 19) == 12
    assert first_full_recall(report.curve(ALL_KNOWING)) == 0.6
    assert len(report.curves) == 4


def test_source_is_excluded_from_the_traced_population(synthetic_graph):
    # when
    priorities = prioritize_all(
        synthetic_config(), synthetic_graph, {}, exclude=frozenset({"18"})
    )

    # then
    for priority in priorities.values():
        assert len(priority) == 19
        assert "18" not in priority.persons


def test_person_source_is_the_only_excluded_person(synthetic):
    # given
    config = synthetic_config()
    tally = run_simulation(ContactIndex(synthetic), sim_config(config))

    # when
    exclude = excluded_persons(config, tally)

    # then
    assert exclude == frozenset({"18"})
    assert excluded_persons(synthetic_config(exclude_source=False), tally) == set()


def test_location_source_keeps_every_visitor_traceable(synthetic, synthetic_graph):
    # given
    config = synthetic_config(source="location:C")
    tally = run_simulation(ContactIndex(synthetic), sim_config(config))

    # when
    exclude = excluded_persons(config, tally)
    priorities = prioritize_all(config, synthetic_graph, {}, exclude)

    # then
    # a new visitor of C is drawn as source in every replication
    assert len(tally.sources) > 1
    assert exclude == frozenset()
    for priority in priorities.values():
        assert len(priority) == 20


def test_report_without_cases_has_no_zone_metrics():
    # when
    report = run_experiment(synthetic_config(strategies=["ppr"]))

    # then
    assert report.accuracy == {}
    assert report.spearman == {}


def test_all_knowing_capacity_outside_tolerance_logs_a_warning(caplog):
    # when
    run_experiment(synthetic_config(strategies=["ppr"]))

    # then
    assert "All-knowing capacity" in caplog.text


def test_run_experiment_with_zones_on_the_travel_history(travel_history_files):
    # given
    config = make_config(
        {
            "inputs": travel_history_files,
            "source": "location:A",
            "route": "blue",
            "strategies": ["location", "route"],
            "simulation": {
                "beta": 0.8,
                "isolation_step": 4,
                "replications": 200,
            },
        }
    )

    # when
    report = run_experiment(config)

    # then
    for kind in (StrategyKind.LOCATION_BASED, StrategyKind.ROUTE_BASED):
        assert report.zones[kind].high_risk == {"z1"}
        assert report.accuracy[kind] == 0.3
        assert report.spearman[kind] == 0.5


def test_run_experiment_raises_on_cases_without_zones(tmp_path, travel_history_files):
    # given
    (tmp_path / "nozones.csv").write_text("location,x,y,routes,zone\nA,0,0,,\n")
    inputs = dict(travel_history_files, meta=str(tmp_path / "nozones.csv"))
    config = make_config(
        {"inputs": inputs, "source": "person:1", "strategies": ["ppr"]}
    )

    # when / then
    with raises(exceptions.EvaluationError):
        run_experiment(config)


# run_sweep ============================================================================


def test_sweep_infected_sets_grow_with_beta():
    # when
    reports = run_sweep(synthetic_config(strategies=["ppr"]), [0.2, 0.8])

    # then
    low = reports[0.2].curve(ALL_KNOWING).recalls
    high = reports[0.8].curve(ALL_KNOWING).recalls
    # infected sets grow with beta, so the oracle recall can only drop
    assert all(l_ >= h for l_, h in zip(low, high))
    assert list(reports) == [0.2, 0.8]


def test_sweep_raises_on_no_betas():
    with raises(exceptions.InvalidParameterError):
        run_sweep(synthetic_config(), [])


def test_write_sweep_long_format():
    # given
    reports = run_sweep(synthetic_config(strategies=["base", "ppr"]), [0.4, 0.8])
    stream = io.StringIO()

    # when
    write_sweep(reports, stream)

    # then
    lines = stream.getvalue().splitlines()
    assert lines[0] == "beta,strategy,capacity,recall"
    assert lines[1].startswith("0.4,base,0.05,")
    assert len(lines) == 1 + 2 * 3 * 20
