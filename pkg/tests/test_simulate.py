"""Tests for the first-generation transmission simulation."""

import io

from pytest import approx, mark, raises

from riskrank import (
    ContactIndex,
    close_contacts,
    infected_set,
    mean_infections_interval,
    replication_streams,
    run_replication,
    run_simulation,
    source_spec_for,
    write_tally,
)
from riskrank import exceptions
from riskrank.types import (
    FixedPerson,
    InfectionTally,
    NodeRef,
    RandomVisitorOf,
    SimConfig,
)

CO_VISITORS_OF_18 = {
    *("1", "2", "5", "9", "11", "12"),
    *("13", "14", "16", "17", "19", "20"),
}


# contacts =============================================================================


def test_close_contacts_of_person_18(synthetic):
    assert close_contacts(synthetic, "18", 0) == CO_VISITORS_OF_18


def test_close_contacts_at_an_idle_time_are_empty(synthetic):
    assert close_contacts(synthetic, "18", 5) == set()


def test_close_contacts_raises_on_unknown_person(synthetic):
    with raises(exceptions.UnknownNodeError):
        close_contacts(synthetic, "99", 0)


def test_contact_index_cycles_the_time_window(travel_history):
    # given
    index = ContactIndex(travel_history)

    # then
    assert index.window_length == 4
    assert [index.dataset_time(step) for step in range(6)] == [1, 2, 3, 4, 1, 2]


def test_source_spec_for():
    assert source_spec_for(NodeRef.person("18")) == FixedPerson("18")
    assert source_spec_for(NodeRef.location("C")) == RandomVisitorOf("C")


# replications =========================================================================


def test_a_single_step_reaches_only_the_first_location(travel_history):
    # given
    index = ContactIndex(travel_history)
    config = SimConfig(FixedPerson("1"), beta=100.0, isolation_step=1)

    # when
    outcome = run_replication(index, config, *replication_streams(0, 0))

    # then
    assert outcome.infected == {"2", "5", "9"}


def test_a_certain_infection_reaches_every_contact_before_isolation(travel_history):
    # given
    index = ContactIndex(travel_history)
    config = SimConfig(FixedPerson("1"), beta=100.0, isolation_step=4)

    # when
    outcome = run_replication(index, config, *replication_streams(0, 0))

    # then
    assert outcome.infected == {"2", "3", "4", "5", "6", "7", "8", "9", "10"}
    assert outcome.steps_run == 4


def test_the_source_is_never_infected(synthetic):
    # given
    config = SimConfig(FixedPerson("18"), beta=100.0, replications=10)

    # when
    tally = run_simulation(synthetic, config)

    # then
    assert tally.counts["18"] == 0
    assert all(tally.counts[p] == 10 for p in CO_VISITORS_OF_18)


def test_infections_grow_with_beta_under_common_random_numbers(travel_history):
    # given
    index = ContactIndex(travel_history)

    for replication in range(50):
        # when
        low = run_replication(
            index,
            SimConfig(FixedPerson("1"), beta=0.4, isolation_step=4),
            *replication_streams(3, replication),
        )
        high = run_replication(
            index,
            SimConfig(FixedPerson("1"), beta=1.2, isolation_step=4),
            *replication_streams(3, replication),
        )

        # then
        assert low.infected <= high.infected


# run_simulation =======================================================================


def test_zero_beta_infects_nobody(synthetic):
    # given
    config = SimConfig(FixedPerson("18"), beta=0.0, replications=100)

    # when
    tally = run_simulation(synthetic, config)

    # then
    assert tally.total_infections == 0
    assert set(tally.counts) == set(synthetic.persons())


def test_mean_infections_match_beta(synthetic):
    # given
    config = SimConfig(FixedPerson("18"), beta=0.4, replications=1000, seed=0)
    mean, standard_error = mean_infections_interval(12, 0.4, 1000)

    # when
    tally = run_simulation(synthetic, config)

    # then
    assert abs(tally.mean_infections - mean) < 3 * standard_error


@mark.slow
def test_mean_infections_match_beta_over_many_replications(synthetic):
    # given
    config = SimConfig(FixedPerson("18"), beta=0.4, replications=100_000, seed=1)
    mean, standard_error = mean_infections_interval(12, 0.4, 100_000)

    # when
    tally = run_simulation(synthetic, config)

    # then
    assert abs(tally.mean_infections - mean) < 3 * standard_error


def test_simulation_is_reproducible(synthetic):
    # given
    config = SimConfig(FixedPerson("18"), beta=0.4, replications=200, seed=42)

    # then
    assert run_simulation(synthetic, config) == run_simulation(synthetic, config)


def test_simulation_does_not_depend_on_the_number_of_workers(synthetic):
    # given
    serial = SimConfig(FixedPerson("18"), beta=0.8, replications=200, seed=5)
    parallel = SimConfig(
        FixedPerson("18"), beta=0.8, replications=200, seed=5, workers=3
    )

    # then
    assert run_simulation(synthetic, serial) == run_simulation(synthetic, parallel)


def test_a_location_source_draws_visitors_of_that_location(synthetic):
    # given
    config = SimConfig(RandomVisitorOf("C"), beta=0.4, replications=300)

    # when
    tally = run_simulation(synthetic, config)

    # then
    assert set(tally.sources) <= CO_VISITORS_OF_18 | {"18"}
    assert sum(tally.sources.values()) == 300
    assert len(tally.sources) > 1


def test_run_simulation_raises_on_unknown_source(synthetic):
    with raises(exceptions.SimulationError):
        run_simulation(synthetic, SimConfig(FixedPerson("99")))

    with raises(exceptions.SimulationError):
        run_simulation(synthetic, SimConfig(RandomVisitorOf("Z")))


def test_sim_config_rejects_negative_beta():
    with raises(exceptions.InvalidParameterError) as excinfo:
        SimConfig(FixedPerson("18"), beta=-0.1)

    assert excinfo.value.parameter == "beta"


# tallies ==============================================================================


def test_infected_set_applies_the_threshold():
    # given
    tally = InfectionTally({"a": 0, "b": 1, "c": 5}, replications=10)

    # then
    assert infected_set(tally) == {"b", "c"}
    assert infected_set(tally, threshold=2) == {"c"}


def test_infected_set_raises_on_threshold_out_of_range():
    # given
    tally = InfectionTally({"a": 0}, replications=10)

    # when / then
    with raises(exceptions.InvalidParameterError):
        infected_set(tally, threshold=0)

    with raises(exceptions.InvalidParameterError):
        infected_set(tally, threshold=11)


def test_write_tally():
    # given
    tally = InfectionTally({"b": 1, "a": 0}, replications=10)
    stream = io.StringIO()

    # when
    write_tally(tally, stream)

    # then
    assert stream.getvalue() == "person,infections,replications\na,0,10\nb,1,10\n"


def test_mean_infections_interval():
    # when
    mean, standard_error = mean_infections_interval(12, 0.4, 1000)

    # then
    assert mean == approx(0.4)
    assert standard_error == approx((12 * (0.4 / 12) * (1 - 0.4 / 12) / 1000) ** 0.5)
