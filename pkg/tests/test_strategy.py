"""Tests for the tracing/testing strategies and the all-knowing oracle."""

import io

import pytest
from pytest import approx, raises

from riskrank import (
    all_knowing,
    build_graph,
    check_requirements,
    location_scores,
    pagerank,
    parse_location_meta,
    prioritize,
    rank_nodes,
    select_tested,
    write_priorities,
)
from riskrank import exceptions
from riskrank.types import (
    ALL_KNOWING,
    NodeClass,
    NodeRef,
    PriorityList,
    StrategyContext,
    StrategyKind,
)


@pytest.fixture
def ctx(travel_history, meta_csv) -> StrategyContext:
    return StrategyContext(
        graph=build_graph(travel_history),
        meta=parse_location_meta(io.StringIO(meta_csv)),
        source=NodeRef.location("A"),
    )


# base =================================================================================


def test_base_is_a_seeded_permutation(ctx):
    # when
    first = prioritize(StrategyKind.BASE, ctx)
    second = prioritize(StrategyKind.BASE, ctx)

    # then
    assert first == second
    assert sorted(first.persons) == sorted(ctx.graph.persons)
    assert first.strategy is StrategyKind.BASE


def test_base_raises_on_negative_seed(ctx):
    # given
    ctx = StrategyContext(graph=ctx.graph, seed=-1)

    # when / then
    with raises(exceptions.InvalidParameterError):
        prioritize(StrategyKind.BASE, ctx)


# location and route ===================================================================


def test_location_based_orders_by_distance_to_the_source_location(ctx):
    # when
    priority = prioritize(StrategyKind.LOCATION_BASED, ctx)

    # then
    assert priority.persons == ("1", "10", "2", "6", "7", "3", "4", "8", "5", "9")


def test_location_based_with_a_person_source_uses_the_visited_locations(ctx):
    # given
    ctx = StrategyContext(graph=ctx.graph, meta=ctx.meta, source=NodeRef.person("9"))

    # when
    priority = prioritize(StrategyKind.LOCATION_BASED, ctx)

    # then
    # 9 only visited C; 10 only visited A, the farthest location from C
    assert priority.persons[:4] == ("1", "2", "5", "9")
    assert priority.persons[-1] == "10"


def test_route_based_orders_by_distance_to_the_route(ctx):
    # given
    ctx = StrategyContext(graph=ctx.graph, meta=ctx.meta, route="blue")

    # when
    priority = prioritize(StrategyKind.ROUTE_BASED, ctx)

    # then
    assert priority.persons == ("1", "2", "3", "4", "5", "6", "7", "8", "9", "10")


def test_route_based_raises_without_a_route(ctx):
    with raises(exceptions.StrategyError) as excinfo:
        prioritize(StrategyKind.ROUTE_BASED, ctx)

    assert excinfo.value.strategy == StrategyKind.ROUTE_BASED
    assert str(excinfo.value) == 'Strategy "route" requires a route.'


def test_route_based_raises_without_route_membership(ctx):
    # given
    ctx = StrategyContext(graph=ctx.graph, meta=ctx.meta, route="green")

    # when / then
    with raises(exceptions.StrategyError) as excinfo:
        check_requirements(StrategyKind.ROUTE_BASED, ctx)

    assert "route membership" in str(excinfo.value)


def test_location_based_raises_without_coordinates(ctx):
    # given
    ctx = StrategyContext(graph=ctx.graph, source=NodeRef.location("A"))

    # when / then
    with raises(exceptions.StrategyError) as excinfo:
        prioritize(StrategyKind.LOCATION_BASED, ctx)

    assert "coordinates" in str(excinfo.value)


def test_location_based_raises_without_a_source(ctx):
    # given
    ctx = StrategyContext(graph=ctx.graph, meta=ctx.meta)

    # when / then
    with raises(exceptions.StrategyError):
        prioritize(StrategyKind.LOCATION_BASED, ctx)


# pagerank based =======================================================================


def test_pr_based_follows_the_pagerank_of_persons(synthetic_graph):
    # given
    ctx = StrategyContext(graph=synthetic_graph)

    # when
    priority = prioritize(StrategyKind.PR_BASED, ctx)

    # then
    expected = rank_nodes(pagerank(synthetic_graph), NodeClass.PERSON)
    assert list(priority.persons) == [node.id for node in expected]


def test_ppr_based_puts_the_source_and_its_co_visitors_first(synthetic_graph):
    # given
    ctx = StrategyContext(graph=synthetic_graph, source=NodeRef.person("18"))

    # when
    priority = prioritize(StrategyKind.PPR_BASED, ctx)

    # then
    assert priority.persons[0] == "18"
    assert set(priority.persons[1:13]) == {
        *("1", "2", "5", "9", "11", "12"),
        *("13", "14", "16", "17", "19", "20"),
    }


def test_ppr_based_raises_without_a_source(synthetic_graph):
    with raises(exceptions.StrategyError) as excinfo:
        prioritize(StrategyKind.PPR_BASED, StrategyContext(graph=synthetic_graph))

    assert str(excinfo.value) == 'Strategy "ppr" requires a source node.'


def test_ppr_based_raises_on_a_source_outside_the_graph(synthetic_graph):
    # given
    ctx = StrategyContext(graph=synthetic_graph, source=NodeRef.person("99"))

    # when / then
    with raises(exceptions.StrategyError):
        prioritize(StrategyKind.PPR_BASED, ctx)


# location scores ======================================================================


def test_location_scores_decrease_with_distance(ctx):
    # when
    scores = location_scores(StrategyKind.LOCATION_BASED, ctx)

    # then
    assert scores["A"] == 1.0
    assert scores["B"] == 0.5
    assert scores["A"] > scores["B"] > scores["C"] > scores["D"]


def test_location_scores_of_pr_are_the_pagerank_of_locations(synthetic_graph):
    # given
    ctx = StrategyContext(graph=synthetic_graph)

    # when
    scores = location_scores(StrategyKind.PR_BASED, ctx)

    # then
    expected = pagerank(synthetic_graph).by_location()
    assert scores == approx(expected)


def test_location_scores_of_base_are_seeded(ctx):
    # when
    first = location_scores(StrategyKind.BASE, ctx)
    second = location_scores(StrategyKind.BASE, ctx)

    # then
    assert first == second
    assert set(first) == {"A", "B", "C", "D"}


# all-knowing and capacities ===========================================================


def test_all_knowing_puts_the_infected_first():
    # when
    priority = all_knowing({"c", "a"}, ["a", "b", "c", "d"])

    # then
    assert priority.persons == ("a", "c", "b", "d")
    assert priority.strategy == ALL_KNOWING


def test_all_knowing_raises_on_infected_outside_the_population():
    with raises(exceptions.InvalidParameterError):
        all_knowing({"z"}, ["a", "b"])


def test_select_tested_takes_the_ceiling_of_the_capacity():
    # given
    priority = PriorityList(tuple("abcdefghij"), StrategyKind.BASE)

    # then
    assert select_tested(priority, 0.3) == {"a", "b", "c"}
    assert select_tested(priority, 0.25) == {"a", "b", "c"}
    assert select_tested(priority, 1.0) == set("abcdefghij")


def test_priority_list_excluding_keeps_the_order():
    # given
    priority = PriorityList(("a", "b", "c"), StrategyKind.BASE)

    # then
    assert priority.excluding({"b"}).persons == ("a", "c")


def test_priority_list_rejects_repeated_persons():
    with raises(exceptions.InvalidParameterError):
        PriorityList(("a", "a"), StrategyKind.BASE)


def test_write_priorities():
    # given
    priority = PriorityList(("b", "a"), StrategyKind.PPR_BASED)
    stream = io.StringIO()

    # when
    write_priorities(priority, stream)

    # then
    assert stream.getvalue() == "rank,person,strategy\n1,b,ppr\n2,a,ppr\n"
