"""Tests for resolving raw configurations: interpolation, conversion and errors."""

from riskrank.config import resolve
from riskrank import exceptions
from riskrank.config.types import ConfigurationDict, Schema
from riskrank.types import NodeRef, StrategyKind

from pytest import raises


# interpolation ========================================================================


def test_interpolation_of_an_entry_at_the_same_level():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {
            "beta": {"type": "float"},
            "out": {"type": "string"},
        },
    }

    cfg: ConfigurationDict = {"beta": 0.4, "out": "results/beta-${beta}"}

    # when
    result = resolve(cfg, schema)

    # then
    assert result["out"] == "results/beta-0.4"


def test_interpolation_of_a_deeper_entry():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {
            "out": {"type": "string"},
            "simulation": {
                "type": "dict",
                "required_keys": {"seed": {"type": "integer"}},
            },
        },
    }

    cfg: ConfigurationDict = {
        "out": "run-${simulation.seed}",
        "simulation": {"seed": 7},
    }

    # when
    result = resolve(cfg, schema)

    # then
    assert result["out"] == "run-7"


def test_interpolation_can_reference_list_elements():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {
            "first": {"type": "strategy"},
            "strategies": {"type": "list", "element_schema": {"type": "strategy"}},
        },
    }

    cfg: ConfigurationDict = {"first": "${strategies.1}", "strategies": ["pr", "ppr"]}

    # when
    result = resolve(cfg, schema)

    # then
    assert result["first"] is StrategyKind.PPR_BASED


def test_interpolated_value_is_converted_afterwards():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {
            "person": {"type": "string"},
            "source": {"type": "node"},
        },
    }

    cfg: ConfigurationDict = {"person": "18", "source": "person:${person}"}

    # when
    result = resolve(cfg, schema)

    # then
    assert result["source"] == NodeRef.person("18")


def test_global_variables_are_available_after_the_root():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {"out": {"type": "string"}},
    }

    cfg: ConfigurationDict = {"out": "${env.HOME}/results"}

    # when
    result = resolve(cfg, schema, global_variables={"env": {"HOME": "/home/alice"}})

    # then
    assert result["out"] == "/home/alice/results"


def test_circular_reference_raises():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {"a": {"type": "string"}, "b": {"type": "string"}},
    }

    cfg: ConfigurationDict = {"a": "${b}", "b": "${a}"}

    # when
    with raises(exceptions.ResolutionError) as excinfo:
        resolve(cfg, schema)

    # then
    assert "Circular reference" in str(excinfo.value)


# structure ============================================================================


def test_missing_optional_keys_take_their_defaults():
    # given
    schema: Schema = {
        "type": "dict",
        "optional_keys": {"damping": {"type": "float", "default": 0.85}},
    }

    # when
    result = resolve({}, schema)

    # then
    assert result == {"damping": 0.85}


def test_nullable_values_may_be_none():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {"source": {"type": "node", "nullable": True}},
    }

    # when
    result = resolve({"source": None}, schema)

    # then
    assert result == {"source": None}


def test_unexpected_null_raises():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {"source": {"type": "node"}},
    }

    # when / then
    with raises(exceptions.ResolutionError) as excinfo:
        resolve({"source": None}, schema)

    assert excinfo.value.keypath == ("source",)


def test_any_type_passes_values_through():
    # given
    schema: Schema = {"type": "dict", "extra_keys_schema": {"type": "any"}}

    # when
    result = resolve({"notes": {"a": [1, 2]}}, schema)

    # then
    assert result == {"notes": {"a": [1, 2]}}


# errors ===============================================================================


def test_referencing_an_undefined_key_raises():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {"out": {"type": "string"}},
    }

    # when
    with raises(exceptions.ResolutionError) as excinfo:
        resolve({"out": "${missing}"}, schema)

    # then
    assert "'missing' is undefined" in str(excinfo.value)


def test_missing_required_key_reports_its_keypath():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {
            "rank": {
                "type": "dict",
                "required_keys": {"damping": {"type": "float"}},
            },
        },
    }

    # when
    with raises(exceptions.ResolutionError) as excinfo:
        resolve({"rank": {}}, schema)

    # then
    assert excinfo.value.keypath == ("rank", "damping")
    assert str(excinfo.value).startswith('Cannot resolve keypath "rank.damping"')


def test_extra_key_raises():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {"beta": {"type": "float"}},
    }

    # when
    with raises(exceptions.ResolutionError) as excinfo:
        resolve({"beta": 0.4, "gamma": 1}, schema)

    # then
    assert excinfo.value.keypath == ("gamma",)


def test_conversion_error_reports_the_keypath():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {
            "capacities": {"type": "list", "element_schema": {"type": "capacity"}},
        },
    }

    # when
    with raises(exceptions.ResolutionError) as excinfo:
        resolve({"capacities": [0.5, 1.5]}, schema)

    # then
    assert excinfo.value.keypath == ("capacities", "1")
    assert "Capacity must lie in (0, 1]" in str(excinfo.value)


def test_a_list_where_a_value_is_expected_raises():
    # given
    schema: Schema = {
        "type": "dict",
        "required_keys": {"beta": {"type": "float"}},
    }

    # when / then
    with raises(exceptions.ResolutionError):
        resolve({"beta": [0.4]}, schema)


def test_resolve_validates_the_schema_first():
    with raises(exceptions.InvalidSchemaError):
        resolve({"beta": 0.4}, {"type": "dict", "required_keys": {"beta": {}}})
