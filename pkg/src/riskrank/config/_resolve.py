"""Public resolve() function and the default converters."""

from typing import Any, Callable, Mapping
import typing

from . import converters as _converters, types as _types
from ._internals import make_node
from ._prototypes import Prototype, is_prototype_class
from ._schemas import validate_schema

# defaults =============================================================================

# the default converters used by resolve()
DEFAULT_CONVERTERS: dict[str, Callable] = {
    "integer": _converters.integer,
    "float": _converters.float_,
    "string": str,
    "boolean": _converters.boolean,
    "capacity": _converters.capacity,
    "node": _converters.node,
    "strategy": _converters.strategy,
    "weighting": _converters.weighting,
    "any": lambda x: x,
}


# overloads ----------------------------------------------------------------------------

# these overloads let type checkers predict that resolving against a Prototype subclass
# returns an instance of that class


@typing.overload
def resolve[_P: Prototype](
    cfg: _types.Configuration,
    spec: type[_P],
    converters: Mapping[str, Callable] = ...,
    global_variables: Mapping[str, Any] | None = ...,
) -> _P: ...


@typing.overload
def resolve(
    cfg: _types.Configuration,
    spec: _types.Schema,
    converters: Mapping[str, Callable] = ...,
    global_variables: Mapping[str, Any] | None = ...,
) -> Any: ...


# implementation -----------------------------------------------------------------------


def resolve(
    cfg: _types.Configuration,
    spec: _types.Schema | type[Prototype],
    converters: Mapping[str, Callable] = DEFAULT_CONVERTERS,
    global_variables: Mapping[str, Any] | None = None,
) -> Any:
    """Resolve a configuration by interpolating and converting its entries.

    Parameters
    ----------
    cfg : :class:`types.Configuration`
        The "raw" configuration to resolve.
    spec : Union[:class:`types.Schema`, type[:class:`Prototype`]]
        The schema describing the structure of the resolved configuration, or a
        :class:`Prototype` subclass, in which case the result is an instance of it.
    converters : Mapping[str, Callable]
        Converter per value type. Defaults to :data:`DEFAULT_CONVERTERS`.
    global_variables : Mapping[str, Any] | None
        Variables available during string interpolation after the configuration root,
        for instance ``{"env": os.environ}``.

    Raises
    ------
    InvalidSchemaError
        If the schema is not valid.
    ResolutionError
        If the configuration does not match the schema, if there is a circular
        reference, or a value cannot be converted.

    """
    if is_prototype_class(spec):
        schema = spec._schema()
    else:
        schema = typing.cast(_types.Schema, spec)

    validate_schema(schema, value_types=set(converters) - {"any"})

    resolution_context = _types.ResolutionContext(
        converters, dict(global_variables or {})
    )

    resolved = make_node(cfg, schema, resolution_context).resolve()

    if is_prototype_class(spec):
        assert isinstance(resolved, dict)
        return spec._from_dict(resolved)

    return resolved
