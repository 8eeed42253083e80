"""Prototype: Define configuration schemas using Python class syntax."""

from typing import Self
import types
import typing

from ..types import NodeRef, StrategyKind, WeightingMode
from .types import Capacity, Schema

# sentinel for missing default values
_MISSING = object()

# mapping from annotations to schema value types
_TYPE_MAP: dict[typing.Any, str] = {
    str: "string",
    int: "integer",
    float: "float",
    bool: "boolean",
    Capacity: "capacity",
    NodeRef: "node",
    StrategyKind: "strategy",
    WeightingMode: "weighting",
}


class Prototype:
    """Base class for defining configuration schemas using Python class syntax.

    Subclass this to define a configuration schema. The class can be used in place of
    a schema in :func:`resolve`, and the result of resolution is an instance of it.

    The initializer does not perform any type checking or conversion; that is the job
    of :func:`resolve`.

    Examples
    --------
    ::

        from riskrank.config import Prototype, resolve

        class Rank(Prototype):
            damping: float = 0.85
            max_iter: int = 1000

        rank = resolve({"damping": "0.5"}, Rank)
        assert rank.damping == 0.5 and rank.max_iter == 1000

    """

    def __init_subclass__(cls) -> None:
        """Check that every field has a supported annotation."""
        for field_name, (type_hint, _) in cls._defined_fields().items():
            if not _is_supported_type_hint(type_hint):
                raise TypeError(
                    f"Unsupported type hint for field '{field_name}': {type_hint}"
                )

        undefined_fields = cls.__dict__.keys() - cls._defined_fields().keys()
        undefined_fields = {f for f in undefined_fields if not f.startswith("_")}

        if undefined_fields:
            raise TypeError(
                f"Undefined fields in Prototype subclass '{cls.__name__}': "
                f"{', '.join(sorted(undefined_fields))}"
            )

    def __init__(self, **kwargs):
        for field_name, (_, default_value) in self._defined_fields().items():
            if field_name in kwargs:
                setattr(self, field_name, kwargs[field_name])
            elif default_value is not _MISSING:
                setattr(self, field_name, default_value)
            else:
                raise TypeError(f"missing required field '{field_name}'")

    def __eq__(self, other: typing.Any) -> bool:
        if type(self) is not type(other):
            return False

        for field_name in self._defined_fields().keys():
            self_has = hasattr(self, field_name)
            if self_has != hasattr(other, field_name):
                return False
            if self_has and getattr(self, field_name) != getattr(other, field_name):
                return False

        return True

    def __repr__(self) -> str:
        field_strs = [
            f"{name}={getattr(self, name)!r}"
            for name in self._defined_fields().keys()
            if hasattr(self, name)
        ]
        return f"{self.__class__.__name__}({', '.join(field_strs)})"

    @classmethod
    def _defined_fields(cls) -> dict[str, typing.Any]:
        """Map field names to ``(type_hint, default_value)``; default may be missing."""
        return {
            field_name: (type_hint, getattr(cls, field_name, _MISSING))
            for field_name, type_hint in typing.get_type_hints(cls).items()
        }

    @classmethod
    def _schema(cls) -> Schema:
        """Convert this Prototype class to an equivalent schema dictionary.

        The leading underscore avoids name clashes with user-defined fields.

        """
        required_keys: dict[str, typing.Any] = {}
        optional_keys: dict[str, typing.Any] = {}

        for field_name, (type_hint, default) in cls._defined_fields().items():
            type_schema = dict(_type_to_schema(type_hint))

            if default is not _MISSING:
                type_schema["default"] = _to_raw(default)
                optional_keys[field_name] = type_schema
            else:
                required_keys[field_name] = type_schema

        result: dict[str, typing.Any] = {"type": "dict"}
        if required_keys:
            result["required_keys"] = required_keys
        if optional_keys:
            result["optional_keys"] = optional_keys

        return result

    def _as_dict(self) -> dict[str, typing.Any]:
        """Convert this instance to a plain, serializable dictionary.

        Enumerations become their values and nodes their ``class:id`` strings, so the
        result can be written as JSON and resolved again.

        """
        return {
            field_name: _to_raw(getattr(self, field_name))
            for field_name in self._defined_fields().keys()
            if hasattr(self, field_name)
        }

    @classmethod
    def _from_dict(cls, data: dict[str, typing.Any]) -> Self:
        """Create an instance from a resolved dictionary, building nested prototypes."""

        def _convert_value(type_hint: typing.Any, value: typing.Any) -> typing.Any:
            type_hint = _unwrap_type_hint(type_hint)

            if value is None:
                return None

            if is_prototype_class(type_hint):
                return type_hint._from_dict(value)

            type_origin = typing.get_origin(type_hint)
            if type_origin is list:
                (element_type,) = typing.get_args(type_hint)
                return [_convert_value(element_type, item) for item in value]

            if type_origin is dict:
                _, value_type = typing.get_args(type_hint)
                return {k: _convert_value(value_type, v) for k, v in value.items()}

            return value

        init_kwargs = {}
        for field_name, (type_hint, _) in cls._defined_fields().items():
            if field_name in data:
                init_kwargs[field_name] = _convert_value(type_hint, data[field_name])
        return cls(**init_kwargs)


def _to_raw(item: typing.Any) -> typing.Any:
    """Turn a field value back into a raw configuration value."""
    if is_prototype_class(type(item)):
        return item._as_dict()
    if isinstance(item, NodeRef):
        return str(item)
    if isinstance(item, (StrategyKind, WeightingMode)):
        return item.value
    if isinstance(item, (list, tuple)):
        return [_to_raw(sub_item) for sub_item in item]
    if isinstance(item, dict):
        return {k: _to_raw(v) for k, v in item.items()}
    return item


def _is_nullable_type(type_hint: typing.Any) -> bool:
    """Check if a type hint is ``T | None``."""
    origin = typing.get_origin(type_hint)
    if origin is typing.Union or origin is types.UnionType:
        args = typing.get_args(type_hint)
        return len(args) == 2 and type(None) in args
    return False


def _unwrap_type_hint(type_hint: typing.Any) -> typing.Any:
    """Unwrap ``T | None`` to ``T``."""
    if _is_nullable_type(type_hint):
        type_hint = next(a for a in typing.get_args(type_hint) if a is not type(None))

    return type_hint


def _is_supported_type_hint(type_hint: typing.Any) -> bool:
    """Check if a type hint is supported in Prototype fields.

    Supported are the annotations in ``_TYPE_MAP``, ``typing.Any``, ``T | None``,
    ``list[T]``, ``dict[str, T]`` and Prototype subclasses.

    """
    type_hint = _unwrap_type_hint(type_hint)

    if is_prototype_class(type_hint):
        return True

    type_origin = typing.get_origin(type_hint)
    type_args = typing.get_args(type_hint)

    if type_origin is list:
        return len(type_args) == 1 and _is_supported_type_hint(type_args[0])

    if type_origin is dict:
        return (
            len(type_args) == 2
            and type_args[0] is str
            and _is_supported_type_hint(type_args[1])
        )

    return type_hint in _TYPE_MAP or type_hint is typing.Any


def _type_to_schema(type_hint: typing.Any) -> Schema:
    """Convert a supported type hint to a schema."""
    if _is_nullable_type(type_hint):
        schema = dict(_type_to_schema(_unwrap_type_hint(type_hint)))
        schema["nullable"] = True
        return schema

    if type_hint is typing.Any:
        return {"type": "any"}

    if is_prototype_class(type_hint):
        return dict(type_hint._schema())

    type_origin = typing.get_origin(type_hint)

    if type_origin is list:
        (element_type,) = typing.get_args(type_hint)
        return {"type": "list", "element_schema": _type_to_schema(element_type)}

    if type_origin is dict:
        _, value_type = typing.get_args(type_hint)
        return {"type": "dict", "extra_keys_schema": _type_to_schema(value_type)}

    if type_hint in _TYPE_MAP:
        return {"type": _TYPE_MAP[type_hint]}

    raise TypeError(f"Unsupported type hint: {type_hint}")  # pragma: no cover


def is_prototype_class(
    type_: typing.Any,
) -> typing.TypeGuard[type[Prototype]]:
    """Check if a type is a Prototype subclass (but not Prototype itself)."""
    return (
        isinstance(type_, type)
        and issubclass(type_, Prototype)
        and type_ is not Prototype
    )
