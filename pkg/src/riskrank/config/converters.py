"""Provides the built-in converters.

A converter is a function that accepts a raw value -- often, but not necessarily a
string -- and returns a resolved value with the appropriate type. Converters act as
parsers for command-line and file values, and as type validators for the resolved
experiment configuration.

"""

from ..exceptions import ConversionError, InvalidParameterError
from ..types import NodeRef, StrategyKind, WeightingMode

# numeric ==============================================================================


def integer(value: int | float | str) -> int:
    """Convert a value to an integer.

    Accepts ``int`` values (pass-through), whole-number ``float`` values
    (coerced to ``int``), and numeric strings. Rejects ``bool`` values,
    non-whole floats, and non-numeric strings.

    Example
    -------

    >>> from riskrank.config.converters import integer
    >>> integer('1000')
    1000
    >>> integer(3.0)
    3

    """
    if isinstance(value, bool):
        raise ConversionError(f"Cannot convert bool to integer: {value!r}.")

    if isinstance(value, int):
        return value

    if isinstance(value, float):
        if value.is_integer():
            return int(value)
        raise ConversionError(
            f"Cannot convert float {value} to integer: value is not a whole number.",
        )

    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            raise ConversionError(f"Cannot convert to integer: '{value}'.")

    raise ConversionError(f"Cannot convert to integer: {value!r}.")


def float_(value: int | float | str) -> float:
    """Convert a value to a float.

    Accepts ``float`` values (pass-through), ``int`` values (coerced to
    ``float``), and numeric strings. Rejects ``bool`` values and non-numeric
    strings.

    Example
    -------

    >>> from riskrank.config.converters import float_
    >>> float_('0.85')
    0.85
    >>> float_(1)
    1.0

    """
    if isinstance(value, bool):
        raise ConversionError(f"Cannot convert bool to float: {value!r}.")

    if isinstance(value, float):
        return value

    if isinstance(value, (int, str)):
        try:
            return float(value)
        except ValueError, TypeError:
            raise ConversionError(f"Cannot convert to float: '{value}'.")

    raise ConversionError(f"Cannot convert to float: {value!r}.")


def capacity(value: int | float | str) -> float:
    """Convert a value to a testing capacity, a fraction in (0, 1].

    Example
    -------

    >>> from riskrank.config.converters import capacity
    >>> capacity('0.05')
    0.05
    >>> capacity(0)
    Traceback (most recent call last):
    ...
    riskrank.exceptions.ConversionError: Capacity must lie in (0, 1], got 0.0.

    """
    result = float_(value)
    if not 0 < result <= 1:
        raise ConversionError(f"Capacity must lie in (0, 1], got {result}.")
    return result


# logical ==============================================================================


def boolean(value: bool | str) -> bool:
    """Convert a value to a boolean.

    Accepts ``bool`` values (pass-through) and the strings ``"True"`` and
    ``"False"``, in any case. Rejects all other types and string values.

    """
    if isinstance(value, bool):
        return value

    if isinstance(value, str):
        if value.lower() == "true":
            return True
        if value.lower() == "false":
            return False

    raise ConversionError(f"Cannot convert to bool: {value!r}.")


# domain ===============================================================================


def node(value: str | NodeRef) -> NodeRef:
    """Convert a ``class:id`` string to a :class:`NodeRef`.

    Example
    -------

    >>> from riskrank.config.converters import node
    >>> node('person:18')
    NodeRef(kind=<NodeClass.PERSON: 'person'>, id='18')

    """
    if isinstance(value, NodeRef):
        return value

    if isinstance(value, str):
        try:
            return NodeRef.parse(value)
        except InvalidParameterError as exc:
            raise ConversionError(f"Cannot convert to node: {exc.reason}")

    raise ConversionError(f"Cannot convert to node: {value!r}.")


def strategy(value: str) -> StrategyKind:
    """Convert a strategy name such as ``ppr`` to a :class:`StrategyKind`."""
    try:
        return StrategyKind(value)
    except ValueError:
        choices = ", ".join(kind.value for kind in StrategyKind)
        raise ConversionError(
            f"Unknown strategy: {value!r}. Expected one of: {choices}."
        )


def weighting(value: str) -> WeightingMode:
    """Convert ``binary`` or ``count`` to a :class:`WeightingMode`."""
    try:
        return WeightingMode(value)
    except ValueError:
        choices = ", ".join(mode.value for mode in WeightingMode)
        raise ConversionError(
            f"Unknown weighting mode: {value!r}. Expected one of: {choices}."
        )
