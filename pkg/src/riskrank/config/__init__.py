"""Resolution of raw experiment configurations into typed, validated objects."""

from . import converters
from . import types
from ._resolve import resolve, DEFAULT_CONVERTERS
from ._schemas import validate_schema, VALUE_TYPES
from ._prototypes import Prototype, is_prototype_class
from ._utils import deep_update, load_config_file
from .types import Capacity

__all__ = [
    "converters",
    "types",
    "resolve",
    "validate_schema",
    "DEFAULT_CONVERTERS",
    "VALUE_TYPES",
    "Prototype",
    "is_prototype_class",
    "deep_update",
    "load_config_file",
    "Capacity",
]
