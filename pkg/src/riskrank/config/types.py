"""Types and type aliases used by configuration resolution."""

from typing import Any, Callable, Mapping, NewType
import dataclasses

# configurations =======================================================================

# these type aliases define a "configuration", which is the type of both the input
# and output of resolve().

type ConfigurationValue = str | int | float | bool | None
type ConfigurationContainer = ConfigurationDict | ConfigurationList
type ConfigurationList = list[ConfigurationContainer | ConfigurationValue]
type ConfigurationDict = dict[str, ConfigurationContainer | ConfigurationValue]

type Configuration = ConfigurationContainer | ConfigurationValue

# schemas ==============================================================================

# a schema is a mapping describing the expected structure of a configuration; see
# validate_schema() for the forms it may take
type Schema = Mapping[str, Any]

# a sequence of keys addressing a node of the configuration tree
type KeyPath = tuple[str, ...]

# annotation marking a float that must lie in (0, 1]; maps to the "capacity" value type
Capacity = NewType("Capacity", float)


# resolution context ===================================================================


@dataclasses.dataclass(frozen=True)
class ResolutionContext:
    """Options shared by every node of a configuration tree during resolution.

    Attributes
    ----------
    converters : Mapping[str, Callable]
        Converter per value type.
    global_variables : Mapping[str, Any]
        Variables available to string interpolation after the configuration root.

    """

    converters: Mapping[str, Callable[[Any], Any]]
    global_variables: Mapping[str, Any]
