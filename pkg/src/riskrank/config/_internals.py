"""Configurations as trees of nodes, and the machinery for resolving them.

A configuration is a dictionary whose keys are strings and values are configurations, a
list of configurations, or a simple value (string, integer, float, boolean or None).
Internally, it is represented as a tree of _DictNode, _ListNode and _ValueNode objects
built by make_node(), which also enforces the schema's structure (required keys,
defaults, unexpected keys, nullability).

Resolving a _ValueNode happens in two steps:

    1. String interpolation. A string leaf is rendered with Jinja2, using ``${`` and
       ``}`` as variable delimiters. A reference such as ``${simulation.beta}`` is
       looked up first in the root of the configuration tree and then in the global
       variables. The root is exposed to Jinja2 as an "unresolved" container that
       resolves a leaf only when it is accessed, so references may point anywhere in
       the tree. A leaf that is reached again while it is being resolved is a circular
       reference.

    2. Conversion. The interpolated value is passed to the converter registered for the
       value type named by the leaf's schema.

"""

from typing import Any, Mapping
import abc

import jinja2

from ..exceptions import Error, ResolutionError
from . import types as _types

# unresolved containers ================================================================
#
# These containers are passed to Jinja as variables available during string
# interpolation. Accessing an element triggers the resolution of that element if it is
# a value node; otherwise another unresolved container is returned.


class _UnresolvedDict(Mapping):
    """A read-only view of a _DictNode that resolves leaves on access."""

    def __init__(self, dict_node: _DictNode):
        self.dict_node = dict_node

    def __getitem__(self, key):
        return _wrap(self.dict_node.children[key])

    def __len__(self):
        return len(self.dict_node.children)

    def __iter__(self):
        return iter(self.dict_node.children)


class _UnresolvedList:
    """A read-only view of a _ListNode that resolves leaves on access."""

    def __init__(self, list_node: _ListNode):
        self.list_node = list_node

    def __getitem__(self, ix):
        if ix not in range(len(self)):
            raise IndexError(ix)
        return _wrap(self.list_node.children[ix])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __len__(self):
        return len(self.list_node.children)


def _wrap(node: _ConcreteNode) -> Any:
    if isinstance(node, _DictNode):
        return _UnresolvedDict(node)
    elif isinstance(node, _ListNode):
        return _UnresolvedList(node)
    return node.resolve()


# node types ===========================================================================

type _ConcreteNode = _DictNode | _ListNode | _ValueNode


class _Node(abc.ABC):
    """Abstract base class for all nodes in a configuration tree."""

    def __init__(
        self,
        resolution_context: _types.ResolutionContext,
        parent: _ConcreteNode | None = None,
    ):
        self.resolution_context = resolution_context
        self.parent = parent

    @property
    def root(self) -> _ConcreteNode:
        """The root of the configuration tree."""
        node: Any = self
        while node.parent is not None:
            node = node.parent
        return node

    @abc.abstractmethod
    def resolve(self) -> _types.Configuration:
        """Recursively resolve the node into a configuration."""


# _DictNode ----------------------------------------------------------------------------


class _DictNode(_Node):
    """An internal dictionary node, mapping keys to child nodes."""

    def __init__(
        self,
        resolution_context: _types.ResolutionContext,
        parent: _ConcreteNode | None = None,
    ):
        super().__init__(resolution_context, parent)
        self.children: dict[str, _ConcreteNode] = {}

    @classmethod
    def from_configuration(
        cls,
        dct: _types.ConfigurationDict,
        schema: _types.Schema,
        keypath: _types.KeyPath,
        resolution_context: _types.ResolutionContext,
        parent: _ConcreteNode | None = None,
    ) -> _DictNode:
        """Construct a _DictNode from a configuration dictionary and its schema.

        Required keys must be present, missing optional keys take their default (if
        any), and keys the schema does not know are rejected unless it provides an
        ``extra_keys_schema``.

        """
        node = cls(resolution_context, parent=parent)

        if schema["type"] == "any":
            schema = {"type": "dict", "extra_keys_schema": {"type": "any"}}

        required_keys = schema.get("required_keys", {})
        optional_keys = schema.get("optional_keys", {})

        for key, key_schema in required_keys.items():
            if key not in dct:
                raise ResolutionError(
                    f'Dictionary is missing required key "{key}".', keypath + (key,)
                )
            node.children[key] = make_node(
                dct[key], key_schema, resolution_context, node, keypath + (key,)
            )

        for key, key_schema in optional_keys.items():
            if key in dct:
                value = dct[key]
            elif "default" in key_schema:
                value = key_schema["default"]
            else:
                continue
            node.children[key] = make_node(
                value, key_schema, resolution_context, node, keypath + (key,)
            )

        extra_keys = sorted(dct.keys() - set(required_keys) - set(optional_keys))
        if extra_keys and "extra_keys_schema" not in schema:
            raise ResolutionError(
                f'Dictionary contains unexpected extra key "{extra_keys[0]}".',
                keypath + (extra_keys[0],),
            )

        for key in extra_keys:
            node.children[key] = make_node(
                dct[key],
                schema["extra_keys_schema"],
                resolution_context,
                node,
                keypath + (key,),
            )

        return node

    def resolve(self) -> _types.ConfigurationDict:
        return {key: child.resolve() for key, child in self.children.items()}


# _ListNode ----------------------------------------------------------------------------


class _ListNode(_Node):
    """An internal list node."""

    def __init__(
        self,
        resolution_context: _types.ResolutionContext,
        parent: _ConcreteNode | None = None,
    ):
        super().__init__(resolution_context, parent)
        self.children: list[_ConcreteNode] = []

    @classmethod
    def from_configuration(
        cls,
        lst: _types.ConfigurationList,
        schema: _types.Schema,
        keypath: _types.KeyPath,
        resolution_context: _types.ResolutionContext,
        parent: _ConcreteNode | None = None,
    ) -> _ListNode:
        node = cls(resolution_context, parent=parent)

        if schema["type"] == "any":
            schema = {"type": "list", "element_schema": {"type": "any"}}

        node.children = [
            make_node(
                value,
                schema["element_schema"],
                resolution_context,
                node,
                keypath + (str(i),),
            )
            for i, value in enumerate(lst)
        ]
        return node

    def resolve(self) -> _types.ConfigurationList:
        return [child.resolve() for child in self.children]


# _ValueNode ---------------------------------------------------------------------------


class _ValueNode(_Node):
    """A leaf of the configuration tree.

    Attributes
    ----------
    value : ConfigurationValue
        The raw value as it appeared in the configuration.
    type_ : str
        The value type naming the converter to apply once interpolated.
    keypath : KeyPath
        The keypath to this node in the configuration tree.
    nullable : bool
        Whether ``None`` is accepted as-is.

    """

    # sentinel object denoting that a node is currently being resolved
    _PENDING = object()

    # sentinel object denoting that the resolution of this node has not yet started
    _UNDISCOVERED = object()

    def __init__(
        self,
        value: _types.ConfigurationValue,
        type_: str,
        keypath: _types.KeyPath,
        resolution_context: _types.ResolutionContext,
        nullable: bool = False,
        parent: _ConcreteNode | None = None,
    ):
        super().__init__(resolution_context, parent)
        self.value = value
        self.type_ = type_
        self.keypath = keypath
        self.nullable = nullable
        self._resolved: Any = _ValueNode._UNDISCOVERED

    def resolve(self) -> Any:
        """Resolve the leaf's value by 1) interpolating and 2) converting."""
        if self._resolved is _ValueNode._PENDING:
            raise ResolutionError("Circular reference.", self.keypath)

        if self._resolved is not _ValueNode._UNDISCOVERED:
            return self._resolved

        self._resolved = _ValueNode._PENDING

        try:
            if self.value is None:
                self._resolved = None
                return None

            value: Any = self.value
            if isinstance(value, str):
                value = self._interpolate(value)

            self._resolved = self._convert(value)
        except ResolutionError:
            self._resolved = _ValueNode._UNDISCOVERED
            raise
        except Error as exc:
            self._resolved = _ValueNode._UNDISCOVERED
            raise ResolutionError(str(exc), self.keypath) from exc

        return self._resolved

    def _make_custom_jinja_context(self) -> type[jinja2.runtime.Context]:
        """Create a Jinja2 context class that looks names up lazily.

        Jinja2 reads the top level of the variables passed to ``render()`` eagerly,
        which would resolve every leaf of the configuration up front. The custom
        context looks a name up only when a template uses it: first in the root of the
        configuration tree, then in the global variables, then in Jinja2's builtins.

        """
        root = self.root
        root_container: Any = _wrap(root) if not isinstance(root, _ValueNode) else {}
        global_variables = self.resolution_context.global_variables

        class CustomContext(jinja2.runtime.Context):
            def resolve_or_missing(self, key):
                try:
                    return root_container[key]
                except KeyError, IndexError, TypeError:
                    pass

                try:
                    return global_variables[key]
                except KeyError:
                    pass

                return super().resolve_or_missing(key)

        return CustomContext

    def _interpolate(self, s: str) -> str:
        """Replace ``${...}`` references in the string with their resolved values."""
        environment = jinja2.Environment(
            variable_start_string="${",
            variable_end_string="}",
            undefined=jinja2.StrictUndefined,
        )
        environment.context_class = self._make_custom_jinja_context()

        try:
            return environment.from_string(s).render()
        except jinja2.exceptions.UndefinedError as exc:
            raise ResolutionError(str(exc), self.keypath)
        except jinja2.exceptions.TemplateSyntaxError as exc:
            raise ResolutionError(f"Invalid template: {exc}", self.keypath)

    def _convert(self, value: Any) -> Any:
        try:
            converter = self.resolution_context.converters[self.type_]
        except KeyError:
            raise ResolutionError(
                f'No converter provided for type: "{self.type_}".', self.keypath
            )

        return converter(value)


# make_node() ==========================================================================


def make_node(
    cfg: _types.Configuration,
    schema: _types.Schema,
    resolution_context: _types.ResolutionContext,
    parent: _ConcreteNode | None = None,
    keypath: _types.KeyPath = tuple(),
) -> _ConcreteNode:
    """Recursively constructs a configuration tree from a configuration.

    Parameters
    ----------
    cfg
        A dictionary, list, or non-container type representing the "raw", unresolved
        configuration.
    schema
        A schema dictionary describing the types of the configuration tree nodes.
    resolution_context
        The converters and global variables.
    parent
        The parent node of the node being built. Can be `None`.
    keypath
        The keypath to this node in the configuration tree.

    Raises
    ------
    ResolutionError
        If the configuration does not have the structure the schema describes.

    """
    if cfg is None:
        if schema.get("nullable", False) or schema["type"] == "any":
            return _ValueNode(None, "any", keypath, resolution_context, True, parent)
        raise ResolutionError("Unexpectedly null.", keypath)

    if isinstance(cfg, dict):
        if schema["type"] not in ("dict", "any"):
            raise ResolutionError(
                f'Expected a value of type "{schema["type"]}", got a dictionary.',
                keypath,
            )
        return _DictNode.from_configuration(
            cfg, schema, keypath, resolution_context, parent
        )

    if isinstance(cfg, list):
        if schema["type"] not in ("list", "any"):
            raise ResolutionError(
                f'Expected a value of type "{schema["type"]}", got a list.', keypath
            )
        return _ListNode.from_configuration(
            cfg, schema, keypath, resolution_context, parent
        )

    if schema["type"] in ("dict", "list"):
        raise ResolutionError(
            f'Expected a {schema["type"]}, got a value: {cfg!r}.', keypath
        )

    return _ValueNode(
        cfg,
        schema["type"],
        keypath,
        resolution_context,
        schema.get("nullable", False),
        parent,
    )
