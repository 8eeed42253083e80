"""Helpers for assembling raw configurations from files and overrides."""

from copy import deepcopy
from pathlib import Path
import json
import tomllib

from ..exceptions import ConfigurationError
from . import types as _types


def deep_update(dictionaries: list[dict]) -> dict:
    """Recursively merge a list of dictionaries, left to right.

    Later dictionaries override earlier ones. When both sides of a key are
    dicts the merge recurses; otherwise the later value wins. The input
    dictionaries are not mutated.

    Parameters
    ----------
    dictionaries
        A non-empty list of dictionaries to merge. The first dictionary serves
        as the base; each subsequent dictionary is merged into it in order.

    Returns
    -------
    dict
        A new dictionary containing the deep-merged result.

    Examples
    --------
    Nested dictionaries are merged recursively rather than replaced:

    >>> base = {"rank": {"damping": 0.85, "tol": 1e-10}}
    >>> deep_update([base, {"rank": {"damping": 0.5}}])
    {'rank': {'damping': 0.5, 'tol': 1e-10}}

    """
    first = deepcopy(dictionaries[0])
    for dct in dictionaries[1:]:
        for key, value in dct.items():
            if isinstance(value, dict) and isinstance(first.get(key), dict):
                first[key] = deep_update([first[key], value])
            else:
                first[key] = deepcopy(value)

    return first


def load_config_file(path: str | Path) -> _types.ConfigurationDict:
    """Read a raw configuration from a ``.json`` or ``.toml`` file.

    Raises
    ------
    ConfigurationError
        If the suffix is not recognized, the file does not parse, or its top level is
        not a table/object.
    OSError
        If the file cannot be read.

    """
    path = Path(path)
    suffix = path.suffix.lower()

    if suffix == ".json":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON: {exc}")
    elif suffix == ".toml":
        try:
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid TOML: {exc}")
    else:
        raise ConfigurationError(
            f"{path}: unsupported configuration format '{suffix}'; "
            "expected .json or .toml."
        )

    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a table/object.")

    return data
