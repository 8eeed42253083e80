"""Exceptions raised by riskrank."""

# exceptions ===========================================================================


class Error(Exception):
    """A general error."""


# input --------------------------------------------------------------------------------


class ParseError(Error):
    """A mobility, metadata or case-count file could not be parsed."""

    def __init__(self, reason: str, line: int | None = None, source: str | None = None):
        self.reason = reason
        self.line = line
        self.source = source

    def __str__(self) -> str:
        where = self.source if self.source is not None else "<input>"
        if self.line is not None:
            where = f"{where}, line {self.line}"
        return f"{where}: {self.reason}"


class InvalidParameterError(Error):
    """A parameter is outside of its allowed range."""

    def __init__(self, reason: str, parameter: str):
        self.reason = reason
        self.parameter = parameter

    def __str__(self) -> str:
        return f'Invalid value for "{self.parameter}": {self.reason}'


# graph and ranking --------------------------------------------------------------------


class GraphError(Error):
    """The people-location network cannot be built or queried."""


class UnknownNodeError(GraphError):
    """A node is not part of the graph."""

    def __init__(self, node: object):
        self.node = node

    def __str__(self) -> str:
        return f"Unknown node: {self.node}"


class MissingSourceError(Error):
    """Personalized PageRank was requested without a usable source node."""


# simulation ---------------------------------------------------------------------------


class SimulationError(Error):
    """The transmission simulation cannot be run."""


# strategies ---------------------------------------------------------------------------


class StrategyError(Error):
    """A strategy's prerequisites are not satisfied by its context."""

    def __init__(self, strategy: str, missing: str):
        self.strategy = strategy
        self.missing = missing

    def __str__(self) -> str:
        return f'Strategy "{self.strategy}" requires {self.missing}.'


# evaluation ---------------------------------------------------------------------------


class EvaluationError(Error):
    """A metric is undefined for its inputs."""


class EmptyInfectedSetError(EvaluationError):
    """Recall is undefined because nobody was infected."""

    def __str__(self) -> str:
        return "Recall is undefined: the infected set is empty."


class InsufficientDataError(EvaluationError):
    """Too few observations for a rank correlation."""


class ZeroVarianceError(EvaluationError):
    """All ranks of a variable are equal, so no correlation can be computed."""


class NoCasesError(EvaluationError):
    """Accuracy is undefined because there are no cases."""


# configuration ------------------------------------------------------------------------


class ConfigurationError(Error):
    """An experiment configuration is invalid."""


class InvalidSchemaError(ConfigurationError):
    """An error while validating a configuration schema."""

    def __init__(self, reason: str, keypath: tuple[str, ...]):
        self.reason = reason
        self.keypath = keypath

    def __str__(self) -> str:
        dotted = _join_dotted(self.keypath)
        return f'Invalid schema at keypath: "{dotted}". {self.reason}'


class ResolutionError(ConfigurationError):
    """An error while resolving a configuration."""

    def __init__(self, reason: str, keypath: tuple[str, ...]):
        self.reason = reason
        self.keypath = keypath

    def __str__(self) -> str:
        dotted = _join_dotted(self.keypath)
        return f'Cannot resolve keypath "{dotted}": {self.reason}'


class ConversionError(ConfigurationError):
    """Could not convert the configuration value."""


# helpers ==============================================================================


def _join_dotted(keypath: tuple[str, ...]) -> str:
    """Joins a keypath into a dotted string."""
    return ".".join(str(x) for x in keypath)
