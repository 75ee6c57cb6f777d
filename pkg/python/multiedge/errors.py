"""Exceptions raised by multiedge.

Every exception carries the exit status the command line reports for it.
"""


class MultiEdgeError(ValueError):
    exit_status = 2


class ParseError(MultiEdgeError):
    exit_status = 1

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        if line is not None:
            message = f"Line {line}: {message}"
        if source is not None:
            message = f"{source}: {message}"
        super().__init__(message)


class GraphInvariantError(ParseError):
    pass


class NegativeWeightError(ParseError):
    pass


class EmptyGraphError(MultiEdgeError):
    exit_status = 1


class DimensionError(MultiEdgeError):
    pass


class UnknownEdgeTypeError(MultiEdgeError):
    pass


class UnknownNodeError(MultiEdgeError):
    pass


class UnknownClusterError(MultiEdgeError):
    pass


class NodeMismatchError(MultiEdgeError):
    pass


class NegativeCompositeError(MultiEdgeError):
    pass


class ZeroWeightTypeError(MultiEdgeError):
    pass


class InfeasibleSpecError(MultiEdgeError):
    pass


class ConfigError(MultiEdgeError):
    pass


class LimitExceededError(MultiEdgeError):
    exit_status = 4


class OptimizerError(MultiEdgeError):
    exit_status = 4
