"""Exception hierarchy shared by all modules."""


class CollabNetError(Exception):
    """Base class for library errors."""


class GraphError(CollabNetError, ValueError):
    """Invalid edge operation (self-loop, duplicate add, absent drop)."""


class NotGraphical(CollabNetError, ValueError):
    pass


class CapExceeded(CollabNetError, ValueError):
    pass


class DomainError(CollabNetError, ValueError):
    pass


class UnsupportedModel(CollabNetError, TypeError):
    pass


class InvalidCostFamily(CollabNetError, ValueError):
    pass


class DegreeMismatch(CollabNetError, ValueError):
    pass


class NonConvergence(CollabNetError, RuntimeError):
    """Raised by the iterative solvers; carries the partial trace."""

    def __init__(self, message, trace=None, x=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []
        self.x = x


class InvalidStart(CollabNetError, ValueError):
    pass


class GradientMismatch(CollabNetError, ValueError):
    pass


class OracleFailure(CollabNetError, RuntimeError):
    def __init__(self, message, graph=None):
        super().__init__(message)
        self.graph = graph
