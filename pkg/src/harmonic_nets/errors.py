"""Exception hierarchy shared by all modules."""


class HarmonicNetError(Exception):
    """Base class for every error raised by this package."""


class InvalidPointError(HarmonicNetError, ValueError):
    """A point does not belong to the space it is used with."""


class DomainError(HarmonicNetError, ValueError):
    """An argument lies outside the domain of an operation."""


class AmbiguityError(HarmonicNetError):
    """A midpoint, geodesic or center of gravity is not unique.

    ``vertex``, ``edge`` and ``sweep`` are filled in by callers that know
    where the ambiguity arose; ``report`` carries the partial relaxation
    report when raised from the solver.
    """

    def __init__(self, message, *, vertex=None, edge=None, sweep=None, report=None):
        super().__init__(message)
        self.vertex = vertex
        self.edge = edge
        self.sweep = sweep
        self.report = report


class ConvergenceError(HarmonicNetError):
    """An inner iteration hit its cap before reaching tolerance."""

    def __init__(self, message, *, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class UnsupportedCapabilityError(HarmonicNetError, NotImplementedError):
    """The space does not provide the requested operation."""


class GraphError(HarmonicNetError, ValueError):
    """A graph violates one of its structural invariants."""

    def __init__(self, message, problems=()):
        super().__init__(message)
        self.problems = list(problems)
