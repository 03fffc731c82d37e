"""
contclust_exceptions.py

Part of the *contclust* package: continuous clustering and facility location
by round-or-cut.

Every error raised on purpose by contclust derives from ContclustException.

"""


class ContclustException(Exception):
    """
    Custom exception that is raised when things go wrong

    """
    pass


class InstanceFormatError(ContclustException):
    """
    An instance, solution or graph file could not be parsed or failed validation.
    ``filename`` and ``line`` are set when known.

    """
    def __init__(self, message, filename=None, line=None):
        self.filename = filename
        self.line = line
        where = ''
        if filename is not None:
            where = f'{filename}'
            if line is not None:
                where = f'{where}:{line}'
            where = f'{where}: '
        super().__init__(f'{where}{message}')


class AllCoincident(ContclustException):
    """Every pair of clients is at distance zero, so there is nothing to rescale."""
    pass


class GridMissingRadius(ContclustException):
    """A radius the LP needs (fairness radius, half-distance, opt_g) is not on a client's grid."""
    pass


class NumericalFailure(ContclustException):
    """The LP backend could certify neither a solution nor infeasibility."""
    pass


class CutLimitExceeded(ContclustException):
    """
    The round-or-cut loop hit its iteration cap. ``record`` is the trace row with status
    cut_limit; ``trace`` is the SearchTrace so far (ending with that row) once a search saw it.

    """
    def __init__(self, message, record=None, trace=None):
        self.record = record
        self.trace = trace
        super().__init__(message)


class InvariantBreach(ContclustException):
    """An internal invariant that should hold for every pool-feasible point failed."""
    pass


class CycleNotPair(InvariantBreach):
    """The nearest-representative graph contains a cycle longer than two."""
    pass


class CertificateFailure(ContclustException):
    """A rounded solution failed its own approximation certificate."""
    pass


class NoRadius(ContclustException):
    """No grid radius reaches the requested ball mass for some client."""
    pass


class NotIndependent(ContclustException):
    """A part handed to the hardness construction contains an edge."""
    pass


class TooLarge(ContclustException):
    """Exhaustive enumeration would exceed the configured budget."""
    pass
