"""Exception hierarchy.

Two families matter to callers: ``DataError`` (malformed or unusable input)
and ``NumericError`` (a computation that cannot proceed or has left its
domain of validity).  The CLI maps them to exit codes 2 and 3.
"""


class NetoscError(Exception):
    """Base class for all package errors."""


class DataError(NetoscError):
    """Input data is malformed, empty, or out of contract."""


class NumericError(NetoscError):
    """A numeric procedure failed or left its domain of validity."""


# --- data errors -----------------------------------------------------------

class InvalidGraph(DataError):
    """Graph violates its invariants (self-loop, duplicate edge, bad weight)."""


class ParseError(DataError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class EmptyInput(DataError):
    pass


class TooShort(DataError):
    pass


class AllZero(DataError):
    pass


class WindowTooLarge(DataError):
    pass


class BadCutoff(DataError):
    pass


class OutOfRange(DataError):
    pass


class NoOverlap(DataError):
    pass


class ZeroAnchor(DataError):
    pass


class Disconnected(DataError):
    """Graph is not connected (undirected reachability on the nonzero pattern),
    or the zero eigenvalue of its Laplacian is not simple."""


# Alias matching the operation contracts that name this error differently.
DisconnectedGraph = Disconnected


# --- numeric errors --------------------------------------------------------

class NotSymmetrizableError(NumericError):
    """An operation requiring a symmetrizable graph was given one that is not."""


class DefectiveMatrix(NumericError):
    """Eigenvector basis numerically dependent; mode expansion invalid."""

    def __init__(self, message, basis_condition=None):
        super().__init__(message)
        self.basis_condition = basis_condition


class ComplexSpectrum(NumericError):
    """Operation requires a real spectrum but non-real eigenvalues are present."""


class BadBracket(NumericError):
    """Bisection bracket does not satisfy real(lo) / non-real(hi)."""


class NoTransition(NumericError):
    """No real-to-complex transition inside the bracket (hi side is real)."""


class Unstable(NumericError):
    """Numeric trajectory exceeded the divergence cutoff."""

    def __init__(self, message, t_diverge=None):
        super().__init__(message)
        self.t_diverge = t_diverge
