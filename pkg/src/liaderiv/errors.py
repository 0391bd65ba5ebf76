"""Exception types shared across the solver."""


class SolverError(Exception):
    exit_code = 1


class ParseError(SolverError):
    """Malformed SMT-LIB input. ``pos`` is a (line, column) pair when known."""

    exit_code = 2

    def __init__(self, message, pos=None):
        self.pos = pos
        if pos is not None:
            message = f"{pos[0]}:{pos[1]}: {message}"
        super().__init__(message)


class UnsupportedFeature(SolverError):
    exit_code = 3


class ResourceLimit(SolverError):
    exit_code = 4


class Timeout(SolverError):
    exit_code = 5


class UndefinedSubstitution(SolverError):
    """Raised when substituting an infinite value is not defined for some atom."""


class TrackMismatch(SolverError):
    """Two automata over different variable tracks were combined."""


class NotCoprime(SolverError):
    pass
