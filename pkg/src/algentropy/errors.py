"""Exception hierarchy shared by all subpackages."""


class AlgEntropyError(Exception):
    """Base class for every error raised by this package."""


class RingMismatch(AlgEntropyError, ValueError):
    pass


class NonDivisible(AlgEntropyError, ArithmeticError):
    """Raised by exact division when the remainder is nonzero."""


class PolySyntaxError(AlgEntropyError, ValueError):
    """Parse failure carrying a 1-based line/column position."""

    def __init__(self, message, line=1, column=1, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = f"line {line}, column {column}"
        if source:
            where = f"{source}: {where}"
        super().__init__(f"{where}: {message}")


class NonHomogeneous(AlgEntropyError, ValueError):
    def __init__(self, message, coordinate=None):
        self.coordinate = coordinate
        super().__init__(message)


class DegreeMismatch(NonHomogeneous):
    """Coordinates are individually homogeneous but of different degrees."""


class MapValidationError(AlgEntropyError, ValueError):
    pass


class AllCoordinatesZero(AlgEntropyError, ArithmeticError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"all coordinates vanish at iterate {index}")


class BudgetExceeded(AlgEntropyError, RuntimeError):
    """A time/term budget ran out; ``partial`` holds whatever was computed."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class TrialsDisagree(AlgEntropyError, RuntimeError):
    def __init__(self, sequences, agreed):
        self.sequences = sequences
        self.agreed = agreed
        first = len(agreed)
        vals = [s[first] if first < len(s) else None for s in sequences]
        super().__init__(f"trials disagree at n={first}: {vals}")


class InverseMissing(AlgEntropyError, ValueError):
    pass


class SingularMatrix(AlgEntropyError, ValueError):
    pass


class InsufficientData(AlgEntropyError, ValueError):
    pass


class NoRootInRange(AlgEntropyError, ValueError):
    pass


class VerificationFailed(AlgEntropyError, RuntimeError):
    pass


class SpanExceedsData(AlgEntropyError, ValueError):
    pass


class UnbalancedRelation(AlgEntropyError, ValueError):
    pass


class InsufficientDepth(AlgEntropyError, ValueError):
    pass


class NetworkUnavailable(AlgEntropyError, ConnectionError):
    pass


class RateLimited(AlgEntropyError, ConnectionError):
    pass
