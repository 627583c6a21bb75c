"""Exception hierarchy shared by every module."""


class BeliefError(Exception):
    pass


class DomainError(BeliefError, ValueError):
    """A value, space or argument lies outside what an operation accepts."""


class EmptyMultiset(DomainError):
    pass


class ZeroValidity(BeliefError, ArithmeticError):
    """Conditioning on evidence that has probability zero."""


class InfiniteDivergence(BeliefError, ArithmeticError):
    pass


class ZeroAccepted(BeliefError):
    """A rejection sampler finished without accepting a single trace."""

    def __init__(self, attempts: int, message: str | None = None):
        self.attempts = attempts
        super().__init__(message or f"no trace accepted after {attempts} attempts")


class ResourceLimit(BeliefError):
    """An enumeration would exceed the configured size cap."""

    def __init__(self, what: str, size: int, cap: int):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(
            f"{what} has {size} elements, above the enumeration cap {cap} "
            "(raise it with BELIEF_ENUM_CAP)"
        )


class ModelValidationError(BeliefError, ValueError):
    """A model file violates its schema; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
