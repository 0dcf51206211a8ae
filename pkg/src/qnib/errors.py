"""Exception hierarchy shared by all qnib modules."""


class QnibError(Exception):
    pass


class DomainError(QnibError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class DimensionOverflowError(DomainError):
    pass


class SpecValidationError(QnibError, ValueError):
    """A state specification violates its family's normalization constraints."""


class NotCPError(QnibError, ValueError):
    """A channel fails complete positivity; ``witness`` names the violated condition."""

    def __init__(self, witness):
        super().__init__(f"channel is not completely positive: {witness}")
        self.witness = witness


class UnsupportedInputError(QnibError, ValueError):
    pass


class ConfigError(QnibError, ValueError):
    pass


class ConsistencyError(QnibError, ArithmeticError):
    """A closed-form result disagrees with its numeric counterpart."""
