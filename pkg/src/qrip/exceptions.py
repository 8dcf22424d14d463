"""Exception hierarchy shared across the toolkit."""


class QripError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(QripError, ValueError):
    """Operand shapes are incompatible."""


class ParameterError(QripError, ValueError):
    """A numeric parameter lies outside its admissible range."""


class ContractError(QripError, ValueError):
    """An input violates a structural precondition (e.g. not Hermitian)."""


class CapExceededError(QripError, RuntimeError):
    """Support enumeration would exceed the configured cap."""


class ConfigError(QripError, ValueError):
    """Invalid experiment configuration.

    Parameters
    ----------
    field : str
        Name of the offending configuration field.
    message : str
        Human readable explanation.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class VerificationError(QripError, RuntimeError):
    """A deterministic verification check failed; this signals a bug."""


class DomainError(QripError, ValueError):
    """Argument outside the mathematical domain (e.g. a zero vector)."""
