class HyperlatError(Exception):
    """Base class for all library errors."""


class InputError(HyperlatError, ValueError):
    """Malformed input: unknown identifiers, wrong kinds, bad shapes."""


class PreconditionError(HyperlatError):
    """An operation's precondition failed; ``witness`` says where."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DomainError(HyperlatError, ValueError):
    """Argument outside the mathematical domain of the operation."""
