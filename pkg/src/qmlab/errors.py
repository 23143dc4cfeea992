"""Exception taxonomy shared by all qmlab modules."""


class QmLabError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(QmLabError, ZeroDivisionError):
    """Multiplicative inverse of zero, or division by zero."""


class UnsupportedField(QmLabError):
    """The requested operation is undefined over this field."""


class RegimeMismatch(QmLabError):
    """An argument falls outside the restricted regime the operation needs."""


class NoPairExists(QmLabError):
    """No valid scaled pair exists over this field."""


class InvalidDelta(QmLabError):
    """The excluded product index is not a member of the restricted set."""


class DuplicatePoints(QmLabError):
    """Evaluation points for an encoding must be distinct."""


class BudgetExceeded(QmLabError):
    """The search exhausted its node budget before finishing."""


class InvalidScheme(QmLabError):
    """A leakage scheme is structurally unusable for the requested operation."""


class PreconditionViolated(QmLabError):
    """An operation was called outside its documented precondition."""


class UnknownStrategy(QmLabError):
    """The game was asked to run a strategy it does not know."""


class SchemaError(QmLabError):
    """A JSON document does not match the scheme schema."""
