"""Exception types shared across the package."""


class AbfracError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(AbfracError):
    """An argument lies outside the mathematical domain of an operation."""


class GridError(AbfracError):
    """A sampled-function grid is malformed or too coarse."""


class NonConvergence(AbfracError):
    """A series or quadrature failed to reach the requested tolerance."""


class NoConvergence(AbfracError):
    """A fixed-point iteration exhausted its iteration budget."""


class SingularParameter(AbfracError):
    """Problem coefficients sit at (or too close to) the excluded singular point."""


class PoleError(AbfracError):
    """A transform-domain denominator is too close to zero."""


class TailError(AbfracError):
    """A truncated Laplace transform cannot be trusted (s*T too small)."""


class RangeError(AbfracError):
    """Requested parameters would drive the solution beyond double-precision range."""


class DimensionMismatch(AbfracError):
    """Arrays that must share a grid do not."""


class ExprSyntaxError(AbfracError):
    """Malformed expression source.

    Carries the byte offset of the offending token and the set of token
    kinds that would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset
        self.expected = frozenset(expected)


class UnknownIdentifier(ExprSyntaxError):
    """An identifier that is neither a variable, a constant nor a function."""

    def __init__(self, name, offset):
        super().__init__(f"unknown identifier '{name}'", offset, expected=("identifier",))
        self.name = name


class EvalError(AbfracError):
    """Expression evaluation produced a non-finite or undefined value."""
