"""Error hierarchy for zml.

Every library error derives from ``ZmlError`` and from the closest
builtin exception, so callers can catch either.
"""

from __future__ import annotations


class ZmlError(Exception):
    """Base class for all zml errors."""


class DomainError(ZmlError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class PoleError(DomainError):
    """Evaluation requested at the pole s = 1."""


class ProximityError(DomainError):
    """An ordinate lies within the exclusion radius of a zero."""

    def __init__(self, t: float, gamma: float, radius: float):
        super().__init__(
            f"t = {t!r} is within {radius:.3g} of the zero ordinate {gamma!r}"
        )
        self.t = t
        self.gamma = gamma
        self.radius = radius


class PrecisionError(ZmlError, ArithmeticError):
    """Requested accuracy is unattainable at the configured working precision."""


class CoverageError(ZmlError, LookupError):
    """A zero table does not cover the range an operation needs."""

    def __init__(self, needed: tuple[float, float], covered: tuple[float, float] | None):
        span = "nothing" if covered is None else f"[{covered[0]:g}, {covered[1]:g}]"
        super().__init__(
            f"table covers {span}, operation needs [{needed[0]:g}, {needed[1]:g}]"
        )
        self.needed = needed
        self.covered = covered


class AuditMismatchError(ZmlError):
    """Zero count in a subinterval disagrees with the argument-principle count."""

    def __init__(self, subinterval: tuple[float, float], expected: int, found: int):
        super().__init__(
            f"zero count mismatch on [{subinterval[0]:.6f}, {subinterval[1]:.6f}]: "
            f"expected {expected}, found {found}"
        )
        self.subinterval = subinterval
        self.expected = expected
        self.found = found


class ParseError(ZmlError, ValueError):
    """Malformed line in a zero file."""

    def __init__(self, line: int, text: str):
        super().__init__(f"line {line}: cannot parse {text!r} as an ordinate")
        self.line = line
        self.text = text


class MonotonicityError(ZmlError, ValueError):
    """Ordinates in a zero file are not strictly ascending."""

    def __init__(self, line: int, previous: float, current: float):
        super().__init__(f"line {line}: {current!r} does not exceed {previous!r}")
        self.line = line
        self.previous = previous
        self.current = current


class CapacityError(ZmlError, MemoryError):
    """A size limit (sieve bound, cache size) would be exceeded."""


class RegimeIndexError(ZmlError, IndexError):
    """A range index lies outside 1 <= i <= j <= I."""


class CombinatorialBlowupError(ZmlError):
    """An exact expansion would exceed the term guard."""


class PreconditionError(ZmlError, ValueError):
    """A stated precondition of an operation does not hold."""


class HypothesisViolationError(ZmlError, ValueError):
    """Parameters fall outside the hypothesis of a bound formula."""


class OverflowGuardError(ZmlError, OverflowError):
    """An integrand would overflow binary64."""


class ConfigError(ZmlError, ValueError):
    """Invalid or unknown configuration keys."""


class InvariantViolation(ZmlError, AssertionError):
    """A hard invariant failed during a run."""
