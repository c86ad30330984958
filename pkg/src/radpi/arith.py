"""Arbitrary-precision fixed-point arithmetic and series-based reference values.

A value is a dyadic rational ``mantissa * 2**-scale_bits`` carried as a plain
Python integer, so every operation reduces to exact integer work plus at most
one explicit truncation toward zero (faithful rounding, error <= 1 unit in the
last place). All operands of a binary operation must share the same scale;
rescaling is always explicit.

The module also provides the two reference constants used for error
measurement: pi from an arctangent identity over exact integer series, and
arccos from a reduced arctangent series. Both are independent of the
half-angle recursions they are used to check.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, PrecisionError, UsageError

# log10(2) ~= 30103/100000 (4.3e-9 high; exact enough for digit counts at any
# scale this package reaches).
_LOG10_2_NUM = 30103
_LOG10_2_DEN = 100000

_DECIMAL_RE = re.compile(r"^([+-]?)(\d+)(?:\.(\d*))?$")


def decimal_digits_for_bits(bits: int) -> int:
    """Number of trustworthy fraction digits at a binary scale."""
    return (bits * _LOG10_2_NUM) // _LOG10_2_DEN - 2


def _tdiv(a: int, b: int) -> int:
    """Integer division truncated toward zero (Python's ``//`` floors)."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def isqrt(n: int) -> int:
    """Floor square root of a non-negative integer by Newton iteration.

    The initial guess ``2**ceil(bit_length/2)`` is >= sqrt(n), so the iterates
    decrease monotonically; the first non-decrease is exactly floor(sqrt(n)).
    """
    if n < 0:
        raise DomainError("isqrt of negative integer")
    if n == 0:
        return 0
    x = 1 << ((n.bit_length() + 1) // 2)
    while True:
        y = (x + n // x) // 2
        if y >= x:
            return x
        x = y


@dataclass(frozen=True, slots=True)
class FixedReal:
    """Signed fixed-point real: value = mantissa * 2**-scale_bits."""

    mantissa: int
    scale_bits: int

    def __post_init__(self) -> None:
        if self.scale_bits < 0:
            raise UsageError("scale_bits must be non-negative")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_int(cls, n: int, scale_bits: int) -> "FixedReal":
        return cls(n << scale_bits if n >= 0 else -((-n) << scale_bits), scale_bits)

    @classmethod
    def from_fraction(cls, fr: Fraction, scale_bits: int) -> "FixedReal":
        fr = Fraction(fr)
        return cls(_tdiv(fr.numerator << scale_bits, fr.denominator), scale_bits)

    @classmethod
    def from_decimal(cls, text: str, scale_bits: int) -> "FixedReal":
        """Parse ``[+-]digits[.digits]``; no exponent form. Truncates toward zero."""
        m = _DECIMAL_RE.match(text.strip())
        if not m:
            raise UsageError(f"malformed decimal literal: {text!r}")
        sign, int_part, frac_part = m.group(1), m.group(2), m.group(3) or ""
        num = int(int_part + frac_part) if int_part + frac_part else 0
        mant = _tdiv(num << scale_bits, 10 ** len(frac_part))
        return cls(-mant if sign == "-" else mant, scale_bits)

    @classmethod
    def zero(cls, scale_bits: int) -> "FixedReal":
        return cls(0, scale_bits)

    @classmethod
    def one(cls, scale_bits: int) -> "FixedReal":
        return cls(1 << scale_bits, scale_bits)

    # -- conversions -------------------------------------------------------

    def rescale(self, scale_bits: int) -> "FixedReal":
        """Move to another scale: exact when widening, truncating when narrowing."""
        diff = scale_bits - self.scale_bits
        if diff == 0:
            return self
        if diff > 0:
            m = self.mantissa << diff if self.mantissa >= 0 else -((-self.mantissa) << diff)
            return FixedReal(m, scale_bits)
        return FixedReal(_tdiv(self.mantissa, 1 << -diff), scale_bits)

    def to_decimal(self, digits: int) -> str:
        """Plain decimal string with ``digits`` fraction digits, truncated toward zero."""
        if digits < 0:
            raise UsageError("digits must be non-negative")
        a = abs(self.mantissa)
        scaled = (a * 10**digits) >> self.scale_bits
        ip, fp = divmod(scaled, 10**digits)
        body = f"{ip}.{fp:0{digits}d}" if digits else str(ip)
        return "-" + body if self.mantissa < 0 else body

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.scale_bits)

    def __float__(self) -> float:  # diagnostics only; never used in core paths
        return self.mantissa / (1 << self.scale_bits)

    # -- arithmetic (same-scale operands; rescaling is explicit) -----------

    def _coscale(self, other: "FixedReal") -> None:
        if not isinstance(other, FixedReal):
            raise UsageError(f"expected FixedReal, got {type(other).__name__}")
        if other.scale_bits != self.scale_bits:
            raise UsageError(
                f"scale mismatch: {self.scale_bits} vs {other.scale_bits} bits"
            )

    def __add__(self, other: "FixedReal") -> "FixedReal":
        self._coscale(other)
        return FixedReal(self.mantissa + other.mantissa, self.scale_bits)

    def __sub__(self, other: "FixedReal") -> "FixedReal":
        self._coscale(other)
        return FixedReal(self.mantissa - other.mantissa, self.scale_bits)

    def __neg__(self) -> "FixedReal":
        return FixedReal(-self.mantissa, self.scale_bits)

    def __abs__(self) -> "FixedReal":
        return FixedReal(abs(self.mantissa), self.scale_bits)

    def __mul__(self, other):
        if isinstance(other, int):
            return FixedReal(self.mantissa * other, self.scale_bits)
        self._coscale(other)
        return FixedReal(
            _tdiv(self.mantissa * other.mantissa, 1 << self.scale_bits),
            self.scale_bits,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            if other == 0:
                raise DomainError("division by zero")
            return FixedReal(_tdiv(self.mantissa, other), self.scale_bits)
        self._coscale(other)
        if other.mantissa == 0:
            raise DomainError("division by zero")
        return FixedReal(
            _tdiv(self.mantissa << self.scale_bits, other.mantissa), self.scale_bits
        )

    def mul_fraction(self, fr: Fraction) -> "FixedReal":
        """Multiply by an exact rational with a single truncation."""
        fr = Fraction(fr)
        return FixedReal(_tdiv(self.mantissa * fr.numerator, fr.denominator), self.scale_bits)

    def times_pow2(self, n: int) -> "FixedReal":
        """Multiply by 2**n (exact for n >= 0, truncating for n < 0)."""
        if n >= 0:
            m = self.mantissa << n if self.mantissa >= 0 else -((-self.mantissa) << n)
            return FixedReal(m, self.scale_bits)
        return FixedReal(_tdiv(self.mantissa, 1 << -n), self.scale_bits)

    def sqrt(self) -> "FixedReal":
        """Floor square root at the same scale: isqrt(mantissa << scale_bits)."""
        if self.mantissa < 0:
            raise DomainError("square root of negative value")
        return FixedReal(isqrt(self.mantissa << self.scale_bits), self.scale_bits)

    # -- comparisons -------------------------------------------------------

    def __lt__(self, other: "FixedReal") -> bool:
        self._coscale(other)
        return self.mantissa < other.mantissa

    def __le__(self, other: "FixedReal") -> bool:
        self._coscale(other)
        return self.mantissa <= other.mantissa

    def __gt__(self, other: "FixedReal") -> bool:
        self._coscale(other)
        return self.mantissa > other.mantissa

    def __ge__(self, other: "FixedReal") -> bool:
        self._coscale(other)
        return self.mantissa >= other.mantissa

    @property
    def is_negative(self) -> bool:
        return self.mantissa < 0

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def __repr__(self) -> str:
        shown = min(self.scale_bits, 12)
        return f"FixedReal({self.to_decimal(decimal_digits_for_bits(max(shown * 4, 16)))}@{self.scale_bits}b)"


def fixed_sqrt(x: FixedReal) -> FixedReal:
    """Module-level alias for :meth:`FixedReal.sqrt`."""
    return x.sqrt()


@dataclass(frozen=True, slots=True)
class PrecisionContext:
    """Working precision: output scale plus guard bits for internal slack.

    ``guard_bits=None`` lets each driver size the guard for its own recursion
    depth by the rule ``2*depth + 64`` (the final 2**k scaling amplifies
    absolute error by 2**k and radicand cancellation can cost another k bits).
    An explicit guard is honored as a hard budget instead.
    """

    scale_bits: int
    guard_bits: int | None = None

    def __post_init__(self) -> None:
        if self.scale_bits < 64:
            raise UsageError("scale_bits must be >= 64")
        if self.guard_bits is not None and self.guard_bits < 32:
            raise UsageError("guard_bits must be >= 32")

    @classmethod
    def for_depth(cls, scale_bits: int, depth: int) -> "PrecisionContext":
        return cls(scale_bits, 2 * depth + 64)

    def guard_for_depth(self, depth: int) -> int:
        """Guard bits to use for ``depth`` halvings; explicit guards are budgets."""
        if self.guard_bits is None:
            return 2 * depth + 64
        if depth > (self.guard_bits - 64) // 2:
            raise PrecisionError(
                f"depth {depth} exceeds precision budget "
                f"(guard_bits={self.guard_bits} allows {(self.guard_bits - 64) // 2})"
            )
        return self.guard_bits

    @property
    def working_bits(self) -> int:
        return self.scale_bits + (self.guard_bits if self.guard_bits is not None else 64)

    @property
    def oracle_digits(self) -> int:
        return decimal_digits_for_bits(self.scale_bits)


# -- reference constants ----------------------------------------------------


def _arctan_recip_mantissa(x: int, one: int) -> int:
    """arctan(1/x) * one for integer x >= 2, by the alternating power series.

    Each floor division is <= 1 off and the per-term error is bounded by a
    constant, so the total error stays orders of magnitude under the 24 extra
    bits the callers carry.
    """
    power = one // x
    total = power
    xsq = x * x
    n = 1
    while power:
        power //= xsq
        term = power // (2 * n + 1)
        total += -term if n & 1 else term
        n += 1
    return total


@lru_cache(maxsize=None)
def _pi_mantissa(bits: int) -> int:
    """pi * 2**bits via 16*arctan(1/5) - 4*arctan(1/239) on exact integers."""
    work = bits + 24
    one = 1 << work
    total = 16 * _arctan_recip_mantissa(5, one) - 4 * _arctan_recip_mantissa(239, one)
    return total >> 24


def pi_oracle(ctx: PrecisionContext) -> FixedReal:
    """pi at the context's output scale, within 2**(-scale_bits + 4)."""
    return FixedReal(_pi_mantissa(ctx.scale_bits), ctx.scale_bits)


def pi_fixed(scale_bits: int) -> FixedReal:
    """pi at an arbitrary scale (internal helper for working precisions)."""
    return FixedReal(_pi_mantissa(scale_bits), scale_bits)


def _arctan_fixed(t: FixedReal) -> FixedReal:
    """arctan(t) at t's scale via argument halving plus the power series.

    Repeated t <- t / (1 + sqrt(1 + t^2)) halves the argument; once |t| is
    below 2**-8 the alternating series gains 16 bits per term.
    """
    bits = t.scale_bits
    one = FixedReal.one(bits)
    small = FixedReal(1 << (bits - 8), bits)
    halvings = 0
    while abs(t) > small:
        t = t / (one + (one + t * t).sqrt())
        halvings += 1
    tt = t * t
    term = t
    total = t
    n = 1
    while term.mantissa != 0:
        term = term * tt
        contrib = term / (2 * n + 1)
        total = total - contrib if n & 1 else total + contrib
        n += 1
    return total.times_pow2(halvings)


def arccos_oracle(x: FixedReal, ctx: PrecisionContext) -> FixedReal:
    """arccos(x) within 2**(-scale_bits + 8), for -1 <= x <= 1.

    Uses arctan on sqrt(1-x^2)/x with quadrant handling; the small-|x| branch
    goes through arcsin to keep the arctan argument bounded.
    """
    out_bits = ctx.scale_bits
    one_in = 1 << x.scale_bits
    if abs(x.mantissa) > one_in:
        raise DomainError("arccos argument outside [-1, 1]")
    if x.mantissa == one_in:
        return FixedReal.zero(out_bits)
    if x.mantissa == -one_in:
        return pi_fixed(out_bits)

    work = max(out_bits, x.scale_bits) + 64
    xw = x.rescale(work)
    one = FixedReal.one(work)
    half_pi = pi_fixed(work) / 2
    if abs(xw.mantissa) * 2 <= one.mantissa:
        # arccos(x) = pi/2 - arctan(x / sqrt(1 - x^2)); argument stays <= 0.578
        res = half_pi - _arctan_fixed(xw / (one - xw * xw).sqrt())
    else:
        ax = abs(xw)
        a = _arctan_fixed((one - ax * ax).sqrt() / ax)
        res = a if xw.mantissa > 0 else pi_fixed(work) - a
    return res.rescale(out_bits)
