"""Arbitrary precision helpers built on gmpy2's MPFR bindings."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import gmpy2
from gmpy2 import mpfr

from .errors import BracketFailure, InvalidInput, PrecisionExhausted

Real = Union[int, float, str, Fraction, "mpfr"]

# Magnitude above which a trace value is flagged as certified huge.
HUGE = mpfr(2) ** 1000


def working_precision(bits: int):
    """Context manager setting the MPFR significand width."""
    if bits < 2:
        raise InvalidInput(f"precision must be at least 2 bits, got {bits}")
    return gmpy2.context(gmpy2.get_context(), precision=int(bits))


def to_mpfr(x: Real) -> mpfr:
    """Round ``x`` to the current context precision."""
    if isinstance(x, Fraction):
        return mpfr(gmpy2.mpq(x.numerator, x.denominator))
    if isinstance(x, str):
        return mpfr(gmpy2.mpq(Fraction(x).numerator, Fraction(x).denominator))
    return mpfr(x)


def to_hex(x: mpfr) -> str:
    return "{:a}".format(x)


def from_hex(text: str, bits: int) -> mpfr:
    return mpfr(text, bits, 16)


def sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Enclosure:
    """A closed interval ``[lo, hi]`` known to contain some real quantity."""

    lo: mpfr
    hi: mpfr

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty enclosure")

    @classmethod
    def point(cls, x) -> "Enclosure":
        x = mpfr(x)
        return cls(x, x)

    @property
    def bits(self) -> int:
        return max(self.lo.precision, self.hi.precision)

    @property
    def mid(self) -> mpfr:
        with working_precision(self.bits + 1):
            return (self.lo + self.hi) / 2

    @property
    def width(self) -> mpfr:
        with working_precision(self.bits + 1):
            return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def below(self, other: "Enclosure") -> bool:
        """Certified strict inequality: every point here is less than every point there."""
        return self.hi < other.lo

    def overlaps(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def to_json(self) -> list:
        """``[lo_hex, hi_hex, lo_bits, hi_bits]``; the precisions make the round trip exact."""
        return [to_hex(self.lo), to_hex(self.hi), self.lo.precision, self.hi.precision]

    @classmethod
    def from_json(cls, items, bits: Optional[int] = None) -> "Enclosure":
        if len(items) == 4:
            return cls(from_hex(items[0], items[2]), from_hex(items[1], items[3]))
        if bits is None:
            raise ValueError("a bare hex pair needs a precision")
        return cls(from_hex(items[0], bits), from_hex(items[1], bits))

    def __float__(self) -> float:
        return float(self.mid)


def solve_bracketed(
    f: Callable[[mpfr], tuple[mpfr, mpfr]],
    lo: mpfr,
    hi: mpfr,
    target: mpfr,
    max_iter: int = 4000,
) -> Enclosure:
    """Certified enclosure of a simple root of ``f`` in ``[lo, hi]``.

    ``f`` returns the value and the derivative.  Newton steps are taken when
    they stay inside the bracket and shrink it fast enough, otherwise the
    bracket is bisected.  The returned interval has endpoints where ``f`` has
    strictly opposite signs and width at most ``target``.
    """
    flo = f(lo)[0]
    fhi = f(hi)[0]
    slo, shi = sign(flo), sign(fhi)
    if slo == 0 or shi == 0 or slo == shi:
        raise BracketFailure(f"no sign change on [{lo}, {hi}]")
    lo0, hi0 = lo, hi
    outer = target
    target = target / 2
    half = target / 2
    x = (lo + hi) / 2
    step_old = hi - lo
    step = step_old
    fx, dx = f(x)
    for _ in range(max_iter):
        if hi - lo <= target:
            return _robust_ends(f, lo, hi, slo, outer, (lo0, hi0))
        s = sign(fx)
        if s == 0:
            # landed on the root at working precision; probe both sides
            lo, hi = _close_bracket(f, x, half, lo, hi, slo)
            x = (lo + hi) / 2
            fx, dx = f(x)
            continue
        if s == slo:
            lo = x
        else:
            hi = x
        newton_ok = dx != 0 and ((x - hi) * dx - fx) * ((x - lo) * dx - fx) < 0 \
            and abs(2 * fx) <= abs(step_old * dx)
        if newton_ok:
            step_old = step
            step = fx / dx
            x = x - step
            if abs(step) < half:
                lo, hi = _close_bracket(f, x, half, lo, hi, slo)
                x = (lo + hi) / 2
        else:
            step_old = step
            step = (hi - lo) / 2
            x = lo + step
        fx, dx = f(x)
    raise PrecisionExhausted("root bracket did not converge")


def _robust_ends(f, lo, hi, slo, outer, original) -> Enclosure:
    """Move endpoints that sit within rounding noise of the root outward.

    An endpoint may be a Newton iterate so close to the root that the sign
    of ``f`` there is decided by rounding.  Each endpoint is kept only when
    ``|f|`` clears a fraction of ``|f'| * outer``; otherwise it is pushed
    out by a quarter of ``outer``, which keeps the width within ``outer``.
    Endpoints of the original bracket are trusted as given and never crossed.
    """
    step = outer / 4
    ends = []
    for x, s_want, direction in ((lo, slo, -1), (hi, -slo, 1)):
        if x in original:
            ends.append(x)
            continue
        fx, dx = f(x)
        if not abs(fx) * 16 >= abs(dx) * outer:
            x = x + direction * step
            x = max(x, original[0]) if direction < 0 else min(x, original[1])
            fx, dx = f(x)
            if sign(fx) != s_want:
                raise PrecisionExhausted("root enclosure endpoints are not separated from rounding noise")
        ends.append(x)
    return Enclosure(ends[0], ends[1])


def _close_bracket(f, x, half, lo, hi, slo):
    """Try to shrink ``[lo, hi]`` to ``[x - half, x + half]``."""
    left = x - half
    right = x + half
    if lo < left < hi:
        s = sign(f(left)[0])
        if s == slo:
            lo = left
        elif s != 0:
            hi = left
    if lo < right < hi:
        s = sign(f(right)[0])
        if s == slo:
            lo = right
        elif s != 0:
            hi = right
    return lo, hi
