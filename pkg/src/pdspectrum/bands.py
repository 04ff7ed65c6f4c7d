"""Bands of the periodic approximants and their zeros.

The band ``B_sigma`` at level ``n`` is the closed interval where
``|h_n| <= 2`` around the zero ``z_sigma`` of ``h_n``.  Zeros of level ``n``
interlace the zeros of all lower levels, so each level is computed from the
ordered list of lower zeros: one zero per slot, then one point of ``|h_n| > 2``
inside every gap between consecutive zeros, then the band edges by root
finding between the zeros and those gap points.
"""

from __future__ import annotations

import bisect
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2
from gmpy2 import mpfr

from . import codes as C
from .errors import BracketFailure, InvalidInput, PrecisionExhausted
from .numeric import Enclosure, sign, solve_bracketed, to_mpfr, working_precision
from .report import Report
from .traces import ModelParams, trace_and_derivative, trace_sequence

FORMAT_VERSION = 2
# Enclosures are tightened until they are this many binary orders below the band width.
SEPARATION_BITS = 24


def target_width(n: int, bits: int = 0) -> mpfr:
    """Default enclosure width at level ``n``, never coarser than half the precision."""
    return mpfr(2) ** (-max(2 * n + 20, bits // 2))


@dataclass
class Band:
    code: str
    a: Enclosure
    z: Enclosure
    b: Enclosure
    bits: int

    @property
    def level(self) -> int:
        return len(self.code)

    @property
    def a_owner(self) -> Optional[str]:
        return C.endpoint_owner(self.code, "left")

    @property
    def b_owner(self) -> Optional[str]:
        return C.endpoint_owner(self.code, "right")

    @property
    def hull(self) -> Enclosure:
        return Enclosure(self.a.lo, self.b.hi)

    @property
    def length(self) -> mpfr:
        return self.b.mid - self.a.mid

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "bits": self.bits,
            "a": self.a.to_json(),
            "z": self.z.to_json(),
            "b": self.b.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "Band":
        bits = d["bits"]
        return cls(
            d["code"],
            Enclosure.from_json(d["a"], bits),
            Enclosure.from_json(d["z"], bits),
            Enclosure.from_json(d["b"], bits),
            bits,
        )


@dataclass(frozen=True)
class Span:
    """A closed interval given by endpoint enclosures, e.g. ``[a_sigma, z_sigma]``."""

    a: Enclosure
    b: Enclosure


# -- certified interval relations ---------------------------------------------


def strictly_left(i, j) -> bool:
    """``I < J``: the right end of ``I`` is below the left end of ``J``."""
    return i.b.hi < j.a.lo


def weakly_left(i, j) -> bool:
    """``I`` precedes ``J``: both endpoints are strictly smaller."""
    return i.a.hi < j.a.lo and i.b.hi < j.b.lo


def contained(i, j) -> bool:
    """``I`` inside ``J`` up to enclosure width (shared endpoints allowed)."""
    return i.a.hi >= j.a.lo and i.b.lo <= j.b.hi


def inside_interior(i, j) -> bool:
    return j.a.hi < i.a.lo and i.b.hi < j.b.lo


def same_point(x: Enclosure, y: Enclosure) -> bool:
    return x.overlaps(y)


# -- level tables ---------------------------------------------------------------


class LevelTable:
    """All bands of one level plus the ordered zeros of every level up to it."""

    def __init__(self, level: int, lam: Fraction, bands: list, zeros: list):
        self.level = level
        self.lam = Fraction(lam)
        self.bands = bands
        self.zeros = zeros
        self._zero_map = None

    def band(self, code: str) -> Band:
        if len(code) != self.level:
            raise InvalidInput(f"code {code!r} is not of level {self.level}")
        return self.bands[C.rank(code)]

    def zero(self, code: str) -> Enclosure:
        if self._zero_map is None:
            self._zero_map = {c: e for c, e in self.zeros}
        return self._zero_map[code]

    @property
    def lam_text(self) -> str:
        return ModelParams(self.lam).lam_text

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "kind": "level-table",
            "lambda": self.lam_text,
            "level": self.level,
            "bands": [b.to_json() for b in self.bands],
            "zeros": [[c, e.to_json()] for c, e in self.zeros],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, d: dict) -> "LevelTable":
        if d.get("format") != FORMAT_VERSION or d.get("kind") != "level-table":
            raise InvalidInput("unsupported level table format")
        bands = [Band.from_json(b) for b in d["bands"]]
        bits = max(b.bits for b in bands)
        zeros = [(c, Enclosure.from_json(e, bits)) for c, e in d["zeros"]]
        return cls(d["level"], Fraction(d["lambda"]), bands, zeros)


# -- root finding kernels ----------------------------------------------------------


def _trace_fn(lam, n, shift=0):
    def f(x):
        h, d = trace_and_derivative(x, lam, n)
        return h - shift, d
    return f


def _outer_point(n: int, lam, side: int):
    """A point beyond every zero of ``h_n`` on ``side`` (bracket from ``lam + 3``, doubling)."""
    x = (lam + 3) * side
    for _ in range(200):
        h, _ = trace_and_derivative(x, lam, n)
        if abs(h) > 2:
            return x
        x *= 2
    raise BracketFailure("outer bracket not found")


def _zero_once(n, lam, left, right, target):
    lo = left.mid if left is not None else _outer_point(n, lam, -1)
    hi = right.mid if right is not None else _outer_point(n, lam, 1)
    return solve_bracketed(_trace_fn(lam, n), lo, hi, target)


def log2_abs(x) -> float:
    """``log2 |x|`` for any finite nonzero mpfr, without float overflow."""
    e, m = gmpy2.frexp(mpfr(x))
    return math.log2(abs(float(m))) + e


def bits_for_width(width, lam_q: Fraction) -> int:
    """Working precision resolving points ``width`` apart near the spectrum."""
    mag = max(1, math.ceil(math.log2(float(lam_q) + 3)))
    return int(math.ceil(-log2_abs(width))) + mag + 48


def _tighten_target(d) -> mpfr:
    """Width far below the band width ``~4/|h_n'|`` implied by a derivative."""
    return mpfr(2) ** math.floor(2 - log2_abs(d) - SEPARATION_BITS)


def solve_zero(n: int, lam_q: Fraction, left, right, bits: int, auto: bool):
    """Zero of ``h_n`` between two lower zeros (``None`` means unbounded side).

    Returns ``(enclosure, bits, target)``.  The target starts at the default
    width for the level and is tightened when the derivative at the zero says
    the band is narrower than that width allows.
    """
    target = target_width(n, bits)
    if auto:
        for bound in (left, right):
            if bound is not None:
                bits = max(bits, bound.bits)
    for _ in range(64):
        with working_precision(bits):
            lam = to_mpfr(lam_q)
            z = _zero_once(n, lam, left, right, target)
            _, d = trace_and_derivative(z.mid, lam, n)
            if d == 0 or not gmpy2.is_finite(d):
                raise PrecisionExhausted("derivative at a zero is not usable")
            need = _tighten_target(d)
        if target <= need:
            return z, bits, target
        target = need
        if auto:
            bits = max(bits, bits_for_width(target, lam_q))
        elif bits_for_width(target, lam_q) > bits + 16:
            raise PrecisionExhausted(f"{bits} bits cannot resolve a band at level {n}")
    raise PrecisionExhausted("zero enclosure did not settle")


def fit_zero(code: str, enc: Enclosure, n: int, lam_q: Fraction, bits: int, auto: bool):
    """Shrink the enclosure of ``z_code`` until ``h_n`` is near its value there.

    At a zero of level ``m < n`` the trace ``h_n`` equals ``-2`` when
    ``m = n - 1`` and ``2`` otherwise.  Slot bounds must sit close enough to
    that value for the sign of ``h_n`` to be right.  Returns the enclosure
    and the precision used.
    """
    m = len(code)
    want = -2 if m == n - 1 else 2
    for _ in range(64):
        if auto:
            bits = max(bits, bits_for_width(enc.width, lam_q))
        with working_precision(bits):
            lam = to_mpfr(lam_q)
            worst = mpfr(0)
            good = True
            for x in (enc.lo, enc.hi):
                h, d = trace_and_derivative(mpfr(x), lam, n)
                if not abs(h - want) <= mpfr(1) / 4:
                    good = False
                if gmpy2.is_finite(d):
                    worst = max(worst, abs(d))
                else:
                    worst = gmpy2.inf()
            if good:
                return enc, bits
            if gmpy2.is_finite(worst) and worst > 0:
                target = min(enc.width / 4, _tighten_target(worst))
            else:
                target = enc.width / 2**32
        if auto:
            bits = max(bits, bits_for_width(target, lam_q))
        elif bits_for_width(target, lam_q) > bits + 16:
            raise PrecisionExhausted(f"{bits} bits cannot place z_{code} for level {n}")
        enc, bits = _resolve_near(m, lam_q, enc, target, bits, auto)
    raise PrecisionExhausted(f"z_{code} could not be fitted for level {n}")


def _resolve_near(m, lam_q, enc: Enclosure, target, bits: int, auto: bool):
    """Re-solve the zero of ``h_m`` inside ``enc`` at ``bits``.

    ``enc`` was certified at a lower precision; when the extra bits flip an
    endpoint sign the bracket is widened geometrically (zeros of ``h_m`` are
    far apart compared with the width) and precision is raised once more.
    """
    for attempt in range(2 if auto else 1):
        with working_precision(bits):
            f = _trace_fn(to_mpfr(lam_q), m)
            lo, hi = mpfr(enc.lo), mpfr(enc.hi)
            w = hi - lo
            for _ in range(24):
                try:
                    return solve_bracketed(f, lo, hi, target), bits
                except BracketFailure:
                    lo, hi = lo - w, hi + w
                    w *= 4
        bits += 64
    raise BracketFailure(f"zero of h_{m} lost near [{enc.lo}, {enc.hi}]")


def _gap_point(n, lam, zl: Enclosure, zr: Enclosure, left_increasing: bool, max_iter: int):
    """A point with ``|h_n| > 2`` strictly between two consecutive zeros of ``h_n``."""
    lo, hi = zl.hi, zr.lo
    s = 1 if left_increasing else -1
    for _ in range(max_iter):
        x = (lo + hi) / 2
        h, d = trace_and_derivative(x, lam, n)
        if abs(h) > 2:
            return x, h
        sd = sign(d)
        if sd == s:
            lo = x
        elif sd == -s:
            hi = x
        else:
            break
    raise PrecisionExhausted(f"gap between zeros not resolved at level {n}")


def solve_gap(n, lam_q, left, right, left_increasing, bits, targets):
    """Edges facing a gap: ``b`` of the band on the left and ``a`` of the band on the right.

    ``left``/``right`` are zero enclosures (``None`` for the unbounded ends).
    """
    with working_precision(bits):
        lam = to_mpfr(lam_q)
        if left is None:
            c = _outer_point(n, lam, -1)
            hc = trace_and_derivative(c, lam, n)[0]
        elif right is None:
            c = _outer_point(n, lam, 1)
            hc = trace_and_derivative(c, lam, n)[0]
        else:
            c, hc = _gap_point(n, lam, left, right, left_increasing, 4 * bits)
        t = 2 if hc > 0 else -2
        f = _trace_fn(lam, n, t)
        b_left = solve_bracketed(f, left.hi, c, targets[0]) if left is not None else None
        a_right = solve_bracketed(f, c, right.lo, targets[1]) if right is not None else None
    return b_left, a_right


# -- building levels -------------------------------------------------------------


def _zeros_chunk(args):
    n, lam_q, slots, bits, auto = args
    return [solve_zero(n, lam_q, l, r, bits, auto) for l, r in slots]


def _fit_chunk(args):
    n, lam_q, items, bits, auto = args
    return [(code, fit_zero(code, enc, n, lam_q, bits, auto)[0]) for code, enc in items]


def _gaps_chunk(args):
    n, lam_q, items = args
    out = []
    for left, right, inc, bits, targets in items:
        out.append(solve_gap(n, lam_q, left, right, inc, bits, targets))
    return out


def _chunks(seq, k):
    if k <= 1:
        return [seq]
    size = max(1, -(-len(seq) // k))
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def _run(fn, jobs_args, jobs):
    if jobs <= 1 or len(jobs_args) <= 1:
        return [fn(a) for a in jobs_args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, jobs_args))


def _assemble(n, lam_q, codes, slots, params, jobs):
    auto = params.precision_bits is None
    base = params.bits(n)
    zero_args = [(n, lam_q, chunk, base, auto) for chunk in _chunks(slots, jobs)]
    zres = [r for part in _run(_zeros_chunk, zero_args, jobs) for r in part]
    count = len(codes)
    items = []
    for g in range(count + 1):
        left = zres[g - 1] if g > 0 else None
        right = zres[g] if g < count else None
        bits = max(x[1] for x in (left, right) if x is not None)
        targets = (left[2] if left else None, right[2] if right else None)
        inc = C.increasing(codes[g - 1]) if g > 0 else None
        items.append((left[0] if left else None, right[0] if right else None, inc, bits, targets))
    gap_args = [(n, lam_q, chunk) for chunk in _chunks(items, jobs)]
    gres = [r for part in _run(_gaps_chunk, gap_args, jobs) for r in part]
    bands = []
    for r, code in enumerate(codes):
        z, bits, _ = zres[r]
        a = gres[r][1]
        b = gres[r + 1][0]
        bands.append(Band(code, a, z, b, bits))
    return bands


def build_level0(params: ModelParams, jobs: int = 1) -> LevelTable:
    bands = _assemble(0, params.lam, [""], [(None, None)], params, 1)
    return LevelTable(0, params.lam, bands, [("", bands[0].z)])


def build_level(prev: LevelTable, params: ModelParams, jobs: int = 1) -> LevelTable:
    """Bands and zeros of level ``prev.level + 1`` from the zeros up to ``prev.level``."""
    n = prev.level + 1
    params.check_level(n)
    if prev.lam != params.lam:
        raise InvalidInput("previous table was built for a different coupling")
    codes = C.all_codes(n)
    auto = params.precision_bits is None
    fit_args = [(n, params.lam, chunk, params.bits(n), auto) for chunk in _chunks(prev.zeros, jobs)]
    R = [item for part in _run(_fit_chunk, fit_args, jobs) for item in part]
    slots = []
    for r in range(len(codes)):
        left = R[r - 1][1] if r > 0 else None
        right = R[r][1] if r < len(R) else None
        slots.append((left, right))
    bands = _assemble(n, params.lam, codes, slots, params, jobs)
    zeros = []
    for r, band in enumerate(bands):
        zeros.append((band.code, band.z))
        if r < len(R):
            zeros.append(R[r])
    return LevelTable(n, params.lam, bands, zeros)


def build_tables(n_max: int, params: ModelParams, jobs: int = 1, cache=None) -> list:
    """Level tables ``0..n_max``; ``cache`` is an optional :class:`LevelCache`."""
    params.check_level(n_max)
    tables = []
    for n in range(n_max + 1):
        table = cache.load(params, n) if cache is not None else None
        if table is None:
            table = build_level0(params) if n == 0 else build_level(tables[-1], params, jobs)
            if cache is not None:
                cache.store(params, table)
        tables.append(table)
    return tables


class BandSolver:
    """Single bands at arbitrary depth without building whole levels.

    The slot of ``z_sigma`` is bounded by the zeros of two prefixes of
    ``sigma``, so a band needs only a number of zeros linear in its level.
    """

    def __init__(self, params: ModelParams):
        self.params = params
        self._zeros: dict = {}
        self._gaps: dict = {}
        self._bands: dict = {}

    def _zero_full(self, code: str):
        hit = self._zeros.get(code)
        if hit is not None:
            return hit
        n = len(code)
        self.params.check_level(n)
        lo = C.left_owner(code)
        hi = C.right_owner(code)
        left = self.fitted_zero(lo, n) if lo is not None else None
        right = self.fitted_zero(hi, n) if hi is not None else None
        auto = self.params.precision_bits is None
        res = solve_zero(n, self.params.lam, left, right, self.params.bits(n), auto)
        self._zeros[code] = res
        return res

    def zero(self, code: str) -> Enclosure:
        return self._zero_full(C.check_code(code))[0]

    def fitted_zero(self, code: str, n: int) -> Enclosure:
        """``z_code`` tightened so that it can bound a slot at level ``n``."""
        enc, bits, target = self._zero_full(code)
        auto = self.params.precision_bits is None
        fit, fbits = fit_zero(code, enc, n, self.params.lam, bits, auto)
        if fit is not enc:
            self._zeros[code] = (fit, max(bits, fbits), min(target, fit.width))
        return fit

    def _gap(self, left_code, right_code, n):
        key = (left_code, right_code, n)
        hit = self._gaps.get(key)
        if hit is not None:
            return hit
        left = self._zero_full(left_code) if left_code is not None else None
        right = self._zero_full(right_code) if right_code is not None else None
        bits = max(x[1] for x in (left, right) if x is not None)
        targets = (left[2] if left else None, right[2] if right else None)
        inc = C.increasing(left_code) if left_code is not None else None
        res = solve_gap(n, self.params.lam, left[0] if left else None,
                        right[0] if right else None, inc, bits, targets)
        self._gaps[key] = res
        return res

    def band(self, code: str) -> Band:
        C.check_code(code)
        hit = self._bands.get(code)
        if hit is not None:
            return hit
        n = len(code)
        z, bits, _ = self._zero_full(code)
        a = self._gap(C.pred(code), code, n)[1]
        b = self._gap(code, C.succ(code), n)[0]
        band = Band(code, a, z, b, bits)
        self._bands[code] = band
        return band


# -- verification ------------------------------------------------------------------


def _eval(x: Enclosure, lam_q, n, bits):
    with working_precision(bits):
        return trace_and_derivative(mpfr(x.mid), to_mpfr(lam_q), n)


def _near(value, target, d, width, bits) -> bool:
    tol = abs(d) * width * 2 + mpfr(2) ** (-(bits // 2))
    return abs(value - target) <= tol


def zero_order_check(pairs, zero_of) -> bool:
    """Numeric order of zeros against the zero order on codes, for every pair.

    ``zero_of(code)`` returns the enclosure of ``z_code``; equal codes must
    give the same point.
    """
    for s, t in pairs:
        zs, zt = zero_of(s), zero_of(t)
        if s == t:
            if not same_point(zs, zt):
                return False
        elif zs.below(zt) != C.zero_precedes(s, t) or zt.below(zs) != C.zero_precedes(t, s):
            return False
    return True


def sign_product_check(band: Band, lam_q: Fraction, samples: int = 3) -> bool:
    """Sign of ``h_0 ... h_{n-1}`` at interior points of ``B_sigma`` against the last digit."""
    n = len(band.code)
    if n < 1:
        raise InvalidInput("the sign product needs a band of level at least 1")
    want_positive = band.code[-1] == "1"
    with working_precision(band.bits):
        lo, hi = band.a.hi, band.b.lo
        lam = to_mpfr(lam_q)
        for k in range(1, samples + 1):
            x = lo + (hi - lo) * k / (samples + 1)
            hs, _ = trace_sequence(x, lam, n - 1)
            prod = mpfr(1)
            for v in hs:
                prod *= v
            if prod == 0 or (prod > 0) != want_positive:
                return False
    return True


def verify_level(table: LevelTable, prev: Optional[LevelTable] = None,
                 prev2: Optional[LevelTable] = None) -> Report:
    """Structural invariants of one level, using up to two lower levels."""
    n = table.level
    lam_q = table.lam
    rep = Report(f"level {n}")
    bands = table.bands
    rep.check("count/bands", len(bands) == 2**n, len(bands))
    rep.check("count/zeros", len(table.zeros) == 2 ** (n + 1) - 1, len(table.zeros))
    codes = [b.code for b in bands]
    rep.check("count/codes", codes == C.all_codes(n), "codes out of rank order")

    for band in bands:
        rep.check("order/a<z<b", band.a.below(band.z) and band.z.below(band.b), band.code)
    for left, right in zip(bands, bands[1:]):
        rep.check("order/disjoint", strictly_left(left, right), f"{left.code} {right.code}")
    for (c1, e1), (c2, e2) in zip(table.zeros, table.zeros[1:]):
        rep.check("interlacing/increasing", e1.below(e2), f"{c1} {c2}")
        rep.check("interlacing/zero-order", C.zero_precedes(c1, c2), f"{c1} {c2}")
    rep.check("interlacing/alternation",
              all(len(c) == n for c, _ in table.zeros[0::2]), "level-n zeros not at even slots")

    for band in bands:
        bits = band.bits
        inc = C.increasing(band.code)
        h, d = _eval(band.z, lam_q, n, bits)
        rep.check("monotone/direction", (d > 0) == inc, band.code)
        for end, want in ((band.a, -2 if inc else 2), (band.b, 2 if inc else -2)):
            h, d = _eval(end, lam_q, n, bits)
            rep.check("edges/trace=±2", _near(h, want, d, end.width, bits), f"{band.code} {h}")
        if n >= 1:
            rep.check("sign-product", sign_product_check(band, lam_q, 3), band.code)

    # endpoint membership: combinatorial owners versus numeric coincidence
    lower = [(c, e) for c, e in table.zeros if len(c) < n]
    for r, band in enumerate(bands):
        left = lower[r - 1] if r > 0 else None
        right = lower[r] if r < len(lower) else None
        rep.check("slots/left-owner", (left[0] if left else None) == C.left_owner(band.code), band.code)
        rep.check("slots/right-owner", (right[0] if right else None) == C.right_owner(band.code), band.code)
        if band.a_owner is not None:
            rep.check("membership/a", same_point(band.a, table.zero(band.a_owner)), band.code)
        elif left is not None:
            rep.check("membership/a", left[1].below(band.a), band.code)
        if band.b_owner is not None:
            rep.check("membership/b", same_point(band.b, table.zero(band.b_owner)), band.code)
        elif right is not None:
            rep.check("membership/b", band.b.below(right[1]), band.code)
    for left, right in zip(bands, bands[1:]):
        rep.check("end-digits/exactly-one-shared-edge",
                  (left.b_owner is not None) != (right.a_owner is not None), left.code)

    # values and slopes of h_n at the zeros of lower levels
    for code, enc in lower:
        m = len(code)
        bits = max(band.bits for band in bands[:1]) if bands else 64
        h, d = _eval(enc, lam_q, n, max(bits, 4 * n + 64))
        want = -2 if m == n - 1 else 2
        rep.check("zeros/trace-tail", _near(h, want, d, enc.width, max(bits, 4 * n + 64)), f"{code} {h}")
        slope = (-1) ** m if m == n - 1 else (-1) ** (m + 1)
        rep.check("zeros/slope-sign", sign(d) == slope, code)

    if prev is not None:
        _check_children(rep, prev, table)
        _check_parents(rep, prev, prev2, table)
        rep.check("length/non-increasing",
                  max(b.length for b in bands) <= max(b.length for b in prev.bands),
                  "max band length grew")
    if prev is not None and prev2 is not None:
        _check_grandchildren(rep, prev2, prev, table)
    return rep


def _check_children(rep: Report, lo: LevelTable, hi: LevelTable) -> None:
    m = lo.level
    for band in lo.bands:
        s = band.code
        b0, b1 = hi.band(s + "0"), hi.band(s + "1")
        a_in = band.a_owner is not None
        b_in = band.b_owner is not None
        tag = f"{s or '∅'}"
        if m % 2 == 1:
            rep.check("children/odd/b0=z", same_point(b0.b, band.z) and b0.b_owner == s, tag)
            rep.check("children/odd/B0⊂B", contained(b0, band), tag)
            rep.check("children/odd/a1∉R", b1.a_owner is None and band.z.below(b1.a), tag)
            if a_in:
                rep.check("children/odd/B0=[a,z]", same_point(b0.a, band.a), tag)
            else:
                rep.check("children/odd/B0⊂(a,z]", band.a.below(b0.a), tag)
            if b_in:
                rep.check("children/odd/B1⊂(z,b]", same_point(b1.b, band.b), tag)
            else:
                rep.check("children/odd/[z,b]≺B1", band.b.below(b1.b), tag)
        else:
            rep.check("children/even/a1=z", same_point(b1.a, band.z) and b1.a_owner == s, tag)
            rep.check("children/even/B1⊂B", contained(b1, band), tag)
            rep.check("children/even/b0∉R", b0.b_owner is None and b0.b.below(band.z), tag)
            if b_in:
                rep.check("children/even/B1=[z,b]", same_point(b1.b, band.b), tag)
            else:
                rep.check("children/even/B1⊂[z,b)", b1.b.below(band.b), tag)
            if a_in:
                rep.check("children/even/B0⊂[a,z)", same_point(b0.a, band.a), tag)
            else:
                rep.check("children/even/B0≺[a,z]", b0.a.below(band.a), tag)
        rep.check("children/separated/B0<B1", strictly_left(b0, b1), tag)
        p, q = C.pred(s), C.succ(s)
        if p is not None:
            rep.check("children/separated/B-<B0", strictly_left(lo.band(p), b0), tag)
        if q is not None:
            rep.check("children/separated/B1<B+", strictly_left(b1, lo.band(q)), tag)


def _check_grandchildren(rep: Report, t0: LevelTable, t1: LevelTable, t2: LevelTable) -> None:
    m = t0.level
    for band in t0.bands:
        s = band.code
        B0, B1 = t1.band(s + "0"), t1.band(s + "1")
        B00, B01, B10, B11 = (t2.band(s + x) for x in ("00", "01", "10", "11"))
        a_in = band.a_owner is not None
        b_in = band.b_owner is not None
        tag = s or "∅"
        if m % 2 == 1:
            rep.check("grandchildren/odd/σ10∉R", B10.a_owner is None and B10.b_owner is None, tag)
            rep.check("grandchildren/odd/B00⊂B", contained(B00, band), tag)
            rep.check("grandchildren/odd/B10⊂intB", inside_interior(B10, band), tag)
            rep.check("grandchildren/odd/B01⊂B0", contained(B01, B0), tag)
            rep.check("grandchildren/odd/B0<B10", strictly_left(B0, B10), tag)
            rep.check("grandchildren/odd/B10≺B1", weakly_left(B10, B1), tag)
            if a_in:
                rep.check("grandchildren/odd/B00⊂B0", contained(B00, B0), tag)
            else:
                rep.check("grandchildren/odd/B00≺B0", weakly_left(B00, B0), tag)
                rep.check("grandchildren/odd/σ00∉R",
                          B00.a_owner is None and B00.b_owner is None and inside_interior(B00, band), tag)
            if b_in:
                rep.check("grandchildren/odd/B11⊂B1⊂B", contained(B11, B1) and contained(B1, band), tag)
            else:
                rep.check("grandchildren/odd/B≺B11", weakly_left(band, B11), tag)
        else:
            rep.check("grandchildren/even/σ01∉R", B01.a_owner is None and B01.b_owner is None, tag)
            rep.check("grandchildren/even/B11⊂B", contained(B11, band), tag)
            rep.check("grandchildren/even/B01⊂intB", inside_interior(B01, band), tag)
            rep.check("grandchildren/even/B10⊂B1", contained(B10, B1), tag)
            rep.check("grandchildren/even/B0≺B01", weakly_left(B0, B01), tag)
            rep.check("grandchildren/even/B01<B1", strictly_left(B01, B1), tag)
            if b_in:
                rep.check("grandchildren/even/B11⊂B1", contained(B11, B1), tag)
            else:
                rep.check("grandchildren/even/B1≺B11", weakly_left(B1, B11), tag)
                rep.check("grandchildren/even/σ11∉R",
                          B11.a_owner is None and B11.b_owner is None and inside_interior(B11, band), tag)
            if a_in:
                rep.check("grandchildren/even/B00⊂B0⊂B", contained(B00, B0) and contained(B0, band), tag)
            else:
                rep.check("grandchildren/even/B00≺B", weakly_left(B00, band), tag)


def _check_parents(rep: Report, prev: LevelTable, prev2: Optional[LevelTable], table: LevelTable) -> None:
    """Containment in the parent or grandparent band, and prefix relations."""
    starts = [b.a.lo for b in prev.bands]
    for band in table.bands:
        s = band.code
        parent = prev.band(s[:-1])
        inside_parent = contained(band, parent)
        has_owner = band.a_owner is not None or band.b_owner is not None
        rep.check("nesting/inside-parent-iff-owned", inside_parent == has_owner, s)
        if prev2 is not None:
            grand = prev2.band(s[:-2])
            rep.check("nesting/inside-parent-or-grandparent", inside_parent or contained(band, grand), s)
        elif table.level == 1:
            rep.check("nesting/inside-parent-or-grandparent", True, s)
        # any lower band containing this one must be indexed by a prefix
        k = bisect.bisect_right(starts, band.a.hi) - 1
        if k >= 0 and contained(band, prev.bands[k]):
            rep.check("nesting/parent-is-prefix", s.startswith(prev.bands[k].code), s)


def verify_tables(tables: Sequence[LevelTable]) -> Report:
    rep = Report(f"levels 0..{len(tables) - 1}")
    for n, table in enumerate(tables):
        prev = tables[n - 1] if n >= 1 else None
        prev2 = tables[n - 2] if n >= 2 else None
        rep.merge(verify_level(table, prev, prev2))
    return rep
