"""Coding of the spectrum by admissible words, IDS values and gap labels.

The exact symbolic machinery lives in :mod:`pdspectrum.symbolic` and is
re-exported here.  This module adds the numeric side: the band ``I_w``
carried by a finite word, the words whose band contains a given energy, the
certified gaps of an optimal covering with their labels, and an independent
zero counting oracle for the IDS of zeros.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2
from gmpy2 import mpfr

from . import codes as C
from .bands import BandSolver, LevelTable, _trace_fn, strictly_left
from .covering import OptimalCovering, find_entry
from .errors import InvalidInput, PrecisionExhausted
from .numeric import Enclosure, solve_bracketed, to_hex, to_mpfr, working_precision
from .report import Report
from .traces import substitution_word
from .symbolic import (  # noqa: F401  (re-exported API)
    CYCLES,
    EDGES,
    LETTERS,
    OMEGA_MAX,
    OMEGA_MIN,
    PREDECESSORS,
    START_LETTERS,
    STRONG_ORDER,
    SUCCESSORS,
    WEAK_ORDER,
    BinaryCode,
    Pi,
    Pi_inverse,
    Pi_star,
    SymbolicPoint,
    admissible_words,
    cmp_strong,
    cmp_weak,
    coding_of_zero,
    compare_words,
    edge_class,
    ell,
    ell_e,
    ell_e_inverse,
    ell_inverse,
    ell_o,
    ell_o_inverse,
    epsilon,
    eventually_periodic_points,
    first_difference,
    format_word,
    gap_partner,
    ids,
    ids_of_zero,
    is_admissible,
    letter_less,
    letter_precedes,
    parse_word,
    pi_star,
    sort_weak,
)

# -- numeric image of words -------------------------------------------------------


def word_band(word: Sequence[str], source):
    """Band ``I_w`` of a finite admissible word.

    ``source`` is either a list of optimal coverings indexed by level or a
    :class:`BandSolver`; the solver reaches depths far beyond whole levels.
    """
    word = tuple(word)
    if isinstance(source, BandSolver):
        return source.band(pi_star(word))
    depth = len(word) - 1
    if depth >= len(source):
        raise InvalidInput(f"depth {depth} exceeds computed coverings (max {len(source) - 1})")
    entry = find_entry(source[depth], word)
    if entry is None:
        raise InvalidInput(f"{format_word(word)} is not in the covering of level {depth}")
    return entry.band


def pi_numeric(omega: SymbolicPoint, depth: int, source) -> Enclosure:
    """Enclosure of ``I_{omega|depth}``, which contains ``pi(omega)``."""
    if depth < 0:
        raise InvalidInput("depth must be non-negative")
    band = word_band(omega.prefix(depth), source)
    return band.hull


def code_of_energy(E, depth: int, coverings: Sequence[OptimalCovering]) -> list[tuple]:
    """Words ``w`` of length ``depth + 1`` whose covering band may contain ``E``.

    Membership uses the outer enclosure of each band, so an empty answer
    certifies that ``E`` is outside the spectrum.
    """
    if depth >= len(coverings):
        raise InvalidInput(f"depth {depth} exceeds computed coverings")
    x = to_mpfr(E) if not isinstance(E, Enclosure) else None
    lo, hi = (E.lo, E.hi) if x is None else (x, x)
    return [e.word for e in coverings[depth].entries if e.band.a.lo <= hi and lo <= e.band.b.hi]


# -- gaps -----------------------------------------------------------------------------


def _extreme_successor(letter: str, largest: bool) -> str:
    succ = SUCCESSORS[letter]
    for s in succ:
        if all(t == s or letter_precedes(t, s) == largest for t in succ):
            return s
    raise AssertionError(f"successors of {letter} are not totally ordered")


MAX_SUCCESSOR = {a: _extreme_successor(a, True) for a in LETTERS}
MIN_SUCCESSOR = {a: _extreme_successor(a, False) for a in LETTERS}


def extreme_extension(word: Sequence[str], largest: bool) -> SymbolicPoint:
    """The largest (or smallest) infinite continuation of a finite word."""
    rule = MAX_SUCCESSOR if largest else MIN_SUCCESSOR
    letters = list(word)
    seen = {}
    while letters[-1] not in seen:
        seen[letters[-1]] = len(letters) - 1
        letters.append(rule[letters[-1]])
    start = seen[letters[-1]]
    return SymbolicPoint(tuple(letters[:start]), tuple(letters[start:-1]))


def is_dyadic(q: Fraction) -> bool:
    d = Fraction(q).denominator
    return d & (d - 1) == 0


def in_third_dyadics(q: Fraction) -> bool:
    """``q`` in ``(D/3 minus D)`` intersected with ``(0, 1)``."""
    q = Fraction(q)
    return 0 < q < 1 and is_dyadic(3 * q) and not is_dyadic(q)


def in_eps_Pi_F(q: Fraction) -> bool:
    """Whether ``q = eps(Pi(omega))`` for some ``omega`` ending in ``(2_e 2_o)``."""
    q = Fraction(q)
    if q in (0, 1):
        return False
    expansions = [BinaryCode.from_rational(q)]
    if is_dyadic(q):
        # the other expansion ends in ones
        base = expansions[0]
        digits = base.pre.rstrip("0") if base.period == "0" else base.pre
        expansions.append(BinaryCode(digits[:-1] + "0", "1"))
    return any(edge_class(w) == "F" for code in expansions for w in Pi_inverse(code))


def _zero_of_label(label: Fraction) -> str:
    """The code ``sigma`` with ``ids_of_zero(sigma) == label``."""
    d = label.denominator
    n = d.bit_length() - 2
    return C.code_of_rank((label.numerator - 1) // 2, n) if n > 0 else ""


@dataclass(frozen=True)
class GapRecord:
    kind: str
    left: SymbolicPoint
    right: SymbolicPoint
    label: Fraction
    inner: Enclosure
    left_band: Enclosure
    right_band: Enclosure
    words: tuple

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "left": str(self.left),
            "right": str(self.right),
            "label": f"{self.label.numerator}/{self.label.denominator}",
            "gap": [to_hex(self.inner.lo), to_hex(self.inner.hi)],
            "gap_decimal": [f"{float(self.inner.lo):.17g}", f"{float(self.inner.hi):.17g}"],
            "left_band": self.left_band.to_json(),
            "right_band": self.right_band.to_json(),
            "bounding_words": [format_word(w) for w in self.words],
        }

    def row(self) -> dict:
        return {
            "kind": self.kind,
            "left": str(self.left),
            "right": str(self.right),
            "label": f"{self.label.numerator}/{self.label.denominator}",
            "gap_lo": f"{float(self.inner.lo):.17g}",
            "gap_hi": f"{float(self.inner.hi):.17g}",
        }


@dataclass
class GapScan:
    depth: int
    gaps: list
    deferred: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.gaps)

    def __len__(self):
        return len(self.gaps)


def _gap_kind(left: SymbolicPoint, right: SymbolicPoint) -> str:
    lc, rc = edge_class(left), edge_class(right)
    if lc == "E_l^o" and rc == "E_r^o":
        return "I_o"
    if lc == "E_l^e" and rc == "E_r^e":
        return "I_e"
    if lc == "E~_l" and rc == "E~_r":
        return "II"
    raise AssertionError(f"unexpected edge classes {lc}, {rc}")


def enumerate_gaps(depth: int, coverings: Sequence[OptimalCovering]) -> GapScan:
    """Certified gaps between adjacent entries of the covering at ``depth``.

    Adjacent entries whose bands are not certified disjoint are reported as
    deferred rather than as gaps.
    """
    if depth >= len(coverings):
        raise InvalidInput(f"depth {depth} exceeds computed coverings")
    entries = coverings[depth].entries
    scan = GapScan(depth, [])
    for x, y in zip(entries, entries[1:]):
        if not strictly_left(x.band, y.band):
            scan.deferred.append((x.word, y.word))
            continue
        left = extreme_extension(x.word, True)
        right = extreme_extension(y.word, False)
        scan.gaps.append(GapRecord(
            kind=_gap_kind(left, right),
            left=left,
            right=right,
            label=ids(left),
            inner=Enclosure(x.band.b.hi, y.band.a.lo),
            left_band=x.band.hull,
            right_band=y.band.hull,
            words=(x.word, y.word),
        ))
    return scan


def check_gaps(scan: GapScan, tables: Sequence[LevelTable] = (), report: Optional[Report] = None) -> Report:
    """Label sets, partner maps and zero edges of every certified gap."""
    rep = report if report is not None else Report(f"gaps at depth {scan.depth}")
    labels = []
    for g in scan.gaps:
        where = f"{format_word(g.words[0])} | {format_word(g.words[1])}"
        rep.check("gaps/edges-share-label", ids(g.right) == g.label, where)
        if g.kind == "II":
            rep.check("gaps/partner", ell(g.left) == g.right, where)
            rep.check("gaps/label-II-in-D3", in_third_dyadics(g.label), f"{g.label} at {where}")
            rep.check("gaps/label-II-not-in-eps-Pi-F", not in_eps_Pi_F(g.label), f"{g.label} at {where}")
        else:
            zero_edge = g.left if g.kind == "I_o" else g.right
            rep.check("gaps/partner", gap_partner(zero_edge) == (g.right if g.kind == "I_o" else g.left), where)
            rep.check("gaps/label-I-dyadic", is_dyadic(g.label) and 0 < g.label < 1, f"{g.label} at {where}")
            sigma = _zero_of_label(g.label)
            rep.check("gaps/zero-coding", coding_of_zero(sigma) == zero_edge, f"{sigma!r} at {where}")
            if len(sigma) < len(tables):
                z = tables[len(sigma)].zero(sigma)
                side = g.left_band if g.kind == "I_o" else g.right_band
                rep.check("gaps/zero-edge-in-band", side.overlaps(z), f"{sigma!r} at {where}")
        labels.append(g.label)
    rep.check("gaps/labels-increase", all(p < q for p, q in zip(labels, labels[1:])), scan.depth)
    rep.note(f"gaps/depth-{scan.depth}", {"certified": len(scan.gaps), "deferred": len(scan.deferred)})
    return rep


# -- IDS of zeros and counting oracles -------------------------------------------------


def floquet_count_direct(lam_q: Fraction, m: int, energy, bits: int) -> int:
    """Zeros of ``h_m`` below ``energy`` by a plain Sturm sweep over ``2^m`` sites.

    The zeros of ``h_m`` are the eigenvalues of the discrete Schroedinger
    operator with period ``2^m`` and Bloch phase ``pi/2`` (trace zero).  The
    count below ``E`` is the negative inertia of ``H - E``: the Sturm count of
    the open chain of the first ``2^m - 1`` sites plus the sign of the Schur
    complement of the last site.  At this phase the corner couplings enter
    only through the two end entries of the inverse of the chain.  Linear in
    the period, so only meant as a reference for :func:`floquet_count`.
    """
    word = substitution_word(m)
    if len(word) < 4:
        raise InvalidInput("the inertia count needs at least four sites")
    with working_precision(bits):
        lam = to_mpfr(lam_q)
        e = mpfr(energy)
        da, db = lam - e, -lam - e
        d = [da if c == "a" else db for c in word]
        size = len(d)
        q = d[0]
        count = int(q < 0)
        for j in range(1, size - 1):
            q = d[j] - 1 / q
            count += q < 0
        g_last = 1 / q
        p = d[size - 2]
        for j in range(size - 3, -1, -1):
            p = d[j] - 1 / p
        schur = d[size - 1] - 1 / p - g_last
        return count + int(schur < 0)


@dataclass(frozen=True)
class _Lift:
    """Transfer matrix of a block with the lifted angle it turns ``(1, 0)`` by.

    The angle is ``turns * pi + base`` with ``0 <= base < pi``.  The Sturm
    pivots of a chain are ratios of consecutive solution entries, and a pivot
    is negative exactly when the next step of the lifted angle passes a
    multiple of ``pi``; so ``turns`` counts negative pivots and lifts compose
    along the blocks of the substitution.
    """

    matrix: tuple
    turns: int
    base: mpfr


class _LiftAlgebra:
    def __init__(self, bits: int):
        self.pi = gmpy2.const_pi()
        self.slack = mpfr(2) ** (-(bits // 2))
        self.bits = bits

    def angle(self, x, y) -> mpfr:
        a = gmpy2.atan2(y, x)
        if a < 0:
            a += self.pi
        if a >= self.pi:
            a -= self.pi
        return a

    def site(self, d) -> _Lift:
        return _Lift((d, mpfr(-1), mpfr(1), mpfr(0)), 0, self.angle(d, mpfr(1)))

    def then(self, first: _Lift, second: _Lift) -> _Lift:
        """The block ``first`` followed by the block ``second``.

        The increment ``delta`` is the angle from ``M e1`` to ``M v`` with
        ``v`` at angle ``first.base``.  Since ``det M = 1`` its sine part is
        exactly ``sin(first.base)``, so tiny increments keep their sign; only
        the cosine part ``<M e1, M v>`` carries rounding error.
        """
        m = second.matrix
        c, s = gmpy2.cos(first.base), gmpy2.sin(first.base)
        x, y = m[0] * c + m[1] * s, m[2] * c + m[3] * s
        norm_e, norm_v = gmpy2.hypot(m[0], m[2]), gmpy2.hypot(x, y)
        scale = max(abs(v) for v in m)
        if norm_v == 0 or scale * scale * mpfr(2) ** (8 - self.bits) > self.slack * norm_e * norm_v:
            raise PrecisionExhausted("cancellation in transfer matrix product")
        delta = gmpy2.atan2(s, m[0] * x + m[2] * y)
        total = second.base + delta
        turns = first.turns + second.turns
        if abs(total - self.pi) < self.slack:
            raise PrecisionExhausted("lifted angle too close to a multiple of pi")
        if total >= self.pi:
            turns += 1
            total -= self.pi
        p = first.matrix
        prod = (m[0] * p[0] + m[1] * p[2], m[0] * p[1] + m[1] * p[3],
                m[2] * p[0] + m[3] * p[2], m[2] * p[1] + m[3] * p[3])
        return _Lift(prod, turns, total)


def _floquet_count_at(lam, m: int, e, bits: int) -> int:
    alg = _LiftAlgebra(bits)
    blocks = {("a", 0): alg.site(lam - e), ("b", 0): alg.site(-lam - e)}
    for k in range(1, m + 1):
        blocks["a", k] = alg.then(blocks["a", k - 1], blocks["b", k - 1])
        blocks["b", k] = alg.then(blocks["a", k - 1], blocks["a", k - 1])

    def prefix(letter: str, k: int, length: int) -> _Lift:
        if length == 2**k:
            return blocks[letter, k]
        first, second = ("a", "b") if letter == "a" else ("a", "a")
        half = 2 ** (k - 1)
        if length <= half:
            return prefix(first, k - 1, length)
        return alg.then(blocks[first, k - 1], prefix(second, k - 1, length - half))

    chain = prefix("a", m, 2**m - 1)
    negative = chain.turns + int(2 * chain.base > alg.pi)
    full = blocks["a", m].matrix
    trace = full[0] + full[3]
    if trace == 0:
        raise PrecisionExhausted("energy is a zero of h_m at working precision")
    # det(H - E) = h_m(E) for an even period; the Schur complement has the
    # sign of det(H - E) / det(chain) and det(chain) has sign (-1)^negative
    return negative + int((trace < 0) != (negative % 2 == 1))


def floquet_count(lam_q: Fraction, m: int, energy, bits: int, auto: bool = True) -> int:
    """Number of zeros of ``h_m`` below ``energy`` from the periodic operator.

    Same count as :func:`floquet_count_direct` (which documents the
    operator), done with ``O(m)`` block products.  Energies deep in gaps
    make the block matrices hyperbolic with huge entries; with ``auto`` the
    precision is doubled until the products lose no significance.  Energies
    where a leading sub-chain is exactly singular, such as ``E = lam``, are
    refused with :class:`PrecisionExhausted`.
    """
    if m < 2:
        raise InvalidInput("the inertia count needs at least four sites")
    for _ in range(6 if auto else 1):
        try:
            with working_precision(bits):
                return _floquet_count_at(to_mpfr(lam_q), m, mpfr(energy), bits)
        except PrecisionExhausted:
            if not auto:
                raise
            bits *= 2
    raise PrecisionExhausted(f"inertia count unresolved at {bits} bits")


def certified_count(lam_q: Fraction, m: int, code: str, enc: Enclosure, bits: int,
                    rounds: int = 6) -> Optional[int]:
    """Count of level ``m`` zeros below ``z_code``, or ``None`` if unresolved.

    The count is taken at both ends of the enclosure of the zero and trusted
    only when they agree.  Level ``m`` zeros crowd against ``z_code`` very
    fast, so the enclosure is tightened by Newton steps until they do.
    """
    n = len(code)
    for _ in range(rounds):
        lo = floquet_count(lam_q, m, enc.lo, bits)
        hi = floquet_count(lam_q, m, enc.hi, bits)
        if lo == hi:
            return lo
        bits *= 2
        with working_precision(bits):
            target = mpfr(enc.width) * mpfr(2) ** (-bits // 2)
            enc = solve_bracketed(_trace_fn(to_mpfr(lam_q), n), mpfr(enc.lo), mpfr(enc.hi), target)
    return None


@lru_cache(maxsize=None)
def _zero_keys(m: int) -> list:
    return sorted(C.zero_key(t, m) for t in C.all_codes(m))


def combinatorial_ids(code: str, m: int) -> Fraction:
    """``#{z in Z_m : z <= z_code} / 2^m`` counted with the zero order on codes."""
    if m < len(code):
        raise InvalidInput("m must be at least the code length")
    count = bisect.bisect_left(_zero_keys(m), C.zero_key(code, m))
    return Fraction(count, 2**m)


def verify_ids(tables: Sequence[LevelTable], max_code: int, extra: int = 6,
               report: Optional[Report] = None) -> Report:
    """IDS of every zero ``z_sigma`` with ``|sigma| <= max_code`` by four routes.

    The closed formula, ``eps(Pi(.))`` on the symbolic coding of the zero,
    the zero order count on codes of level ``|sigma| + extra`` and the
    eigenvalue count of the periodic operator below the certified ``z_sigma``.
    """
    rep = report if report is not None else Report("ids")
    lam_q = tables[0].lam
    for n in range(min(max_code, len(tables) - 1) + 1):
        m = n + extra
        codes = C.all_codes(n)
        bits = max(b.bits for b in tables[n].bands) + 2 * m + 32
        for code in codes:
            count = certified_count(lam_q, m, code, tables[n].zero(code), bits)
            want = ids_of_zero(code)
            name = repr(code)
            rep.check("ids/formula-vs-Pi", ids(coding_of_zero(code)) == want, name)
            rep.check("ids/formula-vs-zero-order-count", combinatorial_ids(code, m) == want, name)
            rep.check("ids/formula-vs-counting-oracle",
                      count is not None and Fraction(count, 2**m) == want, f"{name}: {count}")
    return rep


# -- order and collapse of the label map ---------------------------------------------


def verify_pi(max_total: int = 12, report: Optional[Report] = None) -> Report:
    """Order preservation of ``Pi`` and the exact list of pairs it identifies.

    Runs over every eventually periodic word with ``len(pre) + len(period)
    <= max_total``.  Sorting by the weak order and comparing neighbours
    suffices for monotonicity; equal codes are grouped and every group must
    be ``{w, ell(w)}`` for some ``w`` in ``E~_l``.
    """
    rep = report if report is not None else Report(f"label map, words up to {max_total}")
    points = sort_weak(eventually_periodic_points(max_total))
    codes = [Pi(p) for p in points]
    for (u, cu), (v, cv) in zip(zip(points, codes), zip(points[1:], codes[1:])):
        rep.check("Pi/order-preserving", cu.compare(cv) <= 0, f"{u} < {v}")
    groups: dict = {}
    for p, c in zip(points, codes):
        groups.setdefault(c, []).append(p)
    collapsed = 0
    for c, members in groups.items():
        if len(members) == 1:
            continue
        collapsed += 1
        ok = len(members) == 2 and edge_class(members[0]) == "E~_l" and ell(members[0]) == members[1]
        rep.check("Pi/collapse-only-on-gap-pairs", ok, " | ".join(map(str, members)))
    # the converse: every sampled E~_l word meets its partner's code
    for p, c in zip(points, codes):
        if edge_class(p) == "E~_l":
            rep.check("Pi/gap-pairs-collapse", Pi(ell(p)) == c, str(p))
    rep.note("Pi/points", len(points))
    rep.note("Pi/collapsed-pairs", collapsed)
    return rep
