"""A separated sub-covering counted by Fibonacci numbers, and the dimension bound it gives.

Words ``0_e 1_o w`` with ``w`` over ``{1_e, 1_o, 2_e, 2_o}`` follow the
restricted rules ``1_o -> 2_e``, ``1_e -> 2_o``, ``2_e -> {1_o, 2_o}`` and
``2_o -> {2_e, 1_e}``.  Level ``n`` holds the words with ``n + 1`` letters
after the seed, so that it has ``F_n`` entries with ``F_0 = 1, F_1 = 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import gmpy2
from gmpy2 import mpfr

from .bands import Band, BandSolver, strictly_left
from .errors import InvalidInput
from .numeric import working_precision
from .report import Report
from .symbolic import format_word, pi_star
from .traces import ModelParams, trace_sequence

SEED = ("0_e", "1_o")
SNS_RULES = {
    "1_o": ("2_e",),
    "1_e": ("2_o",),
    "2_e": ("1_o", "2_o"),
    "2_o": ("2_e", "1_e"),
}
SNS_LETTERS = tuple(sorted(SNS_RULES))
GOLDEN = (1 + math.sqrt(5)) / 2
LIMIT_CONSTANT = math.log(GOLDEN) / math.log(4)


def fibonacci(n: int) -> int:
    """``F_0 = 1, F_1 = 2, F_{k+1} = F_k + F_{k-1}``."""
    a, b = 1, 2
    for _ in range(n):
        a, b = b, a + b
    return a


def sns_words(n: int) -> list[tuple]:
    """Words of level ``n``, sorted by the order of their bands."""
    if n < 0:
        raise InvalidInput("level must be non-negative")
    words = [SEED]
    for _ in range(n + 1):
        words = [w + (s,) for w in words for s in SNS_RULES[w[-1]]]
    # Pi_star is injective here and increasing in the band order
    return sorted(words, key=lambda w: int(pi_star(w), 2))


def sns_count(n: int) -> int:
    """Number of level ``n`` words by a transfer matrix count, without listing them."""
    counts = {"1_o": 1}
    for _ in range(n + 1):
        nxt: dict = {}
        for letter, c in counts.items():
            for s in SNS_RULES[letter]:
                nxt[s] = nxt.get(s, 0) + c
        counts = nxt
    return sum(counts.values())


@dataclass
class SnsLevel:
    level: int
    words: list
    bands: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.words)

    @property
    def min_length(self) -> Optional[mpfr]:
        return min(b.length for b in self.bands) if self.bands else None

    def row(self) -> dict:
        ml = self.min_length
        return {
            "n": self.level,
            "count": self.count,
            "min_length": f"{float(ml):.17g}" if ml is not None else "",
            "min_length_x_4^n": f"{float(ml * 4**self.level):.17g}" if ml is not None else "",
            "estimate": f"{math.log(self.count) / (self.level * math.log(4)):.17g}" if self.level else "",
        }


def build_sns(n_max: int, params: ModelParams, band_levels: Optional[int] = None,
              solver: Optional[BandSolver] = None) -> list[SnsLevel]:
    """Levels ``0..n_max``; bands are attached up to ``band_levels``."""
    band_levels = n_max if band_levels is None else band_levels
    solver = solver or BandSolver(params)
    levels = []
    for n in range(n_max + 1):
        words = sns_words(n)
        bands = [solver.band(pi_star(w)) for w in words] if n <= band_levels else []
        levels.append(SnsLevel(n, words, bands))
    return levels


@dataclass(frozen=True)
class LengthScaling:
    """``min |I| * 4^n`` per level, and the largest ``c`` with ``min |I| >= c 4^-n`` on all of them."""

    constant: float
    values: list


def min_length_scaling(levels: Sequence[SnsLevel]) -> LengthScaling:
    values = [float(lv.min_length * 4**lv.level) for lv in levels if lv.bands]
    return LengthScaling(min(values) if values else 0.0, values)


def descendant_counts(word: tuple, k: int) -> int:
    counts = {word[-1]: 1}
    for _ in range(k):
        nxt: dict = {}
        for letter, c in counts.items():
            for s in SNS_RULES[letter]:
                nxt[s] = nxt.get(s, 0) + c
        counts = nxt
    return sum(counts.values())


def balance_ratio(k: int) -> float:
    """Largest ratio of descendant counts ``k`` levels down between two entries."""
    counts = [descendant_counts(("x", a), k) for a in SNS_LETTERS]
    return max(counts) / min(counts)


def dimension_lower_estimate(levels: Sequence[SnsLevel]) -> dict:
    """``log F_n / (n log 4)`` at the top level with the limit ``log(golden) / log 4``.

    ``generalized`` swaps the bound 4 for the measured contraction of the
    minimal length between the first and last levels with bands.  It is an
    exploratory number without a proof behind it.
    """
    top = levels[-1]
    out = {
        "n": top.level,
        "count": top.count,
        "estimate": math.log(top.count) / (top.level * math.log(4)) if top.level else None,
        "limit": LIMIT_CONSTANT,
    }
    with_bands = [lv for lv in levels if lv.bands and lv.level > 0]
    if len(with_bands) >= 2:
        first, last = with_bands[0], with_bands[-1]
        ratio = (float(first.min_length) / float(last.min_length)) ** (1 / (last.level - first.level))
        out["measured_ratio"] = ratio
        out["generalized"] = math.log(last.count) / (last.level * math.log(ratio))
    return out


def box_counts(coverings: Sequence, scales: int = 5) -> list[tuple[float, int]]:
    """``(eps, N(eps))`` for dyadic ``eps`` above the resolution of the deepest covering.

    ``N`` counts grid cells ``[k eps, (k + 1) eps)`` meeting a band of that
    covering.  The finest ``eps`` is the first power of two above its
    largest band.
    """
    entries = coverings[-1].entries
    widest = max(float(e.band.b.hi - e.band.a.lo) for e in entries)
    j = math.floor(-math.log2(widest))
    out = []
    for k in range(j - scales + 1, j + 1):
        eps = 2.0 ** -k
        cells = set()
        for e in entries:
            lo, hi = math.floor(float(e.band.a.lo) / eps), math.floor(float(e.band.b.hi) / eps)
            cells.update(range(lo, hi + 1))
        out.append((eps, len(cells)))
    return out


def box_dimension_estimate(coverings: Sequence, scales: int = 5) -> Optional[float]:
    """Least squares slope of ``log N`` against ``log(1/eps)`` from :func:`box_counts`.

    Informational only: the scales reachable at desk depth are coarse.
    """
    pts = [(math.log(1 / eps), math.log(n)) for eps, n in box_counts(coverings, scales)]
    if len(pts) < 2:
        return None
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    num = sum((x - mx) * (y - my) for x, y in pts)
    den = sum((x - mx) ** 2 for x, _ in pts)
    return num / den if den else None


def _interior_samples(band: Band, k: int = 3) -> list:
    a, b = band.a.hi, band.b.lo
    return [a + (b - a) * mpfr(i) / (k + 1) for i in range(1, k + 1)]


def verify_sns(levels: Sequence[SnsLevel], params: ModelParams) -> Report:
    rep = Report("separated sub-covering")
    for lv in levels:
        rep.check("count equals F_n", lv.count == fibonacci(lv.level) == sns_count(lv.level), lv.level)
        if not lv.bands:
            continue
        for x, y in zip(lv.bands, lv.bands[1:]):
            rep.check("entries disjoint", strictly_left(x, y), f"{lv.level}: {x.code} {y.code}")
        derivative_ratio = 0.0
        for word, band in zip(lv.words, lv.bands):
            with working_precision(band.bits + 32):
                lam = params.lam_mpfr()
                top = lv.level + 1
                for x in _interior_samples(band):
                    hs, ds = trace_sequence(x, lam, top, derivatives=True)
                    worst = max(abs(h) for h in hs[1 : top + 1])
                    rep.check("traces bounded by 2", worst <= 2, f"{format_word(word)}")
                    for k in range(1, top + 1):
                        derivative_ratio = max(derivative_ratio, float(abs(ds[k]) / mpfr(4) ** k))
        rep.note(f"derivative/4^k at level {lv.level}", derivative_ratio)
    scaled = min_length_scaling(levels)
    if scaled.values:
        rep.check("min length times 4^n positive", scaled.constant > 0, scaled.values)
        rep.note("min_length_x_4^n", scaled.values)
    totals = [(lv, sum(b.length for b in lv.bands)) for lv in levels if lv.bands]
    for lv, total in totals:
        rep.check("total length at most F_n times the longest", total <= lv.count * max(b.length for b in lv.bands),
                  lv.level)
    for (lv, p), (_, q) in zip(totals, totals[1:]):
        rep.check("total length decays", q < p, lv.level)
    for k in range(1, 12):
        rep.check("balance ratio below F_k/F_{k-1}",
                  balance_ratio(k) <= fibonacci(k) / fibonacci(k - 1) <= 2, k)
    return rep
