"""Optimal coverings, band types and the evolution law between levels.

The optimal covering at level ``n`` keeps every band of level ``n`` and
adds the level ``n + 1`` bands that are not inside their level ``n``
parent.  A band of level ``n`` has type ``k_e``/``k_o`` when ``k`` of its
endpoints are zeros of lower levels; the added bands carry a ``3`` type
whose side comes from an interval comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key
from typing import Optional, Sequence

from . import codes as C
from .bands import Band, LevelTable, contained, same_point, strictly_left, weakly_left
from .errors import EvolutionViolation, InvalidInput, UnresolvedOrder
from .report import Report
from .symbolic import (
    EDGES,
    SUCCESSORS,
    compare_words,
    format_word,
    letter_less,
    letter_precedes,
    pi_star,
)

endpoint_in_R = C.endpoint_in_R


@dataclass(frozen=True)
class TypedBand:
    """A band of an optimal covering with its type and admissible word."""

    band: Band
    type: str
    word: tuple
    level: int

    @property
    def code(self) -> str:
        return self.band.code

    def to_json(self) -> dict:
        out = self.band.to_json()
        out.update({"type": self.type, "word": format_word(self.word), "covering_level": self.level})
        return out


@dataclass
class OptimalCovering:
    level: int
    entries: list

    def by_code(self) -> dict:
        return {e.code: e for e in self.entries}

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _kappa(code: str) -> int:
    if not code:
        return 0
    return int(C.endpoint_in_R(code, "left")) + int(C.endpoint_in_R(code, "right"))


def base_type(code: str) -> str:
    """Type of a level-``n`` band inside the covering of level ``n``."""
    return f"{_kappa(code)}_{C.parity_letter(len(code))}"


def is_extra(code: str) -> bool:
    """A level ``n + 1`` band joins the level-``n`` covering iff no endpoint lies in ``R_n``."""
    return not (C.endpoint_in_R(code, "left") or C.endpoint_in_R(code, "right"))


def _certified_precedes(i: Band, j: Band, what: str) -> bool:
    if weakly_left(i, j):
        return True
    if weakly_left(j, i):
        return False
    raise UnresolvedOrder(f"cannot order {what}: B_{i.code or '∅'} vs B_{j.code or '∅'}")


def extra_type(code: str, band_of) -> str:
    """Side of a ``3`` type band ``B_code`` with ``|code| = n + 1``.

    ``band_of(c)`` returns the band with code ``c``.  When the parent
    ``B_{code|n}`` sits inside ``B_{code|n-1}`` the band is compared with its
    parent, otherwise the parent is compared with the grandparent.
    """
    n = len(code) - 1
    parity = C.parity_letter(n)
    parent = code[:n]
    me = band_of(code)
    if n == 0 or not is_extra(parent):
        left = _certified_precedes(me, band_of(parent), "type-3 band against its parent")
    else:
        grand = code[: n - 1]
        left = _certified_precedes(band_of(parent), band_of(grand), "parent against grandparent")
    return f"3_{parity}{'l' if left else 'r'}"


def _band_lookup(tables: Sequence[LevelTable]):
    index = {}

    def band_of(code: str) -> Band:
        n = len(code)
        if n >= len(tables):
            raise InvalidInput(f"level {n} table missing")
        if n not in index:
            index[n] = {b.code: b for b in tables[n].bands}
        return index[n][code]

    return band_of


def _sort_entries(entries: list) -> list:
    return sorted(entries, key=cmp_to_key(lambda x, y: compare_words(x.word, y.word)))


def covering_zero(tables: Sequence[LevelTable]) -> OptimalCovering:
    band_of = _band_lookup(tables)
    entries = [
        TypedBand(band_of("0"), extra_type("0", band_of), ("3_el",), 0),
        TypedBand(band_of(""), "0_e", ("0_e",), 0),
    ]
    return OptimalCovering(0, _sort_entries(entries))


def child_codes(parent: TypedBand) -> list[tuple[str, str]]:
    """``(child type, child code)`` predicted by the graph and its labels."""
    return [(t, parent.code + EDGES[parent.type, t]) for t in SUCCESSORS[parent.type]]


def next_covering(cov: OptimalCovering, tables: Sequence[LevelTable]) -> OptimalCovering:
    """Covering of level ``n + 1`` from level ``n`` (needs tables up to ``n + 2``).

    Children are found from the band data alone: a level ``n + 1`` band with
    an endpoint in ``R_n`` belongs to its level ``n`` parent, a type ``3``
    parent passes itself on with type ``0`` and the added level ``n + 2``
    bands belong to ``B_{code|n}``.  Words extend the parent word by the
    child type.
    """
    n = cov.level
    band_of = _band_lookup(tables)
    owner = {}
    for e in cov.entries:
        owner[e.code] = e
    entries = []
    for code in C.all_codes(n + 1):
        if is_extra(code):
            parent = owner.get(code)
            if parent is None or parent.type[0] != "3":
                raise EvolutionViolation(f"band {code} has no type-3 parent")
            t = f"0_{C.parity_letter(n + 1)}"
        else:
            parent = owner.get(code[:n])
            if parent is None:
                raise EvolutionViolation(f"band {code} has no parent at level {n}")
            t = base_type(code)
        entries.append(TypedBand(band_of(code), t, parent.word + (t,), n + 1))
    for code in C.all_codes(n + 2):
        if is_extra(code):
            parent = owner.get(code[:n])
            if parent is None:
                raise EvolutionViolation(f"type-3 band {code} has no parent at level {n}")
            t = extra_type(code, band_of)
            entries.append(TypedBand(band_of(code), t, parent.word + (t,), n + 1))
    return OptimalCovering(n + 1, _sort_entries(entries))


def build_coverings(n_max: int, tables: Sequence[LevelTable]) -> list[OptimalCovering]:
    """Coverings ``0..n_max``; ``tables`` must reach level ``n_max + 1``."""
    if len(tables) < n_max + 2:
        raise InvalidInput(f"coverings up to {n_max} need band tables up to {n_max + 1}")
    covs = [covering_zero(tables)]
    for _ in range(n_max):
        covs.append(next_covering(covs[-1], tables))
    return covs


def optimal_covering(n: int, tables: Sequence[LevelTable]) -> OptimalCovering:
    return build_coverings(n, tables)[n]


def children(tb: TypedBand, nxt: OptimalCovering) -> list[TypedBand]:
    """Entries of the next covering whose word extends ``tb.word`` by one letter."""
    kids = [e for e in nxt.entries if e.word[:-1] == tb.word]
    want = sorted(SUCCESSORS[tb.type])
    if sorted(e.type for e in kids) != want:
        raise EvolutionViolation(
            f"{tb.type} band {tb.code or '∅'} has children {[e.type for e in kids]}, expected {want}"
        )
    return kids


# -- verification ---------------------------------------------------------------------


def _name(code: str) -> str:
    return code or "∅"


def verify_covering_pair(cov: OptimalCovering, nxt: OptimalCovering, report: Report) -> None:
    """Evolution law between two consecutive coverings."""
    n = cov.level
    kids_of: dict = {}
    for e in nxt.entries:
        kids_of.setdefault(e.word[:-1], []).append(e)
    expected_count = sum(len(SUCCESSORS[e.type]) for e in cov.entries)
    report.check("count/children", len(nxt.entries) == expected_count,
                 f"level {n + 1}: {len(nxt.entries)} entries, graph predicts {expected_count}")
    parents = {}
    for parent in cov.entries:
        kids = kids_of.get(parent.word, [])
        types = sorted(k.type for k in kids)
        report.check("evolution/types", types == sorted(SUCCESSORS[parent.type]),
                     f"{parent.type} {_name(parent.code)} -> {types}")
        for k in kids:
            parents[k.code] = parents.get(k.code, 0) + 1
            label = EDGES.get((parent.type, k.type))
            report.check("evolution/labels", label is not None and k.code == parent.code + label,
                         f"{parent.type}->{k.type}: {_name(parent.code)} -> {_name(k.code)}")
            report.check("evolution/word-code", pi_star(k.word) == k.code,
                         f"{format_word(k.word)} -> {_name(k.code)}")
            report.check("evolution/inside-parent", contained(k.band, parent.band),
                         f"{_name(k.code)} not inside {_name(parent.code)}")
            if k.type[0] == "3":
                report.check("evolution/3-inside-interior",
                             parent.band.a.hi < k.band.a.lo and k.band.b.hi < parent.band.b.lo,
                             f"{_name(k.code)} touches the boundary of {_name(parent.code)}")
        for i, x in enumerate(kids):
            for y in kids[i + 1:]:
                _check_siblings(x, y, report)
        _check_coincidences(parent, kids, report)
    report.check("unique-parent", all(v == 1 for v in parents.values())
                 and len(parents) == len(nxt.entries),
                 f"level {n + 1}: parents {sorted(set(parents.values()))}")


def _check_siblings(x: TypedBand, y: TypedBand, report: Report) -> None:
    a, b = x.type, y.type
    if letter_precedes(b, a):
        x, y, a, b = y, x, b, a
    if letter_less(a, b):
        report.check("order/strong-siblings", strictly_left(x.band, y.band),
                     f"{a}<{b} but B_{_name(x.code)} not left of B_{_name(y.code)}")
    elif letter_precedes(a, b):
        report.check("order/weak-siblings", weakly_left(x.band, y.band),
                     f"{a}≺{b} but B_{_name(x.code)} not ≺ B_{_name(y.code)}")
        if not strictly_left(x.band, y.band):
            report.notes["overlaps"] = report.notes.get("overlaps", 0) + 1
    else:
        report.check("order/comparable-siblings", False, f"{a} and {b} not comparable")


def _check_coincidences(parent: TypedBand, kids: list, report: Report) -> None:
    """Endpoint identities forced by the parent type."""
    by_type = {k.type: k for k in kids}
    t = parent.type
    p = parent.band
    if t == "1_o":
        k = by_type.get("2_e")
        if k is not None:
            report.check("type-1/B0=[a,z]", same_point(k.band.a, p.a) and same_point(k.band.b, p.z),
                         _name(k.code))
    elif t == "1_e":
        k = by_type.get("2_o")
        if k is not None:
            report.check("type-1/B1=[z,b]", same_point(k.band.a, p.z) and same_point(k.band.b, p.b),
                         _name(k.code))
    elif t == "0_o":
        k = by_type.get("1_e")
        if k is not None:
            report.check("type-0/b0=z", same_point(k.band.b, p.z), _name(k.code))
    elif t == "0_e":
        k = by_type.get("1_o")
        if k is not None:
            report.check("type-0/a1=z", same_point(k.band.a, p.z), _name(k.code))
    elif t[0] == "3":
        k = by_type.get(f"0_{'e' if t[2] == 'o' else 'o'}")
        if k is not None:
            report.check("type-3/same-band", k.code == parent.code, _name(k.code))


def _check_monotone(cov: OptimalCovering, report: Report) -> None:
    for e in cov.entries:
        if e.type == "0_e":
            report.check("0-monotone", C.increasing(e.code), _name(e.code))
        elif e.type == "0_o":
            report.check("0-monotone", not C.increasing(e.code), _name(e.code))


def _check_union(cov: OptimalCovering, tables: Sequence[LevelTable], report: Report) -> None:
    """Every band of levels ``n`` and ``n + 1`` lies in a covering entry."""
    n = cov.level
    level_n = {e.code for e in cov.entries if len(e.code) == n}
    report.check("union/level-n", level_n == set(C.all_codes(n)), f"level {n}")
    by_code = cov.by_code()
    for b in tables[n + 1].bands:
        host = by_code.get(b.code) or by_code.get(b.code[:n])
        report.check("union/level-n+1", host is not None and contained(b, host.band), _name(b.code))


def verify_evolution(coverings: Sequence[OptimalCovering], tables: Sequence[LevelTable]) -> Report:
    """Graph, labels, orders and parentage across a run of coverings."""
    rep = Report(f"coverings 0..{coverings[-1].level}")
    first = coverings[0]
    rep.check("initial/types", [e.type for e in first.entries] == ["3_el", "0_e"],
              [e.type for e in first.entries])
    for cov in coverings:
        _check_monotone(cov, rep)
        _check_union(cov, tables, rep)
        words = [e.word for e in cov.entries]
        rep.check("order/entries-sorted",
                  all(compare_words(u, v) < 0 for u, v in zip(words, words[1:])), cov.level)
        for x, y in zip(cov.entries, cov.entries[1:]):
            rep.check("order/numeric-follows-words", weakly_left(x.band, y.band),
                      f"level {cov.level}: {_name(x.code)} vs {_name(y.code)}")
    for cov, nxt in zip(coverings, coverings[1:]):
        verify_covering_pair(cov, nxt, rep)
    return rep


def covering_rows(cov: OptimalCovering) -> list[dict]:
    return [e.to_json() for e in cov.entries]


def find_entry(cov: OptimalCovering, word: Sequence[str]) -> Optional[TypedBand]:
    word = tuple(word)
    for e in cov.entries:
        if e.word == word:
            return e
    return None
