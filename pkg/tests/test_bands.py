from __future__ import annotations

import dataclasses
import random
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from pdspectrum import codes as C
from pdspectrum.bands import (
    BandSolver,
    LevelTable,
    build_tables,
    sign_product_check,
    strictly_left,
    verify_tables,
    zero_order_check,
)
from pdspectrum.numeric import working_precision
from pdspectrum.traces import ModelParams, eval_traces


def _close(enc, exact, tol):
    return enc.lo - tol <= exact <= enc.hi + tol


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10), max_value=6, max_denominator=20))
def test_levels_zero_and_one_closed_forms(lam):
    p = ModelParams(lam, precision_bits=128)
    t0, t1 = build_tables(1, p)
    with working_precision(160):
        L = mpfr(gmpy2.mpq(lam.numerator, lam.denominator))
        tol = mpfr(2) ** -100
        b = t0.band("")
        assert _close(b.a, L - 2, tol) and _close(b.z, L, tol) and _close(b.b, L + 2, tol)
        outer, inner, mid = gmpy2.sqrt(L * L + 4), L, gmpy2.sqrt(L * L + 2)
        b0, b1 = t1.band("0"), t1.band("1")
        assert _close(b0.a, -outer, tol) and _close(b0.b, -inner, tol) and _close(b0.z, -mid, tol)
        assert _close(b1.a, inner, tol) and _close(b1.b, outer, tol) and _close(b1.z, mid, tol)


def test_band_edges_bracket_trace_level_sets(tables_for):
    tables = tables_for("2", 8)
    for table in tables[1:]:
        n = table.level
        for b in random.Random(n).sample(table.bands, min(8, len(table.bands))):
            p = ModelParams(Fraction(2), precision_bits=b.bits + 64)

            def h(x):
                return eval_traces(x, n, p)[n]

            assert abs(h(b.a.lo)) >= 2 >= abs(h(b.a.hi))
            assert abs(h(b.b.hi)) >= 2 >= abs(h(b.b.lo))
            assert h(b.z.lo) * h(b.z.hi) <= 0
            # h_n rises across B_sigma exactly when sigma ends in 1
            assert (h(b.b.lo) > h(b.a.hi)) == C.increasing(b.code)


@pytest.mark.parametrize("lam", ["0.2", "0.5", "1", "2", "4"])
def test_structural_suite_to_level_8(lam, tables_for):
    rep = verify_tables(tables_for(lam, 8))
    assert rep.ok, rep.summary()


def test_band_solver_matches_level_tables(tables_for):
    tables = tables_for("2", 10)
    solver = BandSolver(ModelParams(Fraction(2)))
    rng = random.Random(3)
    for n in (3, 7, 10):
        for code in rng.sample(C.all_codes(n), min(12, 2**n)):
            a, b = solver.band(code), tables[n].band(code)
            assert a.z.overlaps(b.z) and a.a.overlaps(b.a) and a.b.overlaps(b.b)


def test_bands_disjoint_and_ordered(tables_for):
    for table in tables_for("0.2", 9):
        assert all(strictly_left(x, y) for x, y in zip(table.bands, table.bands[1:]))


def test_json_round_trip_is_exact(tables_for):
    table = tables_for("1", 6)[6]
    again = LevelTable.from_json(table.to_json())
    assert again.dumps() == table.dumps()
    for x, y in zip(table.bands, again.bands):
        assert x.a.lo == y.a.lo and x.z.hi == y.z.hi and x.b.lo == y.b.lo


def test_parallel_build_is_identical():
    p = ModelParams(Fraction(1, 2))
    one = build_tables(6, p, jobs=1)
    two = build_tables(6, p, jobs=2)
    assert [t.dumps() for t in one] == [t.dumps() for t in two]


def test_zero_order_against_numeric_zeros(tables_for):
    tables = tables_for("1", 6)

    def zero_of(code):
        return tables[len(code)].zero(code)

    codes = [c for n in range(7) for c in C.all_codes(n)]
    # brute force over every pair of codes up to length 6
    assert zero_order_check([(s, t) for s in codes for t in codes], zero_of)
    t2 = tables_for("2", 1)
    assert zero_order_check([("0", ""), ("", "1"), ("0", "0")], lambda c: t2[len(c)].zero(c))
    assert t2[1].zero("0").below(t2[0].zero(""))


def test_zero_order_check_detects_a_swap(tables_for):
    tables = tables_for("1", 3)
    swapped = {"0": tables[1].zero("1"), "1": tables[1].zero("0")}
    assert not zero_order_check([("0", "1")], lambda c: swapped.get(c) or tables[len(c)].zero(c))


def test_sign_products(tables_for):
    tables = tables_for("1", 5)
    for band in tables[5].bands:
        assert sign_product_check(band, Fraction(1), 3)
    t2 = tables_for("2", 1)
    assert sign_product_check(t2[1].band("0"), Fraction(2))
    assert sign_product_check(t2[1].band("1"), Fraction(2))
    # the wrong last digit is caught
    assert not sign_product_check(dataclasses.replace(t2[1].band("1"), code="0"), Fraction(2))
