from __future__ import annotations

from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from pdspectrum.bands import BandSolver
from pdspectrum.coding import (
    SymbolicPoint,
    certified_count,
    check_gaps,
    code_of_energy,
    enumerate_gaps,
    extreme_extension,
    floquet_count,
    floquet_count_direct,
    ids,
    in_eps_Pi_F,
    in_third_dyadics,
    is_dyadic,
    pi_numeric,
    verify_ids,
    word_band,
)
from pdspectrum.errors import PrecisionExhausted
from pdspectrum.numeric import to_mpfr, working_precision
from pdspectrum.report import Report
from pdspectrum.symbolic import admissible_words, eventually_periodic_points, edge_class
from pdspectrum.traces import ModelParams

SP = SymbolicPoint.parse


@settings(max_examples=40, deadline=None)
@given(
    lam=st.sampled_from([Fraction(1, 5), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)]),
    m=st.integers(2, 9),
    E=st.fractions(min_value=-9, max_value=9, max_denominator=997),
)
def test_block_count_matches_site_by_site_count(lam, m, E):
    # an irrational nudge keeps clear of exactly singular sub-chains
    with working_precision(512):
        x = to_mpfr(E) + gmpy2.sqrt(mpfr(2)) * mpfr(2) ** -40
        assert floquet_count(lam, m, x, 256) == floquet_count_direct(lam, m, x, 512)


def test_count_refuses_singular_subchain():
    with pytest.raises(PrecisionExhausted):
        floquet_count(Fraction(2), 5, Fraction(2), 128)


def test_count_extremes():
    for m in (2, 5, 9):
        assert floquet_count(Fraction(2), m, -20, 128) == 0
        assert floquet_count(Fraction(2), m, 20, 128) == 2**m


def test_certified_count_at_a_zero(tables_for):
    tables = tables_for("2", 4)
    z = tables[3].zero("010")
    n = certified_count(Fraction(2), 9, "010", z, 256)
    assert Fraction(n, 2**9) == Fraction(0b010, 8) + Fraction(1, 16)


def test_gap_labels_at_low_depth(coverings_for, tables_for):
    covs = coverings_for("2", 2)
    d0 = enumerate_gaps(0, covs)
    assert [(g.kind, g.label) for g in d0] == [("II", Fraction(1, 3))]
    d1 = enumerate_gaps(1, covs)
    assert [(g.kind, g.label) for g in d1] == [
        ("II", Fraction(1, 3)), ("I_e", Fraction(1, 2)), ("II", Fraction(5, 6))]
    d2 = enumerate_gaps(2, covs)
    assert ("I_o", Fraction(1, 4)) in [(g.kind, g.label) for g in d2]
    quarter = next(g for g in d2 if g.label == Fraction(1, 4))
    # the left edge of that gap is z_0 = -sqrt(6)
    z0 = tables_for("2", 1)[1].zero("0")
    assert quarter.left_band.overlaps(z0) and quarter.inner.lo >= z0.lo


@pytest.mark.parametrize("lam", ["0.5", "1", "4"])
def test_gap_suite(lam, coverings_for, tables_for):
    covs = coverings_for(lam, 8)
    tables = tables_for(lam, 9)
    rep = Report()
    for d in range(9):
        check_gaps(enumerate_gaps(d, covs), tables, rep)
    assert rep.ok, rep.summary()


def test_label_sets():
    assert is_dyadic(Fraction(3, 8)) and not is_dyadic(Fraction(1, 3))
    assert in_third_dyadics(Fraction(1, 3)) and in_third_dyadics(Fraction(5, 6))
    assert not in_third_dyadics(Fraction(1, 2)) and not in_third_dyadics(Fraction(1, 5))


def test_F_labels_from_explicit_words():
    f_words = [p for p in eventually_periodic_points(9) if edge_class(p) == "F"]
    assert f_words
    for w in f_words:
        assert in_eps_Pi_F(ids(w))
    assert ids(SP("0_e 1_o (2_e 2_o)")) == Fraction(2, 3)
    assert not in_eps_Pi_F(Fraction(1, 3))


def test_extreme_extensions():
    assert extreme_extension(("0_e",), True) == SP("(0_e 3_or)")
    assert extreme_extension(("3_el",), False) == SP("(3_el 0_o)")
    assert extreme_extension(("0_e", "1_o"), False) == SP("0_e (1_o 2_e)")


def test_word_bands_nest_and_locate_energies(coverings_for):
    covs = coverings_for("2", 6)
    solver = BandSolver(ModelParams(Fraction(2)))
    for w in list(admissible_words(4))[::5]:
        a = word_band(w, covs)
        b = word_band(w, solver)
        assert a.z.overlaps(b.z)
        assert w in code_of_energy(a.z.mid, 4, covs)
    omega = SP("0_e 1_o (2_e 2_o)")
    outer, inner = pi_numeric(omega, 3, covs), pi_numeric(omega, 6, covs)
    assert outer.lo <= inner.lo and inner.hi <= outer.hi
    # energies in the big gap around 1/3 meet no band
    assert code_of_energy(Fraction(1, 4), 3, covs) == []


def test_ids_routes_small(tables_for):
    rep = verify_ids(tables_for("1", 6), 6)
    assert rep.ok, rep.summary()
