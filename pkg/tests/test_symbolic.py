from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdspectrum import codes as C
from pdspectrum.coding import combinatorial_ids, verify_pi
from pdspectrum.errors import InadmissibleWord, InvalidInput, NotGapEdgeClass
from pdspectrum.symbolic import (
    BinaryCode,
    OMEGA_MAX,
    OMEGA_MIN,
    Pi,
    Pi_inverse,
    SymbolicPoint,
    admissible_words,
    cmp_weak,
    coding_of_zero,
    edge_class,
    ell,
    ell_e,
    ell_e_inverse,
    ell_inverse,
    ell_o,
    ell_o_inverse,
    eventually_periodic_points,
    ids,
    ids_of_zero,
    pi_star,
)

POINTS = list(eventually_periodic_points(9))
SP = SymbolicPoint.parse


def by_class(name):
    return [p for p in POINTS if edge_class(p) == name]


def test_ids_of_zero_values():
    assert ids_of_zero("") == Fraction(1, 2)
    assert ids_of_zero("0") == Fraction(1, 4)
    assert ids_of_zero("1") == Fraction(3, 4)
    assert ids_of_zero("01") == Fraction(3, 8)


def test_gap_pair_shares_code():
    left = SP("3_el (0_o 3_er)")
    right = SP("(0_e 3_ol)")
    assert ell(left) == right
    assert Pi(left) == Pi(right) == BinaryCode("", "01")
    assert ids(left) == Fraction(1, 3)


def test_parse_and_canonical_form():
    p = SP("3_el 0_o 3_er 0_o 3_er (0_o 3_er)")
    assert p == SP("3_el (0_o 3_er)")
    assert str(p) == "3_el (0_o 3_er)"
    with pytest.raises(InadmissibleWord):
        SP("3_el 2_e (2_e)")
    with pytest.raises(InvalidInput):
        SP("3_el (0_o 3_er) 0_o")


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(POINTS), st.sampled_from(POINTS))
def test_Pi_preserves_order(u, v):
    if cmp_weak(u, v) <= 0:
        assert Pi(u).compare(Pi(v)) <= 0


def test_Pi_collapses_exactly_gap_pairs():
    rep = verify_pi(12)
    assert rep.ok, rep.summary()
    assert rep.notes["Pi/collapsed-pairs"] > 0


@pytest.mark.parametrize("fwd, inv, src, dst", [
    (ell, ell_inverse, "E~_l", "E~_r"),
    (ell_o, ell_o_inverse, "E_l^o", "E_r^o"),
    (ell_e, ell_e_inverse, "E_r^e", "E_l^e"),
])
def test_partner_maps_are_bijections(fwd, inv, src, dst):
    domain = by_class(src)
    assert domain
    images = [fwd(p) for p in domain]
    assert all(edge_class(q) == dst for q in images)
    assert all(inv(q) == p for p, q in zip(domain, images))
    assert len(set(images)) == len(images)
    # the extreme points of the spectrum have no partner
    for q in by_class(dst):
        if q not in (OMEGA_MIN, OMEGA_MAX):
            assert fwd(inv(q)) == q


def test_partner_maps_reject_other_classes():
    with pytest.raises(NotGapEdgeClass):
        ell(SP("(0_e 3_ol)"))


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=10**4).filter(lambda q: q < 1))
def test_binary_expansion_round_trip(q):
    assert BinaryCode.from_rational(q).epsilon() == q


@settings(max_examples=100, deadline=None)
@given(st.text("01", max_size=6), st.text("01", min_size=1, max_size=6))
def test_epsilon_matches_partial_sums(pre, period):
    code = BinaryCode(pre, period)
    bits = (pre + period * 200)[:200]
    approx = sum(Fraction(int(b), 2 ** (i + 1)) for i, b in enumerate(bits))
    assert abs(code.epsilon() - approx) <= Fraction(1, 2**150)


def test_zero_codings():
    for n in range(7):
        for sigma in C.all_codes(n):
            w = coding_of_zero(sigma)
            assert edge_class(w) == ("E_l^o" if n % 2 else "E_r^e")
            assert ids(w) == ids_of_zero(sigma)
            assert w in Pi_inverse(Pi(w))


@settings(max_examples=100, deadline=None)
@given(st.text("01", max_size=7), st.integers(1, 5))
def test_zero_order_count_matches_formula(sigma, extra):
    assert combinatorial_ids(sigma, len(sigma) + extra) == ids_of_zero(sigma)


def test_zero_order_small_levels():
    assert C.sort_by_zero_order(["", "0", "1"]) == ["0", "", "1"]
    assert C.zero_precedes("01", "")
    assert not C.zero_precedes("1", "10")


def test_admissible_words_have_distinct_codes():
    for first in ("3_el", "0_e"):
        words = list(admissible_words(5, (first,)))
        assert words
        for w in words:
            assert len(w) == 6
        codes = [pi_star(w) for w in words]
        assert len(set(codes)) == len(codes)


def test_owners():
    assert C.left_owner("0110") == "01"
    assert C.right_owner("0110") == "011"
    assert C.left_owner("000") is None
    assert C.endpoint_owner("10", "left") == ""
    assert C.endpoint_owner("10", "right") == "1"
    assert C.endpoint_owner("01", "right") is None
