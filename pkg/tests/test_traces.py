from __future__ import annotations

from fractions import Fraction

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdspectrum.errors import InvalidInput
from pdspectrum.traces import (
    ModelParams,
    certify_unbounded,
    eval_traces,
    fundamental_residual,
    fundamental_scale,
    iter_substitution_word,
    substitution_word,
    transfer_trace,
    verify_traces,
)

lams = st.fractions(min_value=Fraction(1, 10), max_value=5, max_denominator=64)
energies = st.fractions(min_value=-8, max_value=8, max_denominator=1024)


def exact_trace(E: Fraction, lam: Fraction, n: int) -> Fraction:
    """Trace over the substitution word with exact 2x2 products."""
    m = ((1, 0), (0, 1))
    for c in substitution_word(n):
        v = lam if c == "a" else -lam
        t = ((E - v, -1), (1, 0))
        m = tuple(tuple(sum(t[i][k] * m[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    return m[0][0] + m[1][1]


def test_closed_forms_low_levels():
    p = ModelParams(Fraction(2), precision_bits=128)
    hs = eval_traces(Fraction(3), 3, p).values
    assert hs[0] == 1
    assert hs[1] == 9 - 4 - 2
    assert hs[2] == hs[1] * (hs[0] ** 2 - 2) - 2
    assert hs[3] == hs[2] * (hs[1] ** 2 - 2) - 2


@settings(max_examples=60, deadline=None)
@given(lam=lams, E=energies, n=st.integers(0, 7))
def test_recurrence_matches_exact_products(lam, E, n):
    want = exact_trace(E, lam, n)
    got = eval_traces(E, n, ModelParams(lam, precision_bits=256))[n]
    err = abs(Fraction(*gmpy2.mpq(got).as_integer_ratio()) - want)
    assert err <= (abs(want) + 1) * Fraction(1, 2**200)


@settings(max_examples=40, deadline=None)
@given(lam=lams, E=energies, n=st.integers(0, 10))
def test_transfer_product_matches_recurrence(lam, E, n):
    p = ModelParams(lam)
    h = eval_traces(E, n, p)[n]
    t = transfer_trace(E, n, p)
    assert abs(t - h) <= 2 ** -(p.bits(n) // 2) * max(abs(h), 1)


@settings(max_examples=60, deadline=None)
@given(lam=lams, E=energies, n=st.integers(0, 12))
def test_fundamental_identity(lam, E, n):
    p = ModelParams(lam)
    r = fundamental_residual(E, n, p)
    assert abs(r) <= 2 ** -(p.bits(n + 1) // 2) * fundamental_scale(E, n, p)


def test_substitution_words():
    assert substitution_word(0) == "a"
    assert substitution_word(1) == "ab"
    assert substitution_word(2) == "abaa"
    assert substitution_word(3) == "abaaabab"
    for n in range(10):
        w = substitution_word(n)
        assert len(w) == 2**n
        assert w[: 2 ** (n - 1) if n else 1] == substitution_word(n - 1 if n else 0)
    assert "".join(iter_substitution_word(6)) == substitution_word(6)


def test_streamed_word_beyond_limit_is_consistent():
    it = iter_substitution_word(23)
    head = "".join(next(it) for _ in range(4096))
    assert head == substitution_word(12)
    with pytest.raises(InvalidInput):
        substitution_word(23)


def test_params_validation():
    with pytest.raises(InvalidInput):
        ModelParams(Fraction(0))
    with pytest.raises(InvalidInput):
        ModelParams(Fraction(1), precision_bits=20)
    with pytest.raises(InvalidInput):
        ModelParams(Fraction(1)).check_level(25)
    assert ModelParams(Fraction(1, 5)).lam_text == "0.2"
    assert ModelParams(Fraction(1, 3)).lam_text == "1/3"


def test_divergence_certificate():
    p = ModelParams(Fraction(2))
    cert = certify_unbounded(Fraction(5), 20, p)
    assert cert is not None and cert.n0 == 0
    # the zero of h_0 sits in the spectrum; its orbit ends in the fixed tail
    assert certify_unbounded(Fraction(2), 20, p) is None


def test_verify_traces_suite():
    for lam in ("0.2", "4"):
        rep = verify_traces(ModelParams(Fraction(lam)), 10, samples=30)
        assert rep.ok, rep.summary()
