from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdspectrum.dimension import (
    LIMIT_CONSTANT,
    SEED,
    balance_ratio,
    box_dimension_estimate,
    build_sns,
    dimension_lower_estimate,
    fibonacci,
    min_length_scaling,
    sns_count,
    sns_words,
    verify_sns,
)
from pdspectrum.errors import InvalidInput
from pdspectrum.symbolic import is_admissible
from pdspectrum.traces import ModelParams


def test_counts_three_ways():
    for n in range(15):
        assert len(sns_words(n)) == sns_count(n) == fibonacci(n)
    assert [fibonacci(n) for n in range(6)] == [1, 2, 3, 5, 8, 13]
    assert sns_count(20) == fibonacci(20) == 17711


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40))
def test_fibonacci_recurrence(n):
    assert sns_count(n) == sns_count(n - 1) + sns_count(n - 2)


def test_words_are_admissible_extensions_of_the_seed():
    for w in sns_words(8):
        assert w[:2] == SEED
        assert len(w) == 8 + 3
        assert is_admissible(w)
    with pytest.raises(InvalidInput):
        sns_words(-1)


def test_estimates():
    est = math.log(fibonacci(20)) / (20 * math.log(4))
    assert est == pytest.approx(0.3528, abs=1e-4)
    assert LIMIT_CONSTANT == pytest.approx(0.34712, abs=1e-5)
    assert LIMIT_CONSTANT == pytest.approx(math.log((1 + 5**0.5) / 2) / math.log(4))


def test_balance_ratio_bounded():
    for k in range(1, 15):
        assert balance_ratio(k) <= fibonacci(k) / fibonacci(k - 1) <= 2


@pytest.mark.parametrize("lam", ["0.5", "2"])
def test_sub_covering_suite(lam):
    params = ModelParams(Fraction(lam))
    levels = build_sns(8, params)
    rep = verify_sns(levels, params)
    assert rep.ok, rep.summary()
    scaled = min_length_scaling(levels)
    assert len(scaled.values) == 9
    assert scaled.constant == min(scaled.values) > 0.1
    out = dimension_lower_estimate(levels)
    assert out["count"] == fibonacci(8)
    assert 0 < out["generalized"] < 1


def test_box_dimension_estimate_is_a_number(coverings_for):
    d = box_dimension_estimate(coverings_for("2", 8))
    assert d is not None and 0 < d < 1
