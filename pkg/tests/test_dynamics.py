from __future__ import annotations

import math
import random
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from pdspectrum.dynamics import (
    PlanePoint,
    a_one,
    box_diameters,
    classify_orbit,
    d_status,
    escape_check,
    f_map,
    fixed_points,
    g_map,
    in_U,
    infinity_profile,
    jacobian,
    jacobian_det,
    sample_D,
    verify_contraction,
    vertices,
)
from pdspectrum.errors import InvalidInput
from pdspectrum.numeric import working_precision
from pdspectrum.traces import ModelParams

# box diagonal of g^8(D), frozen from the float oracle below; convergence toward
# F is only polynomial because Df(F) has the eigenvalue 1
BOX_DIAMETER_8 = 0.08339462376711479


def g_float(x, y):
    y0 = -math.sqrt(2 + (2 + y) / x)
    return -math.sqrt(2 + (2 + x) / y0), y0


def float_box_diameters(n):
    r2 = math.sqrt(2)
    a, b, c = (-r2, -r2), (-r2, 0.0), (-math.sqrt(2 - r2), -r2)
    out = []
    for _ in range(n + 1):
        out.append(math.hypot(c[0] - a[0], b[1] - a[1]))
        a, b, c = g_float(*a), g_float(*b), g_float(*c)
    return out


def test_fixed_points():
    with working_precision(128):
        for p in fixed_points():
            assert f_map(p).dist(p) < mpfr(10) ** -25


def test_vertex_images():
    with working_precision(128):
        v = vertices()
        tol = mpfr(10) ** -30
        assert f_map(v["B"]).dist(PlanePoint.of(-2, 2)) < tol
        assert f_map(v["C"]).dist(PlanePoint.of(0, -2)) < tol
        assert g_map(v["A"]).dist(a_one()) < tol


coords = st.floats(min_value=-3, max_value=-0.01, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(coords, coords)
def test_inverse_undoes_forward_map(x, y):
    with working_precision(128):
        p = PlanePoint.of(x, y)
        assume(in_U(p))
        assert g_map(f_map(p)).dist(p) < mpfr(2) ** -60


@settings(max_examples=100, deadline=None)
@given(st.floats(-2.5, 2.5), st.floats(-2.5, 2.5))
def test_jacobian_against_differences(x, y):
    with working_precision(160):
        p = PlanePoint.of(x, y)
        h = mpfr(2) ** -50
        (a, b), (c, d) = jacobian(p)
        fx = f_map(PlanePoint(p.x + h, p.y))
        fy = f_map(PlanePoint(p.x, p.y + h))
        f0 = f_map(p)
        tol = mpfr(2) ** -40 * (1 + abs(a) + abs(b) + abs(c) + abs(d))
        assert abs((fx.x - f0.x) / h - a) < tol and abs((fx.y - f0.y) / h - c) < tol
        assert abs((fy.x - f0.x) / h - b) < tol and abs((fy.y - f0.y) / h - d) < tol
        assert abs(a * d - b * c - jacobian_det(p)) < tol * (1 + abs(a * d))


def test_neutral_eigenvalue_at_F():
    with working_precision(128):
        (a, b), (c, d) = jacobian(PlanePoint.of(-1, -1))
        assert (a, b, c, d) == (2, -1, -2, 3)
        # eigenvalues 4 and 1
        assert a + d == 5 and a * d - b * c == 4


def test_inverse_refuses_points_outside_its_domain():
    with pytest.raises(InvalidInput):
        g_map(PlanePoint.of(1, 1))


def test_region_membership():
    with working_precision(128):
        v = vertices()
        assert d_status(PlanePoint.of(-1.2, -1.2)) == "inside"
        assert d_status(PlanePoint.of(-1, -1.000001)) == "inside"
        assert d_status(PlanePoint.of(-1, -0.999999)) == "outside"
        assert d_status(v["C"], mpfr(2) ** -100) == "boundary"


def test_box_diameters_two_routes_and_baseline():
    exact = box_diameters(12)
    oracle = float_box_diameters(12)
    assert all(abs(p - q) < 1e-12 for p, q in zip(exact, oracle))
    assert exact[8] == pytest.approx(BOX_DIAMETER_8, abs=1e-15)
    assert all(p > q for p, q in zip(exact, exact[1:]))


def test_contraction_suite():
    rep = verify_contraction(n_steps=8, density=16, samples=120)
    assert rep.ok, rep.summary()


def test_escape_from_region():
    rng = random.Random(11)
    with working_precision(128):
        F = PlanePoint.of(-1, -1)
        pts = [p for p in sample_D(rng, 300) if p.dist(F) >= mpfr(10) ** -3]
        steps = [escape_check(p) for p in pts]
    assert all(s is not None for s in steps)
    assert escape_check(vertices()["A"]) == 1
    assert escape_check(F, horizon=100) is None


def test_orbit_classes():
    p = ModelParams(Fraction(2))
    assert classify_orbit(Fraction(2), 10, p).status == "zero-tail"
    rec = classify_orbit(Fraction(5), 10, p)
    assert rec.status == "certified-unbounded" and rec.detail["n0"] == 0
    assert classify_orbit(Fraction(1, 2), 12, p).status == "certified-unbounded"


def test_infinity_profile_of_a_synthetic_orbit():
    hs = [mpfr(v) for v in (-1.0, -1.0, 1.5, 3.0, 1.42, 9.0, 1.414, 70.0)]
    prof = infinity_profile(hs, window=3)
    assert prof["last_even_index"] == 6
    assert prof["odd_monotone"]
    assert prof["even_gap_to_sqrt2"] < 1e-3
