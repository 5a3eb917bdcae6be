"""Quadrature, interpolation, and graded-map tests.

Integration oracles use Gauss-Legendre rules from numpy.polynomial,
which share no code with the Fejér construction under test.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmlbie.cheb import (
    cardinal_derivative_matrix,
    cardinal_matrix,
    cheb_nodes,
    cubic_blend,
    diff_matrix,
    fejer_weights,
    graded_map,
    window_blend,
)


def gauss_integral(f, n=80):
    x, w = np.polynomial.legendre.leggauss(n)
    return np.dot(w, f(x))


# ---------------------------------------------------------------------------
# nodes and weights
# ---------------------------------------------------------------------------


def test_nodes_order_and_range():
    u = cheb_nodes(17)
    assert np.all(np.diff(u) < 0)
    assert np.all(np.abs(u) < 1.0)
    assert u[0] == pytest.approx(np.cos(np.pi / 34), abs=1e-15)


def test_fejer_frozen_small_rules():
    u1, w1 = cheb_nodes(1), fejer_weights(1)
    assert u1[0] == pytest.approx(0.0, abs=1e-16)
    assert w1[0] == pytest.approx(2.0, abs=1e-15)
    u2, w2 = cheb_nodes(2), fejer_weights(2)
    assert np.allclose(u2, [np.cos(np.pi / 4), -np.cos(np.pi / 4)], atol=1e-15)
    assert np.allclose(w2, [1.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13, 21, 40])
def test_fejer_polynomial_exactness(n):
    # exact for degree <= n-1; monomial integrals have closed forms
    u, w = cheb_nodes(n), fejer_weights(n)
    for deg in range(n):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert abs(np.dot(w, u**deg) - exact) < 1e-14


def test_fejer_against_gauss_oracle():
    f = lambda x: np.exp(x) * np.cos(3 * x)
    u, w = cheb_nodes(48), fejer_weights(48)
    assert abs(np.dot(w, f(u)) - gauss_integral(f)) < 1e-13


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 512))
def test_fejer_positivity(n):
    w = fejer_weights(n)
    assert np.all(w > 0.0)
    assert abs(w.sum() - 2.0) < 1e-12


# ---------------------------------------------------------------------------
# cardinal interpolation
# ---------------------------------------------------------------------------


def test_cardinal_delta_property():
    n = 8
    a = cardinal_matrix(n, cheb_nodes(n))
    assert np.max(np.abs(a - np.eye(n))) < 1e-12


def test_cardinal_partition_of_unity():
    u = np.linspace(-1, 1, 101)
    a = cardinal_matrix(9, u)
    assert np.max(np.abs(a.sum(axis=1) - 1.0)) < 1e-12


def test_interpolation_of_smooth_surface_function():
    # tensor-product interpolation of cos(3u) sin(2v) at n = 16
    n = 16
    un = cheb_nodes(n)
    vals = np.outer(np.cos(3 * un), np.sin(2 * un))
    ue = np.linspace(-1, 1, 37)
    a = cardinal_matrix(n, ue)
    got = a @ vals @ a.T
    want = np.outer(np.cos(3 * ue), np.sin(2 * ue))
    assert np.max(np.abs(got - want)) < 1e-9


def test_interpolation_off_nodes_polynomial_exact():
    n = 10
    coeffs = np.array([0.3, -1.2, 0.7, 0.05, -0.4])
    un = cheb_nodes(n)
    ue = np.linspace(-1, 1, 23)
    vals = np.polyval(coeffs, un)
    got = cardinal_matrix(n, ue) @ vals
    assert np.max(np.abs(got - np.polyval(coeffs, ue))) < 1e-13


# ---------------------------------------------------------------------------
# differentiation
# ---------------------------------------------------------------------------


def test_diff_polynomial_exactness():
    n = 12
    d = diff_matrix(n)
    u = cheb_nodes(n)
    for deg in range(n - 1):
        got = d @ u**deg
        want = deg * u ** max(deg - 1, 0) if deg else np.zeros(n)
        assert np.max(np.abs(got - want)) < 1e-12


def test_diff_trig_accuracy():
    n = 24
    u = cheb_nodes(n)
    got = diff_matrix(n) @ np.sin(2 * u)
    assert np.max(np.abs(got - 2 * np.cos(2 * u))) < 1e-8


def test_cardinal_derivative_endpoint_limit():
    # evaluation exactly at u = 1 exercises the sin(theta) -> 0 limit
    n = 9
    d = cardinal_derivative_matrix(n, np.array([1.0, -1.0]))
    u = cheb_nodes(n)
    got = d @ u**3
    assert np.allclose(got, [3.0, 3.0], atol=1e-11)


# ---------------------------------------------------------------------------
# graded maps
# ---------------------------------------------------------------------------


def test_cubic_blend_frozen():
    v, d = cubic_blend(0.0, 6)
    assert v == pytest.approx(0.5, abs=1e-16)
    assert d == pytest.approx(1.0 / 6.0, abs=1e-16)
    v1, _ = cubic_blend(1.0, 6)
    v0, _ = cubic_blend(-1.0, 6)
    assert v1 == pytest.approx(1.0, abs=1e-15)
    assert v0 == pytest.approx(0.0, abs=1e-15)


def test_window_blend_frozen_half_point():
    # closed form at s = 1/2, p = 6: e = 5/8, value (a-b)/(a+b) with
    # a = (5/8)^6, b = (3/8)^6, i.e. 7448/8177
    want = float(Fraction(14896, 16354))
    v, _ = window_blend(0.5, 6)
    assert v == pytest.approx(want, abs=1e-14)
    assert v == pytest.approx(0.910847, abs=1e-6)


def test_window_blend_flat_ends():
    for s0 in (-1.0, 1.0):
        _, d = window_blend(s0, 6)
        assert abs(d) < 1e-14
        offsets = np.array([1e-2, 2e-2])
        _, d2 = window_blend(s0 - np.sign(s0) * offsets, 6)
        # derivative grows like |s - s0|^(p-1): ratio ~ 2^5
        assert d2[1] / d2[0] == pytest.approx(2.0**5, rel=0.2)


@pytest.mark.parametrize("alpha", [-1.0, -0.63, 0.0, 0.2871, 1.0])
def test_graded_map_endpoints_and_fd(alpha):
    p = 6
    t = np.linspace(-1, 1, 41)
    xi, dxi = graded_map(alpha, p, t)
    assert xi[0] == pytest.approx(-1.0, abs=1e-14)
    assert xi[-1] == pytest.approx(1.0, abs=1e-14)
    h = 1e-6
    xp, _ = graded_map(alpha, p, np.clip(t + h, -1, 1))
    xm, _ = graded_map(alpha, p, np.clip(t - h, -1, 1))
    interior = (np.abs(t) < 1 - 2 * h) & (np.abs(t) > 2 * h)
    fd = (xp[interior] - xm[interior]) / (2 * h)
    assert np.max(np.abs(fd - dxi[interior])) < 1e-6


def test_graded_map_hits_center():
    xi, dxi = graded_map(0.37, 6, np.array([0.0]))
    assert xi[0] == pytest.approx(0.37, abs=1e-15)
    assert dxi[0] == 0.0


def test_graded_map_flatness_order():
    # near the clustering parameter the derivative scales like t^(p-1)
    p = 6
    _, d1 = graded_map(0.0, p, np.array([1e-2]))
    _, d2 = graded_map(0.0, p, np.array([2e-2]))
    assert d2[0] / d1[0] == pytest.approx(2.0 ** (p - 1), rel=0.1)


@settings(max_examples=80, deadline=None)
@given(
    st.floats(-1.0, 1.0),
    st.integers(2, 10),
)
def test_graded_map_monotone(alpha, p):
    t = np.linspace(-1, 1, 201)
    xi, dxi = graded_map(alpha, p, t)
    assert np.all(np.diff(xi) >= -1e-15)
    assert np.all(dxi >= -1e-15)
    assert np.all((xi >= -1 - 1e-12) & (xi <= 1 + 1e-12))


def test_graded_map_even_rule_avoids_center():
    # an even number of Fejér nodes never lands on t = 0, so composed
    # quadrature never evaluates at the singular parameter
    t = cheb_nodes(200)
    assert np.all(np.abs(t) > 1e-8)
    xi, _ = graded_map(0.5, 6, t)
    assert np.all(np.abs(xi - 0.5) > 1e-17)
