"""Absorption profile, stretch, and weight-matrix tests.

The ramp antiderivative oracle is composite Gauss-Legendre on the raw
profile; the frozen dimensionless ramp integral 0.259578194187421084
was computed with 30-digit mpmath quadrature before the implementation.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmlbie.pml import (
    PmlProfile,
    complex_distance,
    curl_weights_3d,
    stretch_jacobian,
    stretch_matrix,
    zero_order_weights_2d,
    zero_order_weights_3d,
)

RAMP_UNIT = 0.259578194187421084


@pytest.fixture
def prof2():
    return PmlProfile(dim=2, a=(4.0, 4.5), thickness=(4.0, 4.0))


def gauss_panel_integral(f, lo, hi, panels=40, n=30):
    x, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(lo, hi, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        total += half * np.dot(w, f(mid + half * x))
    return total


# ---------------------------------------------------------------------------
# profile values
# ---------------------------------------------------------------------------


def test_sigma_regions(prof2):
    assert prof2.sigma(0, 0.0) == 0.0
    assert prof2.sigma(0, 3.999) == 0.0
    assert prof2.sigma(0, 4.0) == pytest.approx(0.0, abs=1e-15)
    assert prof2.sigma(0, 8.0) == pytest.approx(6.0, abs=1e-14)
    assert prof2.sigma(0, 100.0) == 6.0
    # even
    t = np.linspace(0, 12, 200)
    assert np.allclose(prof2.sigma(0, t), prof2.sigma(0, -t), atol=0)


def test_sigma_midpoint_frozen(prof2):
    got = float(prof2.sigma(0, 4.0 + 2.0))
    assert got == pytest.approx(0.534915005503240797, abs=1e-12)
    assert got == pytest.approx(0.534919, abs=1e-4)


def test_sigma_smoothness_order_at_ramp_ends(prof2):
    # the profile leaves zero like h^P at the inner edge (C^{P-1} where
    # the wave enters the layer); at the outer edge it meets the plateau
    # with a finite slope 2S/T, which is fine since the field is already
    # damped there
    h = 2e-2
    r1 = prof2.sigma(0, 4.0 + h)
    r2 = prof2.sigma(0, 4.0 + 2 * h)
    assert r2 / r1 == pytest.approx(2.0**6, rel=0.1)
    s1 = 6.0 - prof2.sigma(0, 8.0 - h)
    s2 = 6.0 - prof2.sigma(0, 8.0 - 2 * h)
    assert s2 / s1 == pytest.approx(2.0, rel=0.01)
    slope = (prof2.sigma(0, 8.0) - prof2.sigma(0, 8.0 - h)) / h
    assert slope == pytest.approx(2.0 * 6.0 / 4.0, rel=0.05)


# ---------------------------------------------------------------------------
# stretch integral
# ---------------------------------------------------------------------------


def test_ramp_integral_frozen(prof2):
    for axis in (0, 1):
        want = 6.0 * prof2.thickness[axis] * RAMP_UNIT
        assert prof2.ramp_integral(axis) == pytest.approx(want, rel=1e-13)
    # the ramp is NOT point-symmetric: its integral is far from S*T/2
    assert abs(prof2.ramp_integral(0) - 0.5 * 6.0 * 4.0) > 5.0


def test_antiderivative_against_gauss_oracle(prof2):
    rng = np.random.default_rng(3)
    pts = rng.uniform(4.0, 8.0, 25)
    f = lambda x: prof2.sigma(0, x)
    for t in pts:
        want = gauss_panel_integral(f, 4.0, t)
        got = float(prof2.sigma_integral(0, t))
        assert abs(got - want) <= 1e-13 * max(1.0, abs(want))


def test_stretch_identity_inside_box(prof2):
    rng = np.random.default_rng(5)
    x = np.column_stack(
        [rng.uniform(-4.0, 4.0, 500), rng.uniform(-4.5, 4.5, 500)]
    )
    xt = prof2.stretch(x)
    assert np.all(xt.imag == 0.0)
    assert np.all(xt.real == x)


def test_stretch_odd_and_tail(prof2):
    t = np.array([5.0, 9.0, 30.0])
    vals = prof2.sigma_integral(0, t)
    assert np.allclose(prof2.sigma_integral(0, -t), -vals, atol=0)
    # beyond the ramp the integral grows linearly with slope S
    assert vals[2] - vals[1] == pytest.approx(6.0 * 21.0, rel=1e-14)


def test_alpha_matches_sigma(prof2):
    x = np.array([[5.5, 1.0], [0.0, 9.0]])
    al = prof2.alpha(x)
    assert al[0, 0] == pytest.approx(1.0 + 1j * prof2.sigma(0, 5.5), abs=1e-15)
    assert al[0, 1] == 1.0
    assert al[1, 1] == pytest.approx(1.0 + 6.0j, abs=1e-15)


def test_disabled_profile_is_identity():
    off = PmlProfile(dim=2, a=(4.0, 4.0), thickness=(4.0, 4.0), strength=0.0)
    x = np.array([[7.3, -9.1]])
    assert np.all(off.stretch(x) == x)
    assert np.all(off.alpha(x) == 1.0)


# ---------------------------------------------------------------------------
# matrices and weights
# ---------------------------------------------------------------------------


def test_stretch_matrix_frozen_example():
    alpha = np.array([1.0 + 1.0j, 1.0 + 0.0j])
    a = stretch_matrix(alpha)
    assert a[0] == pytest.approx(1.0 / (1.0 + 1.0j), abs=1e-15)
    assert a[1] == pytest.approx(1.0 + 1.0j, abs=1e-15)
    assert stretch_jacobian(alpha) == pytest.approx(1.0 + 1.0j, abs=1e-15)


def test_stretch_matrix_3d_determinant_identity():
    rng = np.random.default_rng(9)
    alpha = 1.0 + 1j * rng.uniform(0, 6, (40, 3))
    a = stretch_matrix(alpha)
    jac = stretch_jacobian(alpha)
    # det(A) = J^{dim-2} in 3D: prod of J/alpha_i^2 = J^3/J^2 = J
    assert np.allclose(np.prod(a, axis=-1), jac, rtol=1e-13)


def test_zero_order_weights_2d_swaps_axes():
    ax = np.array([2.0 + 1j, 3.0 + 2j])
    ay = np.array([5.0 + 0j, 7.0 + 1j])
    w = zero_order_weights_2d(ax, ay)
    assert w[0] == (3.0 + 2j) * (7.0 + 1j)
    assert w[1] == (2.0 + 1j) * (5.0 + 0j)


def test_weights_3d_product_identity():
    rng = np.random.default_rng(13)
    ax = 1.0 + 1j * rng.uniform(0, 6, (20, 3))
    ay = 1.0 + 1j * rng.uniform(0, 6, (20, 3))
    cw = curl_weights_3d(ax, ay)
    zw = zero_order_weights_3d(ax, ay)
    total = np.prod(ax * ay, axis=-1, keepdims=True)
    assert np.allclose(cw * zw, total, rtol=1e-12)


def test_weights_reduce_to_identity_unstretched():
    ones = np.ones((4, 3), dtype=complex)
    assert np.allclose(curl_weights_3d(ones, ones), 1.0)
    assert np.allclose(zero_order_weights_3d(ones, ones), 1.0)
    ones2 = np.ones((4, 2), dtype=complex)
    assert np.allclose(zero_order_weights_2d(ones2, ones2), 1.0)


# ---------------------------------------------------------------------------
# complex distance
# ---------------------------------------------------------------------------


def test_complex_distance_real_reduction(prof2):
    x = np.array([[1.0, 2.0]])
    y = np.array([[-2.0, 3.5]])
    rho = complex_distance(prof2.stretch(x), prof2.stretch(y))
    assert rho[0] == pytest.approx(np.hypot(3.0, 1.5), abs=1e-14)


def test_complex_distance_bulk_properties(prof2):
    rng = np.random.default_rng(17)
    n = 100_000
    x = np.column_stack([rng.uniform(-10, 10, n), rng.uniform(-10, 10, n)])
    y = np.column_stack([rng.uniform(-10, 10, n), rng.uniform(-10, 10, n)])
    xs, ys = prof2.stretch(x), prof2.stretch(y)
    rho = complex_distance(xs, ys)
    assert np.all(rho.real >= 0.0)
    assert np.all(rho.imag >= -1e-13)
    assert np.allclose(rho, complex_distance(ys, xs), atol=0)


@settings(max_examples=100, deadline=None)
@given(st.floats(-12, 12), st.floats(-12, 12), st.floats(-12, 12), st.floats(-12, 12))
def test_complex_distance_first_quadrant(x1, x2, y1, y2):
    prof = PmlProfile(dim=2, a=(4.0, 4.5), thickness=(4.0, 4.0))
    xs = prof.stretch(np.array([[x1, x2]]))
    ys = prof.stretch(np.array([[y1, y2]]))
    rho = complex(complex_distance(xs, ys)[0])
    assert rho.real >= 0.0
    assert rho.imag >= -1e-12 * max(1.0, abs(rho))
