"""Chebyshev interpolation, Fejér quadrature, and graded parameter maps.

The discretization places first-kind Chebyshev points on every patch,
integrates smooth patch integrals with the matching Fejér rule, and
re-expands densities through the cardinal (Lagrange) basis when a
target point sits close to a source patch. Graded maps concentrate
quadrature nodes around a near-singularity or a geometric corner while
keeping the composite parameterization smooth to a chosen order.

All maps live on the reference interval [-1, 1].
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "cheb_nodes",
    "fejer_weights",
    "cardinal_matrix",
    "cardinal_derivative_matrix",
    "diff_matrix",
    "cubic_blend",
    "window_blend",
    "graded_map",
]


def cheb_nodes(n: int) -> np.ndarray:
    """First-kind Chebyshev points cos((2j+1)pi/(2n)), j = 0..n-1.

    Returned in the natural (strictly decreasing) order; none of them
    touch the interval endpoints.
    """
    if n < 1:
        raise ValueError("need at least one node")
    j = np.arange(n)
    return np.cos((2 * j + 1) * np.pi / (2 * n))


def fejer_weights(n: int) -> np.ndarray:
    """Fejér first-rule weights for the nodes of :func:`cheb_nodes`.

    Exact for polynomials of degree <= n-1 on [-1, 1]; all weights are
    positive.
    """
    if n < 1:
        raise ValueError("need at least one node")
    theta = (2 * np.arange(n) + 1) * np.pi / (2 * n)
    ell = np.arange(1, n // 2 + 1)
    if ell.size:
        corr = np.cos(2.0 * np.outer(theta, ell)) / (4.0 * ell**2 - 1.0)
        return (2.0 / n) * (1.0 - 2.0 * corr.sum(axis=1))
    return (2.0 / n) * np.ones(n)


def _cos_basis(u: np.ndarray, n: int) -> np.ndarray:
    """T_m(u) for m = 0..n-1, shape (len(u), n); |u| <= 1 required."""
    theta = np.arccos(np.clip(u, -1.0, 1.0))
    return np.cos(np.outer(theta, np.arange(n)))


def cardinal_matrix(n: int, u_eval: np.ndarray) -> np.ndarray:
    """Lagrange cardinal functions of the n Chebyshev nodes.

    Row e, column i holds a_i(u_eval[e]) where a_i is the unique
    degree-(n-1) polynomial with a_i(u_j) = delta_ij at the first-kind
    nodes. Built from the discrete orthogonality of T_m at those nodes,
    so no product formulas or barycentric weights are needed.
    """
    u_eval = np.atleast_1d(np.asarray(u_eval, dtype=float))
    scale = np.full(n, 2.0 / n)
    scale[0] = 1.0 / n
    t_nodes = _cos_basis(cheb_nodes(n), n)  # (n, n)
    t_eval = _cos_basis(u_eval, n)  # (e, n)
    return (t_eval * scale) @ t_nodes.T


def cardinal_derivative_matrix(n: int, u_eval: np.ndarray) -> np.ndarray:
    """d a_i/du evaluated at u_eval (same layout as cardinal_matrix).

    Uses T_m'(u) = m sin(m theta)/sin(theta); evaluation points at the
    interval ends fall back to the polynomial limit m^2 * (+-1)^(m+1).
    """
    u_eval = np.atleast_1d(np.asarray(u_eval, dtype=float))
    m = np.arange(n)
    theta = np.arccos(np.clip(u_eval, -1.0, 1.0))
    sin_t = np.sin(theta)
    interior = sin_t > 1e-12
    dt = np.empty((u_eval.size, n))
    with np.errstate(invalid="ignore", divide="ignore"):
        dt[interior] = (
            m * np.sin(np.outer(theta[interior], m))
        ) / sin_t[interior, None]
    if np.any(~interior):
        sgn = np.where(u_eval[~interior] > 0.0, 1.0, -1.0)
        dt[~interior] = m**2 * sgn[:, None] ** (m + 1)
    scale = np.full(n, 2.0 / n)
    scale[0] = 1.0 / n
    t_nodes = _cos_basis(cheb_nodes(n), n)
    return (dt * scale) @ t_nodes.T


def diff_matrix(n: int) -> np.ndarray:
    """Spectral differentiation at the Chebyshev nodes themselves."""
    return cardinal_derivative_matrix(n, cheb_nodes(n))


# ---------------------------------------------------------------------------
# graded maps
# ---------------------------------------------------------------------------


def cubic_blend(s, p: int):
    """Monotone cubic ramp on [-1, 1] with blend(-1) = 0, blend(1) = 1.

    Returns (value, derivative). The parameter p sets the endpoint
    slope 1/p; p >= 2.
    """
    s = np.asarray(s, dtype=float)
    c = 0.5 - 1.0 / p
    val = c * s**3 + s / p + 0.5
    der = 3.0 * c * s**2 + 1.0 / p
    return val, der


def window_blend(s, p: int):
    """Smoothed odd window on [-1, 1], flat to order p-1 at both ends.

    w(s) = 2 e(s)^p / (e(s)^p + e(-s)^p) - 1 with e = cubic_blend(., p),
    using e(-s) = 1 - e(s). Returns (value, derivative); w(-1) = -1,
    w(0) = 0, w(1) = 1, and the first p-1 derivatives vanish at s = +-1.
    """
    s = np.asarray(s, dtype=float)
    e, ed = cubic_blend(s, p)
    eb, ebd = cubic_blend(-s, p)
    a = e**p
    b = eb**p
    denom = a + b
    val = 2.0 * a / denom - 1.0
    # chain rule: d/ds e(-s)^p = -p e(-s)^{p-1} e'(-s); the minus signs
    # combine into the symmetric product below
    num = e ** (p - 1) * eb ** (p - 1) * (ed * eb + e * ebd)
    der = 2.0 * p * num / denom**2
    return val, der


def graded_map(alpha: float, p: int, t):
    """Reparameterization of [-1, 1] clustering nodes around alpha.

    The map fixes -1, +1, and sends t = 0 to alpha when alpha is
    interior (with derivative vanishing to order p-1 there); for
    alpha = +-1 it instead flattens at that endpoint and stays regular
    at the other. Plain Fejér quadrature of a composed integrand then
    converges at high order despite a kernel singularity or geometric
    corner at the parameter alpha. Returns (xi, dxi/dt).
    """
    if not -1.0 <= alpha <= 1.0:
        raise ValueError("grading center must lie in [-1, 1]")
    t = np.asarray(t, dtype=float)
    if alpha >= 1.0 - 1e-13:
        w, wd = window_blend(0.5 * (t + 1.0), p)
        return -1.0 + 2.0 * w, wd
    if alpha <= -1.0 + 1e-13:
        w, wd = window_blend(0.5 * (1.0 - t), p)
        return 1.0 - 2.0 * w, wd
    sgn = np.sign(t)
    w, wd = window_blend(1.0 - np.abs(t), p)
    xi = sgn - (sgn - alpha) * w
    dxi = sgn * (sgn - alpha) * wd
    # sign(0) = 0 still gives xi(0) = alpha exactly since w(1) = 1;
    # the derivative limit at t = 0 is 0 (order p-1 flatness)
    dxi = np.where(t == 0.0, 0.0, dxi)
    return xi, dxi
