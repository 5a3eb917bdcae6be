"""Green function kernels on stretched coordinates, plus incident fields.

All kernels are analytic continuations of the free-space Helmholtz
kernels: a target/source pair enters only through the complexified
distance rho and through the per-axis stretch factors alpha at the two
points. Contractions below expect precomputed stretched coordinates,
so the same rho (and Green values) can be reused across kernel kinds.

Normal derivatives are stretched conormals: for a field u written in
the unstretched variables, d_nu u = sum_j [prod_{i != j} alpha_i] nu_j
(du/dxtilde_j), which reduces to the ordinary normal derivative where
the stretch is off.
"""

from __future__ import annotations

import numpy as np

from .pml import curl_weights_3d, zero_order_weights_2d, zero_order_weights_3d
from .specfun import branch_sqrt, hankel1

__all__ = [
    "green_values",
    "conormal_weights",
    "single_layer",
    "double_layer",
    "adjoint_double_layer",
    "hyper_zero_order",
    "hyper_curl_vector_3d",
    "point_source",
    "plane_wave",
    "halfplane_reference",
    "twolayer_reference",
]


def green_values(dim: int, k: float, rho: np.ndarray):
    """Outgoing Green function and its rho-derivative.

    2D: (i/4) H0(k rho), 3D: exp(ik rho)/(4 pi rho); both decay when
    Im(rho) > 0, which the branch of the complexified distance
    guarantees inside the absorbing layer.
    """
    if dim == 2:
        g = 0.25j * hankel1(0, k * rho)
        dg = -0.25j * k * hankel1(1, k * rho)
        return g, dg
    if dim == 3:
        g = np.exp(1j * k * rho) / (4.0 * np.pi * rho)
        dg = g * (1j * k - 1.0 / rho)
        return g, dg
    raise ValueError("dim must be 2 or 3")


def conormal_weights(alpha: np.ndarray) -> np.ndarray:
    """Per-axis factors prod_{i != j} alpha_i of the stretched conormal."""
    return np.prod(alpha, axis=-1, keepdims=True) / alpha


def single_layer(g: np.ndarray) -> np.ndarray:
    """Single-layer kernel: the Green function itself."""
    return g


def double_layer(dg, rho, diff, alpha_y, nu_y):
    """Conormal derivative at the source point.

    diff = xtilde - ytilde with trailing axis dim; the derivative with
    respect to ytilde flips its sign.
    """
    c = conormal_weights(alpha_y) * nu_y
    return -(dg / rho) * np.sum(c * diff, axis=-1)


def adjoint_double_layer(dg, rho, diff, alpha_x, nu_x):
    """Conormal derivative at the target point."""
    c = conormal_weights(alpha_x) * nu_x
    return (dg / rho) * np.sum(c * diff, axis=-1)


def hyper_zero_order(dim, k, g, alpha_x, alpha_y, nu_x, nu_y):
    """k^2-weighted Green term of the integrated-by-parts hypersingular.

    The diagonal pair weights reduce to nu_x . nu_y where the stretch
    is off, recovering the classical identity.
    """
    if dim == 2:
        w = zero_order_weights_2d(alpha_x, alpha_y)
    else:
        w = zero_order_weights_3d(alpha_x, alpha_y)
    return (k * k) * g * np.sum(w * nu_x * nu_y, axis=-1)


def hyper_curl_vector_3d(dg, rho, diff, alpha_x, alpha_y, nu_x):
    """Target-side vector of the surface-curl hypersingular term.

    Returns V with trailing axis 3 such that the curl part of the
    hypersingular operator applied to a density phi is the surface
    integral of V . (nu_y x Grad_surface phi). The inner gradient of
    the Green function is taken in the real target variables, so the
    target alphas appear twice in different roles.
    """
    grad = (dg / rho)[..., None] * (alpha_x * diff)
    v = np.cross(nu_x, grad)
    return curl_weights_3d(alpha_x, alpha_y) * v


# ---------------------------------------------------------------------------
# incident and reference fields (evaluated on stretched coordinates)
# ---------------------------------------------------------------------------


def point_source(dim: int, k: float, xt: np.ndarray, origin) -> tuple:
    """Field of a point source and its gradient in stretched variables.

    origin is a real point (kept unstretched); xt are stretched
    coordinates with trailing axis dim. Returns (value, gradient).
    """
    xt = np.asarray(xt)
    diff = xt - np.asarray(origin)
    rho = branch_sqrt(np.sum(diff * diff, axis=-1))
    g, dg = green_values(dim, k, rho)
    return g, (dg / rho)[..., None] * diff


def plane_wave(k: float, xt: np.ndarray, direction) -> tuple:
    """exp(ik d.x) continued to stretched coordinates; (value, gradient)."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    val = np.exp(1j * k * np.sum(xt * d, axis=-1))
    return val, 1j * k * val[..., None] * d


def halfplane_reference(k: float, xt: np.ndarray, direction, bc: str) -> tuple:
    """Plane wave plus its flat-interface reflection.

    bc = "dirichlet" gives a field vanishing on the interface plane,
    bc = "neumann" one with vanishing vertical derivative; both solve
    the constant-coefficient equation exactly, so they double as
    reference solutions for the obstacle-free configuration.
    """
    d = np.asarray(direction, dtype=float)
    mirror = d.copy()
    mirror[-1] = -mirror[-1]
    sign = {"dirichlet": -1.0, "neumann": 1.0}[bc]
    v1, g1 = plane_wave(k, xt, d)
    v2, g2 = plane_wave(k, xt, mirror)
    return v1 + sign * v2, g1 + sign * g2


def fresnel_coefficients(k1: float, k2: float, angle: float) -> tuple:
    """Flat two-layer reflection and transmission amplitudes.

    angle is measured from the downward vertical. The transmitted
    vertical wavenumber takes the nonnegative-imaginary branch, so the
    transmitted wave decays with depth past critical incidence.
    """
    xi = k1 * np.sin(angle)
    b1 = k1 * np.cos(angle)
    b2 = branch_sqrt(np.asarray(k2 * k2 - xi * xi, dtype=complex))
    r = (b1 - b2) / (b1 + b2)
    t = 2.0 * b1 / (b1 + b2)
    return complex(r), complex(t), float(xi), float(b1), complex(b2)


def twolayer_reference(
    k1: float, k2: float, xt: np.ndarray, angle: float, layer: int
) -> tuple:
    """Exact flat-interface two-layer field for a downgoing plane wave.

    layer = 1 evaluates incident plus reflected (upper medium), layer
    = 2 the transmitted wave; both continue to stretched coordinates.
    Returns (value, gradient).
    """
    r, t, xi, b1, b2 = fresnel_coefficients(k1, k2, angle)
    xt = np.asarray(xt)
    x1 = xt[..., 0]
    x2 = xt[..., 1]
    if layer == 1:
        down = np.exp(1j * (xi * x1 - b1 * x2))
        up = np.exp(1j * (xi * x1 + b1 * x2))
        val = down + r * up
        grad = np.stack(
            [1j * xi * val, -1j * b1 * down + 1j * b1 * r * up], axis=-1
        )
        return val, grad
    if layer == 2:
        val = t * np.exp(1j * (xi * x1 - b2 * x2))
        grad = np.stack([1j * xi * val, -1j * b2 * val], axis=-1)
        return val, grad
    raise ValueError("layer must be 1 or 2")
