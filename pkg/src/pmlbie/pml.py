"""Complex coordinate stretch for absorbing layers.

Each axis i carries an even absorption profile sigma_i that vanishes on
(-a_i, a_i), ramps smoothly (C^{P-1}) up to the strength S across a
layer of thickness T_i, and stays at S beyond. The stretched coordinate

    xt_i = x_i + i * integral_0^{x_i} sigma_i(t) dt

turns outgoing waves into exponentially decaying ones inside the layer
while leaving everything inside the box B_a = prod (-a_i, a_i) exactly
untouched. The ramp's antiderivative has no closed form; it is
precomputed once per profile as a Chebyshev expansion of the
dimensionless ramp and reused for every node.

Derived quantities used by the integral operators:

    alpha_i(x_i)   = 1 + i sigma_i(x_i)          (d xt_i / d x_i)
    stretch_jacobian = prod_i alpha_i
    stretch_matrix   = diag(prod_{j != i} alpha_j / alpha_i)
    complex_distance = branch_sqrt( sum_i (xt_i - yt_i)^2 )

and the weight diagonals entering the regularized hypersingular
operator (zero_order_weights_*, curl_weights_3d).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cheb import window_blend
from .specfun import branch_sqrt

__all__ = [
    "PmlProfile",
    "complex_distance",
    "stretch_matrix",
    "stretch_jacobian",
    "zero_order_weights_2d",
    "curl_weights_3d",
    "zero_order_weights_3d",
]

_RAMP_DEGREE = 96


def _ramp_antiderivative_coeffs(strength_order: int, degree: int = _RAMP_DEGREE):
    """Chebyshev coefficients of s -> integral_{-1}^{s} sigma_hat on [-1, 0].

    sigma_hat(s) = 1 + window_blend(s) is the unit-strength ramp in the
    dimensionless layer coordinate s = (x - a - T)/T in [-1, 0]. The
    integrand is expanded at Chebyshev-Lobatto points of [-1, 0] and
    integrated coefficient-wise, Clenshaw-Curtis style.
    """
    j = np.arange(degree + 1)
    u = np.cos(np.pi * j / degree)  # Lobatto points of [-1, 1]
    s = 0.5 * (u - 1.0)  # mapped to [-1, 0]
    w, _ = window_blend(s, strength_order)
    vals = 1.0 + w
    # values -> Chebyshev coefficients (type-I DCT written out)
    theta = np.pi * j / degree
    basis = np.cos(np.outer(j, theta))
    weights = np.full(degree + 1, 2.0 / degree)
    weights[0] = weights[-1] = 1.0 / degree
    coeffs = basis @ (vals * weights)
    coeffs[0] *= 0.5
    coeffs[-1] *= 0.5
    # antiderivative recurrence on [-1, 1], then scaled by ds/du = 1/2
    anti = np.zeros(degree + 2)
    anti[1] = coeffs[0] - 0.5 * coeffs[2]
    for m in range(2, degree + 1):
        hi = coeffs[m + 1] if m + 1 <= degree else 0.0
        anti[m] = (coeffs[m - 1] - hi) / (2.0 * m)
    anti[degree + 1] = coeffs[degree] / (2.0 * (degree + 1))
    anti *= 0.5
    # integration constant: the accumulated integral vanishes at s = -1
    anti[0] -= _clenshaw(anti, np.array([-1.0]))[0]
    return anti


def _clenshaw(coeffs: np.ndarray, u: np.ndarray) -> np.ndarray:
    b1 = np.zeros_like(u)
    b2 = np.zeros_like(u)
    for c in coeffs[:0:-1]:
        b1, b2 = 2.0 * u * b1 - b2 + c, b1
    return u * b1 - b2 + coeffs[0]


@dataclass(frozen=True)
class PmlProfile:
    """Absorbing-layer description for one scene.

    Parameters
    ----------
    dim : 2 or 3.
    a : per-axis half-widths of the untouched box B_a.
    thickness : per-axis layer thicknesses T_i.
    strength : plateau value S of the profile (S = 0 disables the
        stretch entirely).
    order : smoothness order P; the profile is C^{P-1} at both ramp
        ends.
    """

    dim: int
    a: tuple
    thickness: tuple
    strength: float = 6.0
    order: int = 6
    _anti: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if len(self.a) != self.dim or len(self.thickness) != self.dim:
            raise ValueError("a and thickness must have one entry per axis")
        if min(self.a) <= 0 or min(self.thickness) <= 0:
            raise ValueError("box half-widths and thicknesses must be positive")
        if self.strength < 0:
            raise ValueError("strength must be nonnegative")
        object.__setattr__(
            self, "_anti", _ramp_antiderivative_coeffs(self.order)
        )

    # -- scalar profile ----------------------------------------------------

    def sigma(self, axis: int, t) -> np.ndarray:
        """Absorption sigma_axis(t); even, zero on (-a, a), S beyond a+T."""
        t = np.asarray(t, dtype=float)
        a = self.a[axis]
        full = a + self.thickness[axis]
        r = np.abs(t)
        sbar = np.clip((r - full) / self.thickness[axis], -1.0, 0.0)
        w, _ = window_blend(sbar, self.order)
        ramp = self.strength * (1.0 + w)
        out = np.where(r >= full, self.strength, np.where(r <= a, 0.0, ramp))
        return out

    def sigma_integral(self, axis: int, t) -> np.ndarray:
        """integral_0^t sigma_axis; odd in t, zero on [-a, a]."""
        t = np.asarray(t, dtype=float)
        a = self.a[axis]
        big_t = self.thickness[axis]
        full = a + big_t
        r = np.abs(t)
        sbar = np.clip((r - full) / big_t, -1.0, 0.0)
        u = 2.0 * sbar + 1.0  # back to [-1, 1] for the expansion
        ramp_part = self.strength * big_t * _clenshaw(self._anti, u)
        tail = self.strength * np.maximum(r - full, 0.0)
        inside = r <= a
        out = np.where(inside, 0.0, ramp_part + tail)
        return np.sign(t) * out

    # -- vector helpers -----------------------------------------------------

    def stretch(self, x: np.ndarray) -> np.ndarray:
        """Complexified coordinates of real points, shape (..., dim)."""
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape, dtype=complex)
        for i in range(self.dim):
            out[..., i] = x[..., i] + 1j * self.sigma_integral(i, x[..., i])
        return out

    def alpha(self, x: np.ndarray) -> np.ndarray:
        """Per-axis stretch derivatives alpha_i = 1 + i sigma_i(x_i)."""
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape, dtype=complex)
        for i in range(self.dim):
            out[..., i] = 1.0 + 1j * self.sigma(i, x[..., i])
        return out

    def ramp_integral(self, axis: int) -> float:
        """integral over one full ramp [a, a+T]; equals S*T*0.2595781941874211."""
        return float(
            self.sigma_integral(axis, self.a[axis] + self.thickness[axis])
        )


def complex_distance(xs, ys):
    """Analytic continuation of |x - y| to stretched coordinates.

    Arguments are stretched points with trailing axis dim; broadcasting
    applies. The square root takes the branch with nonnegative real
    part (cut on the negative imaginary axis), which keeps exp(ik rho)
    outgoing and decaying inside the layer.
    """
    d = np.asarray(xs) - np.asarray(ys)
    return branch_sqrt((d * d).sum(axis=-1))


def stretch_jacobian(alpha: np.ndarray) -> np.ndarray:
    """Volume factor J = prod_i alpha_i; alpha has trailing axis dim."""
    return np.prod(alpha, axis=-1)


def stretch_matrix(alpha: np.ndarray) -> np.ndarray:
    """Diagonal of A = J * diag(alpha_i^-2): entry i is prod_{j!=i} alpha_j / alpha_i.

    This is the coefficient matrix of the stretched divergence form; the
    stretched normal derivative is (A nu) . grad with the real gradient.
    """
    j = stretch_jacobian(alpha)[..., None]
    return j / (alpha * alpha)


def zero_order_weights_2d(alpha_x: np.ndarray, alpha_y: np.ndarray) -> np.ndarray:
    """Diagonal weights of the zero-order hypersingular piece in 2D.

    Entry i pairs the opposite-axis stretch factors of target and
    source: diag{alpha_2(x_2) alpha_2(y_2), alpha_1(x_1) alpha_1(y_1)}.
    Supports broadcasting of target against source point sets.
    """
    return (alpha_x * alpha_y)[..., ::-1]


def curl_weights_3d(alpha_x: np.ndarray, alpha_y: np.ndarray) -> np.ndarray:
    """Diagonal weights pairing surface-curl components in 3D:
    diag{alpha_i(x_i) alpha_i(y_i)}."""
    return alpha_x * alpha_y


def zero_order_weights_3d(alpha_x: np.ndarray, alpha_y: np.ndarray) -> np.ndarray:
    """Diagonal weights of the zero-order hypersingular piece in 3D.

    diag{ prod_j alpha_j(x_j) alpha_j(y_j) / (alpha_i(x_i) alpha_i(y_i)) }.
    """
    pair = alpha_x * alpha_y
    total = np.prod(pair, axis=-1)[..., None]
    return total / pair
