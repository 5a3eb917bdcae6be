"""Nystrom discretization of the stretched-coordinate layer operators.

Each patch carries a tensor grid of first-kind Chebyshev nodes with
Fejer weights. Interactions split into a far part, integrated with the
plain patch rule, and an adjacent part for target points within an
absolute distance delta of a source patch (every node counts as
adjacent to its own patch). Adjacent contributions are recomputed with
a singularity-resolving change of variables and contracted against the
source patch's interpolation basis, so one geometric pass serves every
kernel kind at a given wavenumber.

2D adjacent rule: a one-sided graded map clusters a large Fejer rule
around the source parameter closest to the target; this resolves the
logarithmic kernel and nearby-target boundary layers at once.

3D adjacent rule: the reference square splits into corner triangles at
the closest parameter; each triangle is integrated in scaled polar
form with a sinh-transformed sweep variable (accurate for arbitrarily
thin triangles) and a quadratically graded radial variable whose
jacobian cancels the 1/r kernel singularity.

The hypersingular operator is assembled from integrated-by-parts
pieces only: arc-length or surface-curl derivatives wrapped around
single-layer applications, plus a zero-order term whose stretch
weights factor into per-point conormal vectors. No strongly singular
kernel is ever quadratured directly.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .cheb import cardinal_matrix, cheb_nodes, diff_matrix, fejer_weights, graded_map
from .kernels import conormal_weights, green_values
from .specfun import branch_sqrt

__all__ = [
    "Discretization",
    "dense_operator",
    "hyper_matrix",
    "apply_operator",
    "apply_hyper",
    "layer_potential",
    "tangential_derivative_matrix",
    "closest_parameter_2d",
    "closest_parameter_3d",
    "fine_rule_2d",
    "fine_rule_3d",
]

_KINDS = ("single", "double", "adjoint")


@lru_cache(maxsize=16)
def _rule(n: int):
    return cheb_nodes(n), fejer_weights(n)


def _block_rho(xt, yt):
    """Complexified distances between stretched point sets, via GEMM.

    Uses the bilinear expansion rho^2 = x.x + y.y - 2 x.y (no
    conjugation); coincident points give rho = 0, which callers mask.
    """
    xx = np.sum(xt * xt, axis=-1)
    yy = np.sum(yt * yt, axis=-1)
    r2 = xx[:, None] + yy[None, :] - 2.0 * (xt @ yt.T)
    return branch_sqrt(r2)


def _kernel_values(kind, g, dg, rho, diff, m_x, m_y):
    """Kernel of one operator kind from shared Green-function data.

    diff = xtilde - ytilde with trailing spatial axis; m_x and m_y are
    the stretched conormal vectors (per-axis cofactor weights times the
    unit normal) at targets and sources.
    """
    if kind == "single":
        return g
    if kind == "double":
        return -(dg / rho) * np.sum(m_y * diff, axis=-1)
    if kind == "adjoint":
        return (dg / rho) * np.sum(m_x * diff, axis=-1)
    raise ValueError(f"unknown kernel kind {kind!r}")


def _far_block(dim, kind, k, xt_t, m_t, xt_s, m_s, weights):
    """Plain-rule interaction block of shape (targets, sources).

    Source-point quadrature weights are folded in; exactly coincident
    point pairs contribute zero (their correct value arrives through
    the adjacent corrections).
    """
    rho = _block_rho(xt_t, xt_s)
    sing = rho == 0.0
    any_sing = bool(np.any(sing))
    if any_sing:
        rho = np.where(sing, 1.0, rho)
    g, dg = green_values(dim, k, rho)
    diff = xt_t[:, None, :] - xt_s[None, :, :]
    m_x = m_t[:, None, :] if m_t is not None else None
    vals = _kernel_values(kind, g, dg, rho, diff, m_x, m_s[None, :, :])
    if any_sing:
        vals = np.where(sing, 0.0, vals)
    return vals * weights[None, :]


# ---------------------------------------------------------------------------
# closest-point searches
# ---------------------------------------------------------------------------

_COARSE_2D = np.linspace(-1.0, 1.0, 33)
_COARSE_3D = np.linspace(-1.0, 1.0, 13)


def _dist2_2d(patch, u, x):
    p, _ = patch.chart(np.array([u]))
    return float(np.sum((p[0] - x) ** 2))


def closest_parameter_2d(patch, x):
    """Parameter of the closest point of a curve patch, plus distance."""
    xs, _ = patch.chart(_COARSE_2D)
    d2 = np.sum((xs - x) ** 2, axis=1)
    i = int(np.argmin(d2))
    a = _COARSE_2D[max(i - 1, 0)]
    b = _COARSE_2D[min(i + 1, len(_COARSE_2D) - 1)]
    inv = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc = _dist2_2d(patch, c, x)
    fd = _dist2_2d(patch, d, x)
    while b - a > 1e-13:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = _dist2_2d(patch, c, x)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = _dist2_2d(patch, d, x)
    u = 0.5 * (a + b)
    return u, np.sqrt(_dist2_2d(patch, u, x))


def closest_parameter_3d(patch, x):
    """Clamped, damped Gauss-Newton closest point on a surface patch."""
    uu, vv = np.meshgrid(_COARSE_3D, _COARSE_3D, indexing="ij")
    pts, _, _ = patch.chart(uu, vv)
    d2 = np.sum((pts - x) ** 2, axis=-1)
    i, j = np.unravel_index(int(np.argmin(d2)), d2.shape)
    u, v = float(uu[i, j]), float(vv[i, j])
    best = float(d2[i, j])
    for _ in range(30):
        p, ru, rv = patch.chart(u, v)
        e = p - x
        jtj = np.array([[ru @ ru, ru @ rv], [ru @ rv, rv @ rv]])
        rhs = -np.array([ru @ e, rv @ e])
        try:
            du, dv = np.linalg.solve(jtj, rhs)
        except np.linalg.LinAlgError:
            break
        step, moved = 1.0, False
        for _ in range(20):
            un = min(1.0, max(-1.0, u + step * du))
            vn = min(1.0, max(-1.0, v + step * dv))
            pn, _, _ = patch.chart(un, vn)
            dn = float(np.sum((pn - x) ** 2))
            if dn < best:
                u, v, best, moved = un, vn, dn, True
                break
            step *= 0.5
        if not moved or step * (abs(du) + abs(dv)) < 1e-13:
            break
    return (u, v), np.sqrt(best)


# ---------------------------------------------------------------------------
# adjacent fine rules
# ---------------------------------------------------------------------------


def fine_rule_2d(u_star: float, n_beta: int, order: int = 6):
    """Graded Fejer rule on [-1, 1] clustered at u_star.

    Returns (xi, w) with the map jacobian folded into the weights.
    """
    t, w = _rule(n_beta)
    xi, dxi = graded_map(float(min(1.0, max(-1.0, u_star))), order, t)
    return xi, w * dxi


def fine_rule_3d(u_star: float, v_star: float, n_fine: int):
    """Corner-triangle polar rule on [-1, 1]^2 clustered at (u*, v*).

    The four corner rectangles around the cluster point each split
    into two triangles swept from the cluster point. The radial
    variable is proportional to distance (its jacobian cancels a 1/r
    kernel; a quadratic grading sharpens nearby off-surface targets)
    and the transverse variable is sinh-stretched, so very thin
    triangles, which arise when the cluster point sits near an edge,
    lose no accuracy. Returns flat (u, v, w) with every
    change-of-variables factor folded into w.
    """
    a = float(min(1.0, max(-1.0, u_star)))
    b = float(min(1.0, max(-1.0, v_star)))
    t, w = _rule(n_fine)
    s01 = 0.5 * (t + 1.0)
    w01 = 0.5 * w
    sig = s01 * s01          # graded radial variable on (0, 1)
    dsig = s01 * w           # quadrature weights with d(sig)/d(s01) folded in
    us, vs, ws = [], [], []
    for cu in (1.0, -1.0):
        for cv in (1.0, -1.0):
            len_u = abs(cu - a)
            len_v = abs(cv - b)
            if len_u == 0.0 or len_v == 0.0:
                continue
            for p, q, sp, sq, swap in (
                (len_u, len_v, np.sign(cu - a), np.sign(cv - b), False),
                (len_v, len_u, np.sign(cv - b), np.sign(cu - a), True),
            ):
                tau_max = np.arcsinh(q / p)
                tau = s01 * tau_max
                t_hat = (p / q) * np.sinh(tau)
                wt = (p / q) * np.cosh(tau) * tau_max * w01
                sg, th = np.meshgrid(sig, t_hat, indexing="ij")
                wgt = (p * q) * sg * np.outer(dsig, wt)
                du = sp * sg * p
                dv = sq * sg * th * q
                if swap:
                    du, dv = dv, du
                us.append((a + du).ravel())
                vs.append((b + dv).ravel())
                ws.append(wgt.ravel())
    return np.concatenate(us), np.concatenate(vs), np.concatenate(ws)


# ---------------------------------------------------------------------------
# discretization
# ---------------------------------------------------------------------------


class Discretization:
    """Node data, stretched caches, and adjacency lists for a scene.

    Parameters
    ----------
    scene : geometry.Scene to discretize.
    n : nodes per patch per direction (n in 2D, n*n in 3D).
    n_beta : size of the graded 2D adjacent rule.
    n_fine : per-direction size of each 3D corner triangle rule.
    delta : absolute distance below which a target point is treated as
        adjacent to a source patch.
    """

    def __init__(self, scene, n: int, n_beta: int = 200, n_fine: int = 24,
                 delta: float = 0.1):
        self.scene = scene
        self.dim = scene.dim
        self.n = int(n)
        self.n_beta = int(n_beta)
        self.n_fine = int(n_fine)
        self.delta = float(delta)
        self._corr_cache = {}
        if self.dim == 2:
            self._build_2d()
        else:
            self._build_3d()
        self._finish_common()
        self._build_adjacency()

    def _build_2d(self):
        u, w = _rule(self.n)
        pts, nrm, jac, tng = [], [], [], []
        for p in self.scene.patches:
            x, nu, j, t = p.frame(u)
            pts.append(x)
            nrm.append(nu)
            jac.append(j)
            tng.append(t)
        self.nodes = np.concatenate(pts)
        self.normals = np.concatenate(nrm)
        self.jacobians = np.concatenate(jac)
        self.tangents = np.concatenate(tng)
        self.qweights = self.jacobians * np.tile(w, len(self.scene.patches))
        self._per_patch = self.n

    def _build_3d(self):
        u, w = _rule(self.n)
        ww = np.outer(w, w).ravel()
        npp = self.n * self.n
        pts, nrm, jac, rus, rvs = [], [], [], [], []
        for p in self.scene.patches:
            x, nu, j, ru, rv = p.frame(u[:, None], u[None, :])
            pts.append(x.reshape(npp, 3))
            nrm.append(nu.reshape(npp, 3))
            jac.append(j.reshape(npp))
            rus.append(ru.reshape(npp, 3))
            rvs.append(rv.reshape(npp, 3))
        self.nodes = np.concatenate(pts)
        self.normals = np.concatenate(nrm)
        self.jacobians = np.concatenate(jac)
        self.r_u = np.concatenate(rus)
        self.r_v = np.concatenate(rvs)
        self.qweights = self.jacobians * np.tile(ww, len(self.scene.patches))
        self._per_patch = npp

    def _finish_common(self):
        npp = self._per_patch
        self.n_dof = self.nodes.shape[0]
        self.patch_slices = [
            slice(i * npp, (i + 1) * npp)
            for i in range(len(self.scene.patches))
        ]
        self.patch_of = np.repeat(np.arange(len(self.scene.patches)), npp)
        prof = self.scene.profile
        self.stretched = prof.stretch(self.nodes)
        self.alphas = prof.alpha(self.nodes)
        self.conormals = conormal_weights(self.alphas) * self.normals
        if self.dim == 3:
            self.stretched_r_u = self.alphas * self.r_u
            self.stretched_r_v = self.alphas * self.r_v

    # -- adjacency ----------------------------------------------------------

    def _patch_bbox(self, patch):
        if self.dim == 2:
            s = np.linspace(-1.0, 1.0, 65)
            x, _ = patch.chart(s)
        else:
            s = np.linspace(-1.0, 1.0, 17)
            x, _, _ = patch.chart(s[:, None], s[None, :])
            x = x.reshape(-1, 3)
        return x.min(axis=0), x.max(axis=0)

    def _build_adjacency(self):
        """Pairs (node index, patch index, cluster parameter, distance).

        A sampled bounding box inflated past delta prefilters the
        candidates; the extra margin covers sampling slack, and
        borderline misses are harmless because the plain rule is
        already accurate at distance delta.
        """
        u_nodes, _ = _rule(self.n)
        pairs = []
        margin = self.delta + 0.02
        for q, patch in enumerate(self.scene.patches):
            lo, hi = self._patch_bbox(patch)
            inside = np.all(
                (self.nodes >= lo - margin) & (self.nodes <= hi + margin),
                axis=1,
            )
            own = self.patch_of == q
            for i in np.nonzero(inside | own)[0]:
                if own[i]:
                    loc = i - self.patch_slices[q].start
                    if self.dim == 2:
                        par = (float(u_nodes[loc]),)
                    else:
                        par = (
                            float(u_nodes[loc // self.n]),
                            float(u_nodes[loc % self.n]),
                        )
                    pairs.append((int(i), q, par, 0.0))
                    continue
                if self.dim == 2:
                    us, d = closest_parameter_2d(patch, self.nodes[i])
                    par = (us,)
                else:
                    par, d = closest_parameter_3d(patch, self.nodes[i])
                if d <= self.delta:
                    pairs.append((int(i), q, par, float(d)))
        self.adjacent = pairs

    # -- adjacent corrections -----------------------------------------------

    def _fine_geometry(self, q, par):
        """Fine-rule source geometry on patch q, clustered at par.

        Returns stretched points, conormal vectors, weights (patch
        jacobian and all map factors included), and the interpolation
        basis evaluated at the fine points.
        """
        patch = self.scene.patches[q]
        prof = self.scene.profile
        if self.dim == 2:
            xi, w = fine_rule_2d(par[0], self.n_beta)
            y, nu, jac, _ = patch.frame(xi)
            basis = cardinal_matrix(self.n, xi)
        else:
            uf, vf, w = fine_rule_3d(par[0], par[1], self.n_fine)
            y, nu, jac, _, _ = patch.frame(uf, vf)
            basis = (cardinal_matrix(self.n, uf), cardinal_matrix(self.n, vf))
        yt = prof.stretch(y)
        m_y = conormal_weights(prof.alpha(y)) * nu
        return yt, m_y, w * jac, basis

    def _contract(self, vals, basis):
        """Reduce fine-point kernel values to per-node coefficients."""
        if self.dim == 2:
            return vals @ basis
        au, av = basis
        return ((au * vals[:, None]).T @ av).ravel()

    def corrections(self, k: float):
        """Adjacent-interaction rows for all kernel kinds at wavenumber k.

        2D rows are replacements for the target's row segment over the
        source patch. 3D rows are deltas: the fine-rule value minus the
        plain-rule contribution that the blocked far product already
        added (with its coincident-point-is-zero convention), so an
        apply only needs one extra addition per pair.
        """
        key = float(k)
        if key in self._corr_cache:
            return self._corr_cache[key]
        npp = self._per_patch
        rows = {kind: np.zeros((len(self.adjacent), npp), dtype=complex)
                for kind in _KINDS}
        for idx, (i, q, par, _d) in enumerate(self.adjacent):
            yt, m_y, wq, basis = self._fine_geometry(q, par)
            xt = self.stretched[i]
            diff = xt - yt
            rho = branch_sqrt(np.sum(diff * diff, axis=-1))
            g, dg = green_values(self.dim, k, rho)
            m_x = self.conormals[i]
            for kind in _KINDS:
                vals = _kernel_values(kind, g, dg, rho, diff, m_x, m_y) * wq
                rows[kind][idx] = self._contract(vals, basis)
            if self.dim == 3:
                sl = self.patch_slices[q]
                for kind in _KINDS:
                    plain = _far_block(
                        3, kind, k, self.stretched[i : i + 1],
                        self.conormals[i : i + 1], self.stretched[sl],
                        self.conormals[sl], self.qweights[sl],
                    )
                    rows[kind][idx] -= plain[0]
        out = {
            "rows": rows,
            "target": np.array([p[0] for p in self.adjacent], dtype=int),
            "patch": np.array([p[1] for p in self.adjacent], dtype=int),
        }
        self._corr_cache[key] = out
        return out


# ---------------------------------------------------------------------------
# 2D dense operators
# ---------------------------------------------------------------------------


def dense_operator(disc: Discretization, kind: str, k: float,
                   chunk: int = 512) -> np.ndarray:
    """Fully assembled 2D Nystrom matrix for one kernel kind."""
    if disc.dim != 2:
        raise ValueError("dense assembly is two-dimensional only")
    m = disc.n_dof
    mat = np.empty((m, m), dtype=complex)
    for start in range(0, m, chunk):
        sl = slice(start, min(start + chunk, m))
        mat[sl] = _far_block(
            2, kind, k, disc.stretched[sl], disc.conormals[sl],
            disc.stretched, disc.conormals, disc.qweights,
        )
    corr = disc.corrections(k)
    rows = corr["rows"][kind]
    for idx in range(rows.shape[0]):
        i = corr["target"][idx]
        psl = disc.patch_slices[corr["patch"][idx]]
        mat[i, psl] = rows[idx]
    return mat


def tangential_derivative_matrix(disc: Discretization) -> np.ndarray:
    """Block-diagonal arc-length derivative at the nodes (2D)."""
    if disc.dim != 2:
        raise ValueError("arc-length derivative is two-dimensional only")
    d = diff_matrix(disc.n)
    m = np.zeros((disc.n_dof, disc.n_dof))
    for sl in disc.patch_slices:
        m[sl, sl] = d / disc.jacobians[sl][:, None]
    return m


def hyper_matrix(disc: Discretization, k: float) -> np.ndarray:
    """2D hypersingular operator in integrated-by-parts form.

    The matrix is D S D + k^2 sum_j diag(m_x[j]) S diag(m_y[j]) with D
    the arc-length derivative and m the stretched conormal vectors.
    Both S factors carry the adjacent corrections, which interpolate
    whatever density they are handed.
    """
    s = dense_operator(disc, "single", k)
    d = tangential_derivative_matrix(disc)
    out = d @ s @ d
    m = disc.conormals
    for j in range(2):
        out += (k * k) * (m[:, j : j + 1] * s) * m[None, :, j]
    return out


# ---------------------------------------------------------------------------
# 3D matrix-free applies
# ---------------------------------------------------------------------------


def apply_operator(disc: Discretization, kind: str, k: float,
                   density: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Apply one layer operator matrix-free (3D scenes)."""
    if disc.dim != 3:
        raise ValueError("matrix-free apply is three-dimensional only")
    m = disc.n_dof
    out = np.zeros(m, dtype=complex)
    density = np.asarray(density, dtype=complex)
    for start in range(0, m, chunk):
        sl = slice(start, min(start + chunk, m))
        block = _far_block(
            3, kind, k, disc.stretched[sl], disc.conormals[sl],
            disc.stretched, disc.conormals, disc.qweights,
        )
        out[sl] = block @ density
    corr = disc.corrections(k)
    rows = corr["rows"][kind]
    for idx in range(rows.shape[0]):
        i = corr["target"][idx]
        psl = disc.patch_slices[corr["patch"][idx]]
        out[i] += rows[idx] @ density[psl]
    return out


def _surface_derivatives(disc, values):
    """Spectral parameter derivatives (d/du, d/dv) per 3D patch grid."""
    d = diff_matrix(disc.n)
    du = np.empty_like(values)
    dv = np.empty_like(values)
    n = disc.n
    for sl in disc.patch_slices:
        grid = values[sl].reshape(n, n)
        du[sl] = (d @ grid).ravel()
        dv[sl] = (grid @ d.T).ravel()
    return du, dv


def apply_hyper(disc: Discretization, k: float,
                density: np.ndarray) -> np.ndarray:
    """Apply the 3D hypersingular operator in integrated-by-parts form.

    The curl piece is the single-layer potential of the vector density
    phi_u rt_v - phi_v rt_u (rt = per-axis stretched tangents),
    contracted with the target's stretched tangents and differentiated
    on the target grid; Stokes' identity per patch turns that into the
    normal component of the curl without any strongly singular kernel.
    The zero-order piece uses the conormal factorization of the
    stretch weights, reducing to three more single-layer applies.
    """
    if disc.dim != 3:
        raise ValueError("use hyper_matrix for 2D scenes")
    density = np.asarray(density, dtype=complex)
    phi_u, phi_v = _surface_derivatives(disc, density)
    vec = (
        phi_u[:, None] * disc.stretched_r_v
        - phi_v[:, None] * disc.stretched_r_u
    )
    w = np.stack(
        [apply_operator(disc, "single", k, vec[:, c]) for c in range(3)],
        axis=1,
    )
    p_u = np.sum(w * disc.stretched_r_u, axis=1)
    p_v = np.sum(w * disc.stretched_r_v, axis=1)
    du_pv, _ = _surface_derivatives(disc, p_v)
    _, dv_pu = _surface_derivatives(disc, p_u)
    curl_part = (du_pv - dv_pu) / disc.jacobians
    m = disc.conormals
    zero = np.zeros_like(density)
    for j in range(3):
        zero += m[:, j] * apply_operator(disc, "single", k, m[:, j] * density)
    return curl_part + (k * k) * zero


# ---------------------------------------------------------------------------
# off-surface potentials
# ---------------------------------------------------------------------------


def layer_potential(disc: Discretization, kind: str, k: float,
                    density: np.ndarray, points: np.ndarray,
                    chunk: int = 4096) -> np.ndarray:
    """Single or double layer potential at off-surface points.

    Points within delta of a patch have that patch's contribution
    recomputed with the adjacent fine rule, so evaluation stays
    accurate arbitrarily close to the boundary.
    """
    if kind not in ("single", "double"):
        raise ValueError("potential evaluation supports single and double")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    prof = disc.scene.profile
    xt = prof.stretch(points)
    density = np.asarray(density, dtype=complex)
    m = points.shape[0]
    out = np.zeros(m, dtype=complex)
    for start in range(0, m, chunk):
        sl = slice(start, min(start + chunk, m))
        block = _far_block(
            disc.dim, kind, k, xt[sl], None,
            disc.stretched, disc.conormals, disc.qweights,
        )
        out[sl] = block @ density
    margin = disc.delta + 0.02
    for q, patch in enumerate(disc.scene.patches):
        lo, hi = disc._patch_bbox(patch)
        cand = np.nonzero(
            np.all((points >= lo - margin) & (points <= hi + margin), axis=1)
        )[0]
        psl = disc.patch_slices[q]
        for i in cand:
            if disc.dim == 2:
                us, d = closest_parameter_2d(patch, points[i])
                par = (us,)
            else:
                par, d = closest_parameter_3d(patch, points[i])
            if d > disc.delta:
                continue
            yt, m_y, wq, basis = disc._fine_geometry(q, par)
            diff = xt[i] - yt
            rho = branch_sqrt(np.sum(diff * diff, axis=-1))
            g, dg = green_values(disc.dim, k, rho)
            vals = _kernel_values(kind, g, dg, rho, diff, None, m_y) * wq
            fine = disc._contract(vals, basis)
            plain = _far_block(
                disc.dim, kind, k, xt[i : i + 1], None,
                disc.stretched[psl], disc.conormals[psl], disc.qweights[psl],
            )
            out[i] += (fine - plain[0]) @ density[psl]
    return out
