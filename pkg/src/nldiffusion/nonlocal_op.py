"""Discrete convolution u -> int J(s_xy) u(y) dmu_y and the local limit study."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from .geometry import Kind, RadialGridFunction, RadialManifold, laplace_beltrami_radial, uniform_grid
from .kernels import Kernel, rescale, second_moment_q


def _sin_power_integral(N: int) -> float:
    # int_0^pi sin^{N-2} g dg
    return np.sqrt(np.pi) * gamma((N - 1) / 2) / gamma(N / 2)


def angular_average(m: RadialManifold, k: Kernel, r, rp, order: int = 32) -> np.ndarray:
    """Average of J(d((r, e), (r', e'))) over e' in the unit sphere S^{N-1}.

    For N >= 2 the average is an integral in the angle gamma with weight
    sin^{N-2}; the range is clipped to the kernel support, where
    sin^2(gamma*/2) = (h(delta) - h(r - r')) / (psi(r) psi(r')), before
    Gauss-Legendre is applied.  N = 1 averages the two points of S^0.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    rp = np.atleast_1d(np.asarray(rp, dtype=float))
    N = m.dim
    if N == 1:
        return 0.5 * (k(m.distance(r, rp, 0.0)) + k(m.distance(r, rp, np.pi)))
    x, w = np.polynomial.legendre.leggauss(order)
    pp = m.psi(r) * m.psi(rp)
    num = m.half_chord2(k.delta) - m.half_chord2(r - rp)
    if m.kind is Kind.SPHERE and k.delta >= np.pi:
        num = np.full_like(num, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(pp > 0, num / np.where(pp > 0, pp, 1.0), np.inf)
    g_top = np.where(ratio >= 1, np.pi, 2 * np.arcsin(np.sqrt(np.clip(ratio, 0.0, 1.0))))
    g = (x[None, :] + 1) * g_top[:, None] / 2
    gw = w[None, :] * g_top[:, None] / 2
    s = m.half_chord2(r - rp)[:, None] + pp[:, None] * np.sin(g / 2) ** 2
    d = m._from_half_chord2(s)
    val = np.sum(gw * k(d) * np.sin(g) ** (N - 2), axis=1) / _sin_power_integral(N)
    pole = pp <= 0
    val = np.where(pole, k(m.distance(r, rp, 0.0)), val)
    return np.where(num > 0, val, 0.0)


@dataclass
class ConvolutionMatrix:
    """A[i, j] = w_j Abar(r_i, r_j) so that (A u)_i ~ int J(s_{x_i y}) u(y) dmu_y."""

    entries: np.ndarray
    weights: np.ndarray
    grid: RadialGridFunction
    manifold: RadialManifold
    kernel: Kernel
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.weights.size

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def symmetry_defect(self) -> float:
        S = self.entries * self.weights[:, None]
        return float(np.max(np.abs(S - S.T)))

    def apply(self, values) -> np.ndarray:
        return self.entries @ np.asarray(values, dtype=float)


def assemble(m: RadialManifold, k: Kernel, grid: RadialGridFunction, angular_order: int = 32) -> ConvolutionMatrix:
    """Dense convolution matrix on ``grid`` (radial data, or the full circle)."""
    if grid.manifold != m:
        raise ValueError("grid and manifold disagree")
    if m.compact and k.delta > np.pi:
        raise ValueError("kernel support exceeds the injectivity radius")
    nodes, w = grid.nodes, grid.weights
    n = nodes.size
    meta = {"angular_order": angular_order}
    spacing = np.max(np.diff(nodes)) if n > 1 else np.inf
    if spacing > k.delta / 8:
        meta["warning"] = f"grid spacing {spacing:.3g} is coarse for support {k.delta:.3g}"
    if m.kind is Kind.CIRCLE:
        D = m.distance(nodes[:, None], nodes[None, :])
        return ConvolutionMatrix(k(D) * w[None, :], w, grid, m, k, meta)
    # only pairs i <= j within the band; the mirrored half keeps w_i A_ij symmetric
    ii, jj = np.triu_indices(n)
    band = np.abs(nodes[ii] - nodes[jj]) < k.delta
    if m.dim == 1:
        band |= nodes[ii] + nodes[jj] < k.delta
    ii, jj = ii[band], jj[band]
    Abar = np.zeros((n, n))
    chunk = 20000
    for lo in range(0, ii.size, chunk):
        a, b = ii[lo:lo + chunk], jj[lo:lo + chunk]
        Abar[a, b] = angular_average(m, k, nodes[a], nodes[b], angular_order)
    Abar = np.triu(Abar) + np.triu(Abar, 1).T
    return ConvolutionMatrix(Abar * w[None, :], w, grid, m, k, meta)


def apply_L(A: ConvolutionMatrix, u: RadialGridFunction) -> RadialGridFunction:
    """L u = A u - u."""
    if u.nodes.shape != A.weights.shape or not np.array_equal(u.nodes, A.grid.nodes):
        raise ValueError("u is not defined on the operator's grid")
    return u.with_values(A.apply(u.values) - u.values)


@dataclass
class LimitRow:
    eps: float
    error: float
    order: float


def infinitesimal_limit_study(
    m: RadialManifold,
    k: Kernel,
    u_test,
    epsilons,
    window=(0.5, 1.5),
    nodes_per_support: int = 32,
    angular_order: int = 32,
    laplacian=None,
    form: str = "centered",
) -> list[LimitRow]:
    """sup-norm error of L_eps u against q Delta_M u on an interior window.

    ``u_test`` is a callable radial profile sampled on a uniform grid whose
    step divides eps*delta.  ``form='centered'`` uses
    L_eps u_i = eps^{-2} sum_j A_ij (u_j - u_i), which equals the literal
    eps^{-2}(A u - u) whenever rows integrate to one, and is immune to the
    row-sum quadrature error; ``form='literal'`` is the unmodified form.
    """
    eps = np.asarray(list(epsilons), dtype=float)
    if eps.size == 0 or np.any(np.diff(eps) >= 0):
        raise ValueError("epsilons must be strictly decreasing")
    if form not in ("centered", "literal"):
        raise ValueError("form must be 'centered' or 'literal'")
    q = second_moment_q(k, m.dim)
    lo, hi = window
    rows = []
    for e in eps:
        ke = rescale(k, float(e), m.dim, m)
        h = ke.delta / nodes_per_support
        r_top = hi + ke.delta + 3 * h
        if m.kind is Kind.SPHERE:
            r_top = min(r_top, np.pi - h)
        grid = uniform_grid(m, r_top, h, u_test)
        r = grid.nodes
        inside = np.nonzero((r >= lo - 1e-12) & (r <= hi + 1e-12))[0]
        ii = np.repeat(inside, 2 * nodes_per_support + 1)
        jj = ii + np.tile(np.arange(-nodes_per_support, nodes_per_support + 1), inside.size)
        ok = (jj >= 0) & (jj < r.size)
        ii, jj = ii[ok], jj[ok]
        vals = angular_average(m, ke, r[ii], r[jj], angular_order) * grid.weights[jj]
        u = grid.values
        if form == "centered":
            contrib = vals * (u[jj] - u[ii])
            Lu = np.bincount(ii, contrib, minlength=r.size)[inside] / e**2
        else:
            Au = np.bincount(ii, vals * u[jj], minlength=r.size)[inside]
            Lu = (Au - u[inside]) / e**2
        if laplacian is None:
            ref = laplace_beltrami_radial(m, grid).values[inside]
        else:
            ref = laplacian(r[inside])
        rows.append(LimitRow(float(e), float(np.max(np.abs(Lu - q * ref))), float("nan")))
    for a, b in zip(rows[:-1], rows[1:]):
        b.order = float(np.log(a.error / b.error) / np.log(a.eps / b.eps)) if a.error > 0 and b.error > 0 else float("nan")
    return rows
