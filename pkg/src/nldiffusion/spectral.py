"""Spectrum of L on the circle and the sphere, with Fourier and Funk-Hecke oracles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import linear_sum_assignment

from .geometry import Kind
from .kernels import Kernel
from .nonlocal_op import ConvolutionMatrix


@dataclass(frozen=True)
class SpectralData:
    gamma: np.ndarray    # eigenvalues of L0 = u -> J * u, nonincreasing
    lam: np.ndarray      # eigenvalues of -L, nondecreasing
    phi: np.ndarray      # columns orthonormal in the weighted inner product
    weights: np.ndarray

    def coefficients(self, values) -> np.ndarray:
        return self.phi.T @ (self.weights * np.asarray(values, dtype=float))

    def synthesize(self, coef) -> np.ndarray:
        return self.phi @ coef

    def orthonormality_defect(self) -> float:
        G = self.phi.T @ (self.weights[:, None] * self.phi)
        return float(np.max(np.abs(G - np.eye(G.shape[0]))))


class SymmetryError(RuntimeError):
    pass


def eigendecompose(A: ConvolutionMatrix, sym_tol: float = 1e-6) -> SpectralData:
    """Dense eigensolve of B = W^{1/2} A W^{-1/2}, mapped back by W^{-1/2}."""
    if not A.manifold.compact:
        raise ValueError("eigendecompose expects a compact manifold")
    sw = np.sqrt(A.weights)
    B = sw[:, None] * A.entries / sw[None, :]
    defect = float(np.max(np.abs(B - B.T)))
    if defect > sym_tol:
        raise SymmetryError(f"symmetrized operator is not symmetric (defect {defect:.2e})")
    g, V = eigh(0.5 * (B + B.T))
    order = np.argsort(g)[::-1]
    g, V = g[order], V[:, order]
    phi = V / sw[:, None]
    # fix signs so that each eigenvector has a positive weighted sum, or a positive first entry
    s = np.sign(A.weights @ phi)
    s[s == 0] = np.sign(phi[0, s == 0])
    s[s == 0] = 1.0
    return SpectralData(g, 1.0 - g, phi * s, A.weights.copy())


# -- oracles -----------------------------------------------------------------

def _support_quad(k: Kernel, order: int = 200):
    x, w = np.polynomial.legendre.leggauss(order)
    return k.delta * (x + 1) / 2, k.delta * w / 2


def circle_gamma(k: Kernel, kk) -> np.ndarray:
    """gamma_k = int_{-pi}^{pi} J(|theta|) cos(k theta) dtheta."""
    if k.delta > np.pi:
        raise ValueError("support must not exceed pi")
    s, w = _support_quad(k)
    kk = np.atleast_1d(np.asarray(kk, dtype=float))
    return 2.0 * (np.cos(np.outer(kk, s)) @ (w * k(s)))


def oracle_circle(k: Kernel, k_max: int) -> np.ndarray:
    """Eigenvalues of L0 on S^1 for |k| <= k_max with multiplicity, sorted nonincreasing."""
    g = circle_gamma(k, np.arange(k_max + 1))
    return np.sort(np.concatenate([g, g[1:]]))[::-1]


def legendre_values(l_max: int, t) -> np.ndarray:
    """P_0..P_{l_max} at t by the three-term recurrence; shape (l_max + 1, len(t))."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    P = np.empty((l_max + 1, t.size))
    P[0] = 1.0
    if l_max >= 1:
        P[1] = t
    for l in range(1, l_max):
        P[l + 1] = ((2 * l + 1) * t * P[l] - l * P[l - 1]) / (l + 1)
    return P


def sphere_gamma(k: Kernel, l_max: int) -> np.ndarray:
    """Funk-Hecke: gamma_l = 2 pi int_{-1}^{1} J(arccos t) P_l(t) dt on S^2."""
    if k.delta > np.pi:
        raise ValueError("support must not exceed pi")
    s, w = _support_quad(k)
    P = legendre_values(l_max, np.cos(s))
    return 2 * np.pi * (P @ (w * k(s) * np.sin(s)))


def oracle_sphere(k: Kernel, l_max: int):
    """(gamma_l, multiplicity 2l + 1) for l = 0..l_max."""
    return sphere_gamma(k, l_max), 2 * np.arange(l_max + 1) + 1


def pair_eigenvalues(computed, oracle, tol: float = 1e-6):
    """Match oracle values to computed ones by minimal total distance.

    Returns (index into computed for each oracle value, abs errors); entries
    further apart than ``tol`` are still reported so callers can assert.
    """
    computed = np.asarray(computed, dtype=float)
    oracle = np.asarray(oracle, dtype=float)
    cost = np.abs(oracle[:, None] - computed[None, :])
    rows, cols = linear_sum_assignment(cost)
    idx = np.empty(oracle.size, dtype=int)
    idx[rows] = cols
    err = np.abs(computed[idx] - oracle)
    return idx, err


def match_zonal_tower(spec: SpectralData, nodes, l_max: int):
    """For each l pick the eigenvector with the largest overlap with P_l(cos r)."""
    P = legendre_values(l_max, np.cos(nodes))
    norms = np.sqrt(P**2 @ spec.weights)
    ov = np.abs((P * spec.weights) @ spec.phi) / norms[:, None]
    rows, cols = linear_sum_assignment(-ov)
    idx = np.empty(l_max + 1, dtype=int)
    idx[rows] = cols
    return idx, ov[np.arange(l_max + 1), idx]


# -- decay ---------------------------------------------------------------------

@dataclass
class DecayReport:
    t: np.ndarray
    l2: np.ndarray
    linf: np.ndarray
    bound: np.ndarray
    lambda1: float
    fitted_rate: float
    mean: float

    @property
    def bound_ok(self) -> bool:
        return bool(np.all(self.l2 <= self.bound + 1e-8))


def first_gap(spec: SpectralData) -> float:
    return float(spec.lam[1])


def decay_report(A: ConvolutionMatrix, spec: SpectralData, u0, t_list, fit_from: float | None = None) -> DecayReport:
    """Distances of u(t) to the mean of u0, the L^2 bound and a fitted exponential rate.

    The rate is a least-squares line through log ||u(t) - <u0>||_2 over the
    times >= ``fit_from`` (default: the later half of ``t_list``).
    """
    from .evolution import evolve, functional

    t = np.asarray(list(t_list), dtype=float)
    vals = u0.values if hasattr(u0, "values") else np.asarray(u0, dtype=float)
    grid = A.grid.with_values(vals)
    mean = functional(grid, "mean")
    l2 = np.empty_like(t)
    linf = np.empty_like(t)
    for i, ti in enumerate(t):
        d = evolve(A, grid, ti, "exact_spectral", spectral=spec).values - mean
        l2[i] = np.sqrt(A.weights @ d**2)
        linf[i] = np.max(np.abs(d))
    lam1 = first_gap(spec)
    bound = np.exp(-lam1 * t) * np.sqrt(A.weights @ vals**2)
    if fit_from is None:
        fit_from = t[len(t) // 2]
    sel = (t >= fit_from) & (l2 > 0)
    rate = float(-np.polyfit(t[sel], np.log(l2[sel]), 1)[0]) if sel.sum() >= 2 else float("nan")
    return DecayReport(t, l2, linf, bound, lam1, rate, mean)
