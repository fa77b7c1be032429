"""Radial harmonic analysis on hyperbolic space H^N.

Conventions
-----------
* The spherical transform uses the full Riemannian measure,
  ``uhat(lam) = int u Phi_lam dmu`` with ``dmu = omega_{N-1} sinh^{N-1} r dr``,
  so the transform of a kernel J at lam = 0 is the coefficient ``a``.
* The inverse is ``u(r) = kappa_N int uhat(lam) Phi_lam(r) |c(lam)|^{-2} dlam``
  with the Harish-Chandra density ``|c|^{-2}`` in closed product form and ``kappa_N`` fixed once
  by a round-trip calibration (:func:`inversion_constant`).
* ``k_lambda(rho) = kappa_N |c(lam)|^{-2} Phi_lam(rho)``, so that the inverse
  transform is ``int uhat(lam) k_lam dlam`` and ``K0 = int e^{-b lam^2 t} k_lam dlam``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import expit, gamma, gammaln, log_expit

from .geometry import Kind, RadialGridFunction, RadialManifold, panel_grid, sphere_area

LAMBDA_MAX = 20.0
D_LAMBDA = 0.02


def _rho(N: int) -> float:
    return (N - 1) / 2


# -- Harish-Chandra coefficient ---------------------------------------------

def c_inv_sq(N: int, lam):
    """1/|c(lam)|^2 = |Gamma(i lam + (N-1)/2)|^2 / (2 (2 pi)^N |Gamma(i lam)|^2).

    The Gamma ratio is evaluated with the recurrence Gamma(z+1) = z Gamma(z)
    (odd N) or the reflection identities for half-integer shifts (even N).
    """
    if N < 2:
        raise ValueError("hyperbolic space needs N >= 2")
    lam = np.abs(np.asarray(lam, dtype=float))
    pref = 1.0 / (2.0 * (2 * np.pi) ** N)
    if N % 2:
        out = np.ones_like(lam)
        for j in range((N - 1) // 2):
            out = out * (lam**2 + j**2)
    else:
        out = lam * np.tanh(np.pi * lam)
        for j in range(N // 2 - 1):
            out = out * (lam**2 + (j + 0.5) ** 2)
    return pref * out


# -- elementary spherical functions -----------------------------------------

def _angular_norm(N: int) -> float:
    # 1 / int_0^pi sin^{N-2}
    return gamma(N / 2) / (np.sqrt(np.pi) * gamma((N - 1) / 2))


def _v_rule(N: int, r: float, lam_max: float):
    """Quadrature for Phi in the variable tan(theta/2) = e^{v - r}.

    After this substitution, with the exponential factored out,

        Phi_lam(r) = e^{-rho r} int W(v) cos(lam L(v)) dv,
        W = c_N 4^rho [sigma(2v) sigma(2(r-v))]^rho,   L = log(cosh r - sinh r cos theta),

    whose integrand is analytic in a strip and decays like e^{-2 rho |v|};
    the trapezoid rule is then spectrally accurate.  The step keeps
    2 pi/h - 2 lam_max well above the decay scale of W's Fourier transform.
    """
    rho = _rho(N)
    h = min(0.25, 2 * np.pi / (2 * lam_max + 24.0))
    pad = 40.0 / (2 * rho) + 1.0
    v = np.arange(-pad, r + pad + h / 2, h)
    logw = rho * (log_expit(2 * v) + log_expit(2 * (r - v)))
    wts = h * _angular_norm(N) * 4.0**rho * np.exp(logw)
    L = -r + np.logaddexp(0.0, 2 * v) - np.logaddexp(0.0, 2 * (v - r))
    return v, wts, L


def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    big = x > 20
    xs = np.where(big, 20.0, x)
    return np.where(big, x - np.log(2) + np.log1p(-np.exp(-2 * np.where(big, x, 21.0))), np.log(np.sinh(xs)))


def _abel_rule(N: int, r: float, lam_max: float):
    """Nodes s and weights w with Phi_lam(r) = sum w cos(lam s).

    Uses Phi_lam(r) = A_N sinh^{2-N} r int_0^r (cosh r - cosh s)^{(N-3)/2} cos(lam s) ds
    with s = r cos(phi); the endpoint singularity at s = r is absorbed by ds.
    """
    n = int(np.ceil(0.6 * lam_max * r + 30))
    x, gw = np.polynomial.legendre.leggauss(n)
    phi = (x + 1) * np.pi / 4
    s = r * np.cos(phi)
    log_a = (N - 1) / 2 * np.log(2) + gammaln(N / 2) - 0.5 * np.log(np.pi) - gammaln((N - 1) / 2)
    # cosh r - cosh s = 2 sinh((r+s)/2) sinh(r sin^2(phi/2))
    gap = np.log(2) + _log_sinh((r + s) / 2) + _log_sinh(r * np.sin(phi / 2) ** 2)
    lw = log_a + (2 - N) * _log_sinh(r) + (N - 3) / 2 * gap + np.log(r * np.sin(phi) * gw * np.pi / 4)
    return s, np.exp(lw)


def _closed3(lam, r):
    lam = np.asarray(lam, dtype=float)[:, None]
    r = np.asarray(r, dtype=float)[None, :]
    return np.sinc(lam * r / np.pi) * _x_over_sinh(r)


def _x_over_sinh(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0, 1.0, x)
    return np.where(x == 0, 1.0, safe / np.sinh(safe))


_PHI_CACHE: dict = {}


def phi_matrix(N: int, lams, rs, method: str = "auto") -> np.ndarray:
    """Phi_lam(r) on the outer grid ``lams x rs`` (shape ``(len(lams), len(rs))``).

    ``method``: ``closed`` (N = 3 only), ``abel`` (default for N != 3) or
    ``polar`` (the factored polar integral, kept as an independent check).
    """
    lams = np.abs(np.atleast_1d(np.asarray(lams, dtype=float)))
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    if np.any(rs < 0):
        raise ValueError("r must be nonnegative")
    if N < 2:
        raise ValueError("hyperbolic space needs N >= 2")
    if method == "auto":
        method = "closed" if N == 3 else "abel"
    if method == "closed":
        if N != 3:
            raise ValueError("closed form implemented for N = 3")
        return _closed3(lams, rs)
    if method not in ("abel", "polar"):
        raise ValueError(f"unknown method {method!r}")
    key = (N, method, lams.tobytes(), rs.tobytes())
    if key in _PHI_CACHE:
        return _PHI_CACHE[key]
    out = np.empty((lams.size, rs.size))
    lam_max = float(lams.max()) if lams.size else 0.0
    for j, r in enumerate(rs):
        if r == 0:
            out[:, j] = 1.0
        elif method == "abel":
            s, w = _abel_rule(N, r, lam_max)
            out[:, j] = np.cos(np.outer(lams, s)) @ w
        else:
            _, w, L = _v_rule(N, r, lam_max)
            out[:, j] = np.exp(-_rho(N) * r) * (np.cos(np.outer(lams, L)) @ w)
    if len(_PHI_CACHE) > 64:
        _PHI_CACHE.clear()
    _PHI_CACHE[key] = out
    return out


def phi_lambda(N: int, lam, r, method: str = "auto"):
    """Elementary spherical function Phi_lam(r); Phi_lam(0) = 1, even in lam.

    Scalars give a float; array arguments give the outer grid squeezed of
    length-one axes.
    """
    out = phi_matrix(N, lam, r, method)
    if np.ndim(lam) == 0 and np.ndim(r) == 0:
        return float(out[0, 0])
    if np.ndim(lam) == 0:
        return out[0]
    if np.ndim(r) == 0:
        return out[:, 0]
    return out


def phi0_scaled(N: int, r):
    """e^{rho r} Phi_0(r) and its r-derivative, without underflow."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    rho = _rho(N)
    val = np.empty_like(r)
    der = np.empty_like(r)
    for j, rj in enumerate(r):
        v, w, _ = _v_rule(N, rj, 0.0)
        val[j] = w.sum()
        der[j] = np.sum(w * 2 * rho * expit(2 * (v - rj)))
    return val, der


def log_phi0(N: int, r):
    val, _ = phi0_scaled(N, r)
    return np.log(val) - _rho(N) * np.atleast_1d(np.asarray(r, dtype=float))


def phi_lambda_dd0(N: int, r):
    """Second lam-derivative of Phi_lam(r) at lam = 0 (the log^2 integral); negative for r > 0."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty_like(r_arr)
    for j, rj in enumerate(r_arr):
        _, w, L = _v_rule(N, rj, 0.0)
        out[j] = -np.exp(-_rho(N) * rj) * np.sum(w * L**2)
    return float(out[0]) if np.ndim(r) == 0 else out


def drift_velocity(N: int, r):
    """V(r) = (N-1) coth r + 2 d/dr log Phi_0(r), the drift of the Phi_0-weighted density."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0):
        raise ValueError("drift velocity needs r > 0")
    val, der = phi0_scaled(N, r_arr)
    # (N-1)(coth r - 1) written without cancellation
    out = (N - 1) * 2.0 / np.expm1(2 * r_arr) + 2 * der / val
    return float(out[0]) if np.ndim(r) == 0 else out


# -- inversion constant -----------------------------------------------------

@lru_cache(maxsize=None)
def inversion_constant(N: int) -> float:
    """kappa_N making inverse o forward the identity.

    Calibrated once on u = exp(-r^2): since Phi_lam(0) = 1,
    u(0) = kappa_N int uhat(lam) |c(lam)|^{-2} dlam.
    """
    m = RadialManifold(Kind.HYPERBOLIC, N)
    g = panel_grid(m, 7.0, 0.5, order=12, u=lambda r: np.exp(-r**2))
    dl = 0.04
    lams = np.arange(0.0, 16.0 + dl / 2, dl)
    uhat = phi_matrix(N, lams, g.nodes) @ (g.weights * g.values)
    wl = np.full(lams.size, dl)
    wl[0] = dl / 2
    integral = 2.0 * np.sum(wl * uhat * c_inv_sq(N, lams))
    return float(1.0 / integral)


# -- transforms -------------------------------------------------------------

def lambda_grid(Lambda: float = LAMBDA_MAX, dlam: float = D_LAMBDA) -> np.ndarray:
    n = int(round(Lambda / dlam))
    return dlam * np.arange(-n, n + 1)


def _trap_weights(lams: np.ndarray) -> np.ndarray:
    w = np.gradient(lams)
    w[0] /= 2
    w[-1] /= 2
    return w


@dataclass
class RadialTransform:
    """Samples of uhat on a symmetric lam-grid plus the Plancherel density."""

    lambda_nodes: np.ndarray
    uhat: np.ndarray
    plancherel_weight: np.ndarray
    dim: int
    source: Callable | None = field(default=None, repr=False)

    def multiply(self, multiplier: Callable) -> "RadialTransform":
        src = self.source
        new_src = None if src is None else (lambda lam: src(lam) * multiplier(lam))
        return replace(self, uhat=self.uhat * multiplier(self.lambda_nodes), source=new_src)

    def at(self, Lambda: float, dlam: float) -> "RadialTransform":
        """Re-sample on another lam-grid (needs the source rule)."""
        if self.source is None:
            raise ValueError("transform has no source rule to re-sample")
        lams = lambda_grid(Lambda, dlam)
        return RadialTransform(lams, self.source(lams), c_inv_sq(self.dim, lams), self.dim, self.source)


def exterior_residual(u: RadialGridFunction, frac: float = 0.9) -> float:
    """Share of the L^1 mass carried by the outer (1-frac) of the radial grid."""
    tot = np.sum(u.weights * np.abs(u.values))
    if tot == 0:
        return 0.0
    outer = u.nodes >= frac * u.nodes[-1]
    return float(np.sum(u.weights[outer] * np.abs(u.values[outer])) / tot)


def _forward_values(N, nodes, wu, lams):
    lam_abs = np.abs(lams)
    uniq, inv = np.unique(lam_abs, return_inverse=True)
    return (phi_matrix(N, uniq, nodes) @ wu)[inv]


def forward_transform(u: RadialGridFunction, lams=None, residual_tol: float = 1e-8) -> RadialTransform:
    """uhat(lam) = int u Phi_lam dmu for radial u on H^N."""
    m = u.manifold
    if m.kind is not Kind.HYPERBOLIC:
        raise ValueError("spherical transform is defined on hyperbolic space")
    if residual_tol is not None and exterior_residual(u) > residual_tol:
        raise ValueError(f"u is not negligible near the truncation radius {u.nodes[-1]:g}")
    lams = lambda_grid() if lams is None else np.asarray(lams, dtype=float)
    nodes, wu, N = u.nodes.copy(), u.weights * u.values, m.dim

    def source(lam):
        return _forward_values(N, nodes, wu, np.asarray(lam, dtype=float))

    return RadialTransform(lams, source(lams), c_inv_sq(N, lams), N, source)


class TruncationError(RuntimeError):
    pass


def _inverse_values(T: RadialTransform, r: np.ndarray) -> np.ndarray:
    lams = T.lambda_nodes
    half = lams >= 0
    lp = lams[half]
    wl = _trap_weights(lams)[half] * np.where(lp == 0, 1.0, 2.0)
    coef = wl * T.uhat[half] * T.plancherel_weight[half]
    return inversion_constant(T.dim) * (coef @ phi_matrix(T.dim, lp, r))


def inverse_transform(T: RadialTransform, r, check: bool = False, tol: float = 1e-5) -> np.ndarray:
    """u(r) = kappa_N int uhat Phi_lam |c|^{-2} dlam on the symmetric lam-grid.

    With ``check=True`` the result is recomputed with Lambda doubled and the
    step halved; disagreement above ``tol`` (relative to max|u|) or a tail of
    uhat above 1e-12 of its peak raises :class:`TruncationError`.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = _inverse_values(T, r)
    if check:
        Lam = float(np.max(T.lambda_nodes))
        dl = float(T.lambda_nodes[1] - T.lambda_nodes[0])
        tail = np.abs(T.uhat[np.abs(T.lambda_nodes) > 0.9 * Lam])
        peak = np.max(np.abs(T.uhat))
        fine = _inverse_values(T.at(2 * Lam, dl / 2), r)
        scale = max(np.max(np.abs(fine)), 1e-300)
        if (peak > 0 and tail.size and tail.max() > 1e-12 * peak) or np.max(np.abs(fine - out)) > tol * scale:
            raise TruncationError(f"lam-truncation self-check failed; try Lambda >= {2 * Lam:g}")
    return out


def plancherel_norms(u: RadialGridFunction, T: RadialTransform) -> tuple[float, float]:
    """(int |u|^2 dmu, kappa_N int |uhat|^2 |c|^{-2} dlam)."""
    lhs = float(u.weights @ u.values**2)
    rhs = inversion_constant(T.dim) * float(np.sum(_trap_weights(T.lambda_nodes) * T.uhat**2 * T.plancherel_weight))
    return lhs, rhs


# -- derivative towers (d_rho / sinh rho)^m ---------------------------------

@lru_cache(maxsize=None)
def _tower(m: int, what: str):
    import sympy as sp

    rho, lam, tau = sp.symbols("rho lam tau", positive=True)
    f = sp.cos(lam * rho) if what == "cos" else sp.exp(-rho**2 / (4 * tau))
    for _ in range(m):
        f = sp.diff(f, rho) / sp.sinh(rho)
    f = sp.simplify(f)
    second = lam if what == "cos" else tau
    return sp.lambdify((second, rho), f, "numpy")


def tower_cos(m: int, lam, rho):
    """(d_rho / sinh rho)^m cos(lam rho), evaluated from the symbolic expansion."""
    if m == 0:
        return np.cos(np.asarray(lam) * np.asarray(rho))
    lam, rho = np.broadcast_arrays(np.asarray(lam, float), np.asarray(rho, float))
    return np.asarray(_tower(m, "cos")(lam, rho), dtype=float) * np.ones(lam.shape)


# -- singular Abel-type integrals -------------------------------------------

def abel_integral(f: Callable, rho: float, span: float, lam_scale: float = 0.0) -> float:
    """int_rho^{rho+span} f(s) / sqrt(cosh s - cosh rho) ds.

    The square-root endpoint singularity is removed with s = rho + w^2 on the
    first unit of the range (graded Gauss-Legendre panels in w); the rest is
    integrated in s with panels fine enough for oscillations of frequency
    ``lam_scale``.
    """
    x, gw = np.polynomial.legendre.leggauss(16)
    near = min(1.0, span)
    edges = np.concatenate([[0.0], np.sqrt(near) * np.geomspace(1e-4, 1.0, 14)])
    a, b = edges[:-1, None], edges[1:, None]
    w = ((b - a) * (x + 1) / 2 + a).ravel()
    ww = ((b - a) / 2 * gw).ravel()
    hx = w**2 / 2
    sinhc = np.where(hx > 0, np.sinh(hx) / np.where(hx > 0, hx, 1.0), 1.0)
    # ds/sqrt(cosh s - cosh rho) = 2 dw / sqrt(sinh(rho + w^2/2) sinh(w^2/2)/(w^2/2))
    jac = 2.0 / np.sqrt(np.sinh(rho + hx) * sinhc)
    total = np.sum(ww * jac * f(rho + w**2))
    if span > near:
        width = min(1.0, 4.0 / (lam_scale + 1e-12)) if lam_scale > 0 else 1.0
        npan = int(np.ceil((span - near) / width))
        e2 = np.linspace(rho + near, rho + span, npan + 1)
        a, b = e2[:-1, None], e2[1:, None]
        s = ((b - a) * (x + 1) / 2 + a).ravel()
        sw = ((b - a) / 2 * gw).ravel()
        den = np.sqrt(2 * np.sinh((s + rho) / 2) * np.sinh((s - rho) / 2))
        total += np.sum(sw * f(s) / den)
    return float(total)


# -- k_lambda and the heat kernel -------------------------------------------

def _k_direct(N, lam, rho):
    return inversion_constant(N) * c_inv_sq(N, lam) * phi_lambda(N, lam, rho)


def _k_odd_shape(N, lam, rho):
    return tower_cos((N - 1) // 2, lam, rho)


def _k_even_shape(N, lam, rho):
    m = N // 2
    span = 84.0 / (N - 1)

    def integrand(s):
        return np.sinh(s) * tower_cos(m, lam, s)

    return abel_integral(integrand, rho, span, lam_scale=abs(lam))


_CAL = (1.0, 1.0)


@lru_cache(maxsize=None)
def kernel_constant(N: int) -> float:
    """c_N in the lemma's odd/even formulas, matched to the direct route at (lam, rho) = (1, 1)."""
    lam, rho = _CAL
    shape = _k_odd_shape(N, lam, rho) if N % 2 else _k_even_shape(N, lam, rho)
    return float(_k_direct(N, lam, rho) / shape)


def k_lambda(N: int, lam: float, rho: float, method: str = "direct") -> float:
    """Spherical kernel k_lam(rho) of the multiplier representation.

    ``direct``: kappa_N |c|^{-2} Phi_lam(rho), the angular integral of h-bar h.
    ``closed_odd``: c_N (d/sinh)^{(N-1)/2} cos(lam rho) for odd N.
    ``abel_even``: c_N int_rho^inf sinh s (d/sinh)^{N/2} cos(lam s) / sqrt(cosh s - cosh rho) ds for even N.
    """
    if rho <= 0:
        raise ValueError("k_lambda needs rho > 0")
    if method == "direct":
        return float(_k_direct(N, lam, rho))
    if method == "closed_odd":
        if N % 2 == 0 or N < 3:
            raise ValueError("closed_odd needs odd N >= 3")
        return float(kernel_constant(N) * _k_odd_shape(N, lam, rho))
    if method == "abel_even":
        if N % 2:
            raise ValueError("abel_even needs even N")
        return float(kernel_constant(N) * _k_even_shape(N, lam, rho))
    raise ValueError(f"unknown method {method!r}")


def _heat_span(tau: float) -> float:
    return min(84.0, np.sqrt(168.0 * tau) + 1.0)


def heat_kernel_K0(N: int, b: float, rho, t: float):
    """Kernel of v_t = b (Delta + (N-1)^2/4) v on H^N (the a = 1 case).

    N = 3 uses the closed form (bt)^{-3/2} rho/sinh(rho) e^{-rho^2/4bt} up to
    the constant -c_3 sqrt(pi)/2; N = 2 uses the Abel integral
    (bt)^{-3/2} int_rho^inf s e^{-s^2/4bt} / sqrt(cosh s - cosh rho) ds with
    constant -c_2 sqrt(pi)/2.  Other N integrate e^{-b lam^2 t} k_lam over lam.
    """
    if t <= 0 or b <= 0:
        raise ValueError("need t > 0 and b > 0")
    tau = b * t
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if N == 3:
        c = -kernel_constant(3) * np.sqrt(np.pi) / 2
        out = c * tau**-1.5 * _x_over_sinh(rho_arr) * np.exp(-rho_arr**2 / (4 * tau))
    elif N == 2:
        c = -kernel_constant(2) * np.sqrt(np.pi) / 2
        span = _heat_span(tau)
        out = np.array([
            abel_integral(lambda s: s * np.exp(-s**2 / (4 * tau)), r, span) for r in rho_arr
        ])
        out = c * tau**-1.5 * out
    else:
        lam_max = min(LAMBDA_MAX * 4, np.sqrt(80.0 / tau))
        lams = np.linspace(0.0, lam_max, 4001)
        k = inversion_constant(N) * c_inv_sq(N, lams)[:, None] * phi_matrix(N, lams, rho_arr)
        out = 2 * np.trapz(np.exp(-tau * lams**2)[:, None] * k, lams, axis=0)
    return float(out[0]) if np.ndim(rho) == 0 else out


# -- the transform of the jump kernel ----------------------------------------

def jhat(k, N: int, lam) -> np.ndarray:
    """Jhat(lam) = int J Phi_lam dmu (the source of the nonlocal multiplier)."""
    s, w = k.radial_quad()
    dens = sphere_area(N - 1) * np.sinh(s) ** (N - 1)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    out = _forward_values(N, s, w * k(s) * dens, lam_arr)
    return float(out[0]) if np.ndim(lam) == 0 else out


@dataclass(frozen=True)
class JhatExpansion:
    """Jhat(lam) = a - b lam^2 + lam^2 f(lam)."""

    a: float
    b: float
    kernel: object
    dim: int

    def f(self, lam):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam == 0):
            raise ValueError("f is sampled at lam != 0")
        return (jhat(self.kernel, self.dim, lam) - self.a + self.b * lam**2) / lam**2


def jhat_expansion(k, N: int) -> JhatExpansion:
    s, w = k.radial_quad()
    dens = sphere_area(N - 1) * np.sinh(s) ** (N - 1)
    a = float(np.sum(w * k(s) * phi_lambda(N, 0.0, s) * dens))
    b = float(-0.5 * np.sum(w * k(s) * phi_lambda_dd0(N, s) * dens))
    return JhatExpansion(a, b, k, N)
