"""Model manifolds with metric dr^2 + psi(r)^2 dtheta^2.

Radial coordinates are measured from the pole ``O``.  The circle is the one
exception: there the coordinate is the angle in [-pi, pi) and grids cover the
full period, because compact spectral checks on S^1 need non-radial data.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import gamma


class Kind(str, Enum):
    EUCLIDEAN = "euclidean"
    SPHERE = "sphere"
    HYPERBOLIC = "hyperbolic"
    CIRCLE = "circle"


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^n (S^0 has two points)."""
    return 2.0 * np.pi ** ((n + 1) / 2) / gamma((n + 1) / 2)


@dataclass(frozen=True)
class RadialManifold:
    kind: Kind
    dim: int = 2

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.CIRCLE and self.dim != 1:
            object.__setattr__(self, "dim", 1)
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    @property
    def r_max(self) -> float:
        if self.kind is Kind.SPHERE:
            return np.pi
        if self.kind is Kind.CIRCLE:
            return np.pi
        return np.inf

    @property
    def compact(self) -> bool:
        return self.kind in (Kind.SPHERE, Kind.CIRCLE)

    @property
    def omega(self) -> float:
        """Measure of the unit sphere S^{N-1} of directions at O."""
        return sphere_area(self.dim - 1)

    def psi(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind is Kind.SPHERE:
            return np.sin(r)
        if self.kind is Kind.HYPERBOLIC:
            return np.sinh(r)
        return r.copy() if self.kind is Kind.EUCLIDEAN else np.ones_like(r)

    def dpsi(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind is Kind.SPHERE:
            return np.cos(r)
        if self.kind is Kind.HYPERBOLIC:
            return np.cosh(r)
        return np.ones_like(r) if self.kind is Kind.EUCLIDEAN else np.zeros_like(r)

    def density(self, r):
        """Radial volume density omega_{N-1} psi(r)^{N-1} of d(mu)."""
        if self.kind is Kind.CIRCLE:
            return np.ones_like(np.asarray(r, dtype=float))
        return self.omega * self.psi(r) ** (self.dim - 1)

    def half_chord2(self, x):
        """The law-of-cosines building block: sin^2(x/2), sinh^2(x/2) or (x/2)^2."""
        x = np.asarray(x, dtype=float)
        if self.kind is Kind.SPHERE:
            return np.sin(x / 2) ** 2
        if self.kind is Kind.HYPERBOLIC:
            return np.sinh(x / 2) ** 2
        return (x / 2) ** 2

    def _from_half_chord2(self, s):
        s = np.maximum(s, 0.0)
        if self.kind is Kind.SPHERE:
            return 2.0 * np.arcsin(np.sqrt(np.minimum(s, 1.0)))
        if self.kind is Kind.HYPERBOLIC:
            return 2.0 * np.arcsinh(np.sqrt(s))
        return 2.0 * np.sqrt(s)

    def check_radius(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind is Kind.CIRCLE:
            return
        if np.any(r < 0) or np.any(r > self.r_max + 1e-12) or np.any(~np.isfinite(r)):
            raise ValueError(f"radius outside the radial domain of {self.kind.value}")

    def distance(self, r1, r2, gamma_=0.0):
        """Geodesic distance between (r1, e1) and (r2, e2) with angle(e1, e2) = gamma_.

        Uses the half-angle form of the law of cosines, e.g. on H^N

            sinh^2(d/2) = sinh^2((r1-r2)/2) + sinh r1 sinh r2 sin^2(gamma/2),

        which is exact at gamma = 0 and free of cancellation for nearby points.
        On the circle ``r1`` and ``r2`` are angles and ``gamma_`` is ignored.
        """
        if self.kind is Kind.CIRCLE:
            d = np.abs(np.asarray(r1, float) - np.asarray(r2, float)) % (2 * np.pi)
            return np.minimum(d, 2 * np.pi - d)
        self.check_radius(r1)
        self.check_radius(r2)
        g = np.asarray(gamma_, dtype=float)
        if np.any(g < 0) or np.any(g > np.pi + 1e-12):
            raise ValueError("angle must lie in [0, pi]")
        r1 = np.asarray(r1, dtype=float)
        r2 = np.asarray(r2, dtype=float)
        s = self.half_chord2(r1 - r2) + self.psi(r1) * self.psi(r2) * np.sin(g / 2) ** 2
        return self._from_half_chord2(s)


def geodesic_distance(m: RadialManifold, r1, r2, gamma_=0.0):
    return m.distance(r1, r2, gamma_)


@dataclass
class RadialGridFunction:
    """Values on radial nodes with quadrature weights for d(mu).

    ``weights`` already include the sphere factor omega_{N-1}, so
    ``weights @ values`` approximates the integral of u over M.
    """

    nodes: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    manifold: RadialManifold
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if not (self.nodes.shape == self.values.shape == self.weights.shape):
            raise ValueError("nodes, values and weights must have equal shapes")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")

    def with_values(self, values) -> "RadialGridFunction":
        return RadialGridFunction(self.nodes, values, self.weights, self.manifold, dict(self.meta))

    def integral(self) -> float:
        return float(self.weights @ self.values)

    def __len__(self):
        return self.nodes.size


# -- grids -------------------------------------------------------------------

def _sample(m, nodes, weights, u, **meta):
    values = np.zeros_like(nodes) if u is None else np.asarray(u(nodes), dtype=float)
    return RadialGridFunction(nodes, values * np.ones_like(nodes), weights, m, meta)


def uniform_grid(m: RadialManifold, r_max: float, h: float, u=None) -> RadialGridFunction:
    """Nodes j*h on [0, r_max] with composite trapezoid weights."""
    if m.kind is Kind.CIRCLE:
        raise ValueError("use circle_grid for the circle")
    n = int(np.floor(r_max / h + 1e-9))
    nodes = h * np.arange(n + 1)
    m.check_radius(nodes)
    w = np.full(nodes.size, h)
    w[0] = w[-1] = h / 2
    return _sample(m, nodes, w * m.density(nodes), u, scheme="uniform", h=h)


def panel_grid(m: RadialManifold, r_max: float, panel: float, order: int = 8, u=None) -> RadialGridFunction:
    """Composite Gauss-Legendre panels of width ~``panel`` on [0, r_max]."""
    if m.kind is Kind.CIRCLE:
        raise ValueError("use circle_grid for the circle")
    npan = max(1, int(np.ceil(r_max / panel - 1e-9)))
    edges = np.linspace(0.0, r_max, npan + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = ((b - a) * (x + 1) / 2 + a).ravel()
    weights = ((b - a) / 2 * w).ravel()
    m.check_radius(nodes)
    return _sample(m, nodes, weights * m.density(nodes), u, scheme="panels", panel=r_max / npan, order=order)


def sphere_grid(m: RadialManifold, n: int, u=None) -> RadialGridFunction:
    """Gauss-Legendre nodes in t = cos r on the whole sphere (S^2 is exact for polynomials in cos r)."""
    if m.kind is not Kind.SPHERE:
        raise ValueError("sphere_grid needs a sphere")
    t, w = np.polynomial.legendre.leggauss(n)
    nodes = np.arccos(t[::-1])
    # dt = sin r dr, so for N = 2 the GL weights already carry psi^{N-1}
    jac = np.sin(nodes) ** (m.dim - 2)
    return _sample(m, nodes, m.omega * w[::-1] * jac, u, scheme="gauss-cos")


def circle_grid(n: int, u=None) -> RadialGridFunction:
    """Uniform angles on [-pi, pi) with periodic trapezoid weights."""
    m = RadialManifold(Kind.CIRCLE, 1)
    nodes = -np.pi + 2 * np.pi * np.arange(n) / n
    return _sample(m, nodes, np.full(n, 2 * np.pi / n), u, scheme="circle")


# -- Laplace-Beltrami --------------------------------------------------------

def fd_weights(z: float, x: np.ndarray, k: int) -> np.ndarray:
    """Finite-difference weights for the k-th derivative at z (Fornberg's recursion)."""
    n = len(x)
    c = np.zeros((n, k + 1))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, k)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, k]


def laplace_beltrami_radial(m: RadialManifold, u: RadialGridFunction, stencil: int = 5) -> RadialGridFunction:
    """u'' + (N-1) psi'/psi u' on the grid nodes.

    Radial data are extended evenly through r = 0, so nodes near the pole use
    mirrored ghost values and the pole itself gets N u''(0).  The circle uses
    the periodic second difference.
    """
    n = len(u)
    if n < 3:
        raise ValueError("need at least 3 nodes")
    r, f = u.nodes, u.values
    if m.kind is Kind.CIRCLE:
        ext_r = np.concatenate([r[-stencil:] - 2 * np.pi, r, r[:stencil] + 2 * np.pi])
        ext_f = np.concatenate([f[-stencil:], f, f[:stencil]])
        off = stencil
    else:
        mirror = r[1:] if r[0] == 0.0 else r
        mf = f[1:] if r[0] == 0.0 else f
        k = min(stencil, mirror.size)
        ext_r = np.concatenate([-mirror[:k][::-1], r])
        ext_f = np.concatenate([mf[:k][::-1], f])
        off = k
    half = stencil // 2
    out = np.empty(n)
    for i in range(n):
        c = i + off
        lo = max(0, min(c - half, ext_r.size - stencil))
        idx = slice(lo, lo + stencil)
        xs, fs = ext_r[idx], ext_f[idx]
        d2 = fd_weights(r[i], xs, 2) @ fs
        if m.kind is Kind.CIRCLE:
            out[i] = d2
        elif r[i] == 0.0:
            out[i] = m.dim * d2
        else:
            d1 = fd_weights(r[i], xs, 1) @ fs
            out[i] = d2 + (m.dim - 1) * m.dpsi(r[i]) / m.psi(r[i]) * d1
    return u.with_values(out)
