"""Compactly supported jump kernels J(s) = c (1 - (s/delta)^2)_+^p."""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .geometry import Kind, RadialManifold, sphere_area

_GL_ORDER = 96


class Normalization(str, Enum):
    MASS = "mass"
    SPECTRAL = "spectral"
    NONE = "none"


@dataclass(frozen=True)
class Kernel:
    delta: float = 1.0
    p: int = 4
    c: float = 1.0
    mode: Normalization = Normalization.NONE

    def __post_init__(self):
        object.__setattr__(self, "mode", Normalization(self.mode))
        if not self.delta > 0:
            raise ValueError("support radius must be positive")
        if self.p < 0 or int(self.p) != self.p:
            raise ValueError("smoothness exponent must be a nonnegative integer")
        if not self.c > 0:
            raise ValueError("normalization constant must be positive")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        x = 1.0 - (s / self.delta) ** 2
        inside = s < self.delta
        return np.where(inside, self.c * np.where(inside, x, 0.0) ** self.p, 0.0)

    def radial_quad(self, order: int = _GL_ORDER):
        """Gauss-Legendre nodes/weights on [0, delta].

        J is a polynomial in s^2 on its support, so this is essentially exact
        against smooth radial weights.
        """
        x, w = np.polynomial.legendre.leggauss(order)
        return self.delta * (x + 1) / 2, self.delta * w / 2


def _check_support(k: Kernel, m: RadialManifold):
    if m.kind in (Kind.SPHERE, Kind.CIRCLE) and k.delta > np.pi:
        raise ValueError("kernel support exceeds the injectivity radius pi")


def mass(k: Kernel, m: RadialManifold) -> float:
    """Integral of J(s_{xO}) over M."""
    _check_support(k, m)
    s, w = k.radial_quad()
    return float(np.sum(w * k(s) * m.density(s)) * (2.0 if m.kind is Kind.CIRCLE else 1.0))


def normalize_mass(k: Kernel, m: RadialManifold) -> Kernel:
    """Rescale c so that J integrates to one over M."""
    total = mass(replace(k, c=1.0), m)
    if not total > 0:
        raise ValueError("kernel profile has zero mass")
    return replace(k, c=1.0 / total, mode=Normalization.MASS)


def spectral_coefficient(k: Kernel, m: RadialManifold) -> float:
    """a = integral of J Phi_0 d(mu) on H^N."""
    from .hfourier import phi_lambda

    if m.kind is not Kind.HYPERBOLIC:
        raise ValueError("the spectral normalization is defined on hyperbolic space only")
    s, w = k.radial_quad()
    return float(np.sum(w * k(s) * phi_lambda(m.dim, 0.0, s) * m.density(s)))


def normalize_spectral(k: Kernel, m: RadialManifold) -> Kernel:
    """Rescale c so that a = 1; differs from the mass normalization."""
    a = spectral_coefficient(replace(k, c=1.0), m)
    return replace(k, c=1.0 / a, mode=Normalization.SPECTRAL)


def second_moment_q(k: Kernel, dim: int) -> float:
    """q = (1/2N) int_{R^N} J(|z|) |z|^2 dz, the diffusivity of the local limit."""
    s, w = k.radial_quad()
    return float(sphere_area(dim - 1) / (2 * dim) * np.sum(w * k(s) * s ** (dim + 1)))


def rescale(k: Kernel, eps: float, dim: int, m: RadialManifold | None = None) -> Kernel:
    """J_eps(s) = eps^{-N} J(s/eps); Euclidean mass is unchanged."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    out = replace(k, delta=eps * k.delta, c=k.c * eps ** (-dim))
    if m is not None:
        _check_support(out, m)
    return out
