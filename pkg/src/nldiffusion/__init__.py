"""Nonlocal diffusion on spherically symmetric model manifolds.

Modules: ``geometry`` (model spaces, grids, radial Laplacian), ``kernels``
(jump kernels), ``nonlocal_op`` (discrete convolution, local limit),
``evolution`` (time stepping, functionals), ``spectral`` (compact spectra and
oracles), ``hfourier`` (radial harmonic analysis on H^N), ``experiments`` and
``cli``.
"""
from .geometry import Kind, RadialGridFunction, RadialManifold, geodesic_distance, laplace_beltrami_radial
from .kernels import Kernel, Normalization, normalize_mass, normalize_spectral, rescale, second_moment_q
from .nonlocal_op import ConvolutionMatrix, apply_L, assemble, infinitesimal_limit_study
from .evolution import check_order_preservation, evolve, functional
from .spectral import SpectralData, decay_report, eigendecompose, oracle_circle, oracle_sphere
from .hfourier import (
    JhatExpansion,
    RadialTransform,
    c_inv_sq,
    drift_velocity,
    forward_transform,
    heat_kernel_K0,
    inverse_transform,
    jhat_expansion,
    k_lambda,
    phi_lambda,
    phi_lambda_dd0,
)

__version__ = "0.1.0"
