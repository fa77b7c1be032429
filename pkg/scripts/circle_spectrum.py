#!/usr/bin/env python3
"""Compare the discrete circle spectrum with the cosine-integral oracle for several grid sizes."""
import numpy as np

from nldiffusion.geometry import Kind, RadialManifold, circle_grid
from nldiffusion.kernels import Kernel, normalize_mass
from nldiffusion.nonlocal_op import assemble
from nldiffusion.spectral import eigendecompose, oracle_circle, pair_eigenvalues

m = RadialManifold(Kind.CIRCLE)
k = normalize_mass(Kernel(1.0, 4), m)
for n in (128, 256, 512, 1024):
    S = eigendecompose(assemble(m, k, circle_grid(n)))
    _, err = pair_eigenvalues(S.gamma, oracle_circle(k, 10))
    print(f"n={n:5d}  lambda0={S.lam[0]:+.2e}  lambda1={S.lam[1]:.6f}  oracle err={err.max():.2e}  "
          f"ortho={S.orthonormality_defect():.1e}")
