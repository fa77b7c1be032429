#!/usr/bin/env python3
"""Print the eps-ladder of ||L_eps u - q Delta u||_inf on H^2 and S^2, literal and centered forms."""
import argparse

import numpy as np

from nldiffusion.geometry import Kind, RadialManifold
from nldiffusion.kernels import Kernel, normalize_mass
from nldiffusion.nonlocal_op import infinitesimal_limit_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025])
    ap.add_argument("--nodes-per-support", type=int, default=32)
    args = ap.parse_args()
    for kind, f in ((Kind.HYPERBOLIC, lambda r: np.exp(-r**2)), (Kind.SPHERE, np.cos)):
        m = RadialManifold(kind, 2)
        k = normalize_mass(Kernel(1.0, 4), RadialManifold(Kind.EUCLIDEAN, 2))
        for form in ("centered", "literal"):
            rows = infinitesimal_limit_study(m, k, f, args.eps, nodes_per_support=args.nodes_per_support, form=form)
            print(f"{kind.value} N=2 {form}")
            for row in rows:
                print(f"  eps={row.eps:<7g} error={row.error:.3e} order={row.order:.3f}")


if __name__ == "__main__":
    main()
