#!/usr/bin/env python3
"""Log-log slopes of sup_rho |K0(rho, t)| for the translated heat kernel on H^2 and H^3."""
import argparse

import numpy as np

from nldiffusion.hfourier import heat_kernel_K0


def slope(N, b, ts, rho):
    sup = [np.max(np.abs(heat_kernel_K0(N, b, rho, t))) for t in ts]
    return np.polyfit(np.log(ts), np.log(sup), 1)[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--b", type=float, default=8.0)
    args = ap.parse_args()
    rho = np.linspace(1e-3, 40.0, 400)
    large = np.geomspace(10, 160, 9)
    small = np.geomspace(1e-3, 1e-2, 9)
    for N in (2, 3):
        print(f"N={N}: large-t slope {slope(N, args.b, large, rho):+.4f} (target -1.5), "
              f"small-t slope {slope(N, args.b, small, np.linspace(1e-4, 2.0, 400)):+.4f} (target {-N / 2:g})")


if __name__ == "__main__":
    main()
