#!/usr/bin/env python3
"""Emit the binary indirect-cost surface as a CSV grid.

For two states and two actions, a choice rule is pinned down by the
probabilities (s1x, s1y) of taking action 1 in each state. This script
tabulates the minimal information cost of every rule on a grid, ready for
external plotting of the surface.

    python scripts/indirect_cost_surface.py --resolution 40 --scale 1.0 > surface.csv
"""

import argparse
import sys

import numpy as np

from infochoice import MutualInformation, Prior, SCR, kappa


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--resolution", type=int, default=40,
                        help="grid points per axis")
    parser.add_argument("--scale", type=float, default=1.0,
                        help="mutual information scale")
    parser.add_argument("--prior-x", type=float, default=0.5,
                        help="prior weight on the first state")
    args = parser.parse_args()

    prior = Prior(["x", "y"], [args.prior_x, 1.0 - args.prior_x])
    spec = MutualInformation(prior, args.scale)
    axis = np.linspace(0.0, 1.0, args.resolution + 1)

    writer = sys.stdout
    writer.write("s1x,s1y,kappa\n")
    for x in axis:
        for y in axis:
            scr = SCR([[x, y], [1.0 - x, 1.0 - y]])
            writer.write(f"{x:.6f},{y:.6f},{kappa(spec, scr, prior):.12f}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
