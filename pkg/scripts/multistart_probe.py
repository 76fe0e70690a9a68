#!/usr/bin/env python3
"""Multiplicity probe: does the optimum depend on where the solver starts?

For random utilities, re-solves each instance from several random marginal
initializations and reports the largest within-instance spread between the
resulting rules. Spreads at solver precision are evidence the optimum is
unique for these draws; genuine multiplicity would show up as O(1) spread.

    python scripts/multistart_probe.py --instances 100 --restarts 10
"""

import argparse

import numpy as np

from infochoice import Menu, Prior, SolveOptions, solve_mi


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=100)
    parser.add_argument("--restarts", type=int, default=10)
    parser.add_argument("--actions", type=int, default=3)
    parser.add_argument("--states", type=int, default=3)
    parser.add_argument("--scale", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    worst = 0.0
    worst_instance = None
    for k in range(args.instances):
        weights = rng.uniform(0.2, 1.0, args.states)
        prior = Prior([f"s{i}" for i in range(args.states)],
                      weights / weights.sum())
        menu = Menu([f"a{i}" for i in range(args.actions)],
                    rng.normal(0.0, 1.0, size=(args.actions, args.states)))
        baseline = None
        for _ in range(args.restarts):
            init = rng.dirichlet(np.ones(args.actions))
            result = solve_mi(menu, prior, args.scale,
                              SolveOptions(init_marginals=init))
            if baseline is None:
                baseline = result.scr.probs
            else:
                spread = float(np.abs(result.scr.probs - baseline).max())
                if spread > worst:
                    worst, worst_instance = spread, k
    print(f"seed                {args.seed}")
    print(f"instances x starts  {args.instances} x {args.restarts}")
    print(f"max rule spread     {worst:.3e}"
          + (f" (instance {worst_instance})" if worst_instance is not None else ""))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
