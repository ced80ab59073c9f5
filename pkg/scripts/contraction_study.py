"""Observed Picard contraction ratios against the certified constant.

Sweeps the size of the nonlinearity on the example problem and prints, for
each setting, the certified constant, the largest observed ratio, and the
iteration count.

    python scripts/contraction_study.py --modes 32
"""
import argparse

import numpy as np

from neutral_periodic.hypotheses import check_example51, contraction_constant
from neutral_periodic.problem import build_problem
from neutral_periodic.solver import picard_solve


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", type=int, default=64)
    parser.add_argument("--time-grid", type=int, default=256)
    parser.add_argument("--convention", default="paper", choices=["eigen", "paper"])
    parser.add_argument("--tol", type=float, default=1e-10)
    args = parser.parse_args(argv)

    print(f"{'size':>8} {'F3 lhs':>10} {'kappa':>10} {'observed':>10} {'iters':>6} status")
    for size in np.geomspace(1e-3, 0.1, 7):
        spec = build_problem("example51", a0=size, a1=size, L=size, n_modes=args.modes,
                             m_t=args.time_grid, m_x=args.modes * 4 + 1,
                             convention=args.convention)
        kappa = contraction_constant(spec, args.convention)
        result = picard_solve(spec, tol=args.tol, max_iter=200, guaranteed=False)
        f3 = check_example51(spec)["F3"].lhs
        print(f"{size:8.4f} {f3:10.4g} {kappa:10.4g} {result.max_ratio:10.4g} "
              f"{result.iterations:6d} {result.status}")


if __name__ == "__main__":
    main()
