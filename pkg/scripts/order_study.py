"""Temporal convergence order of the delay integrator on the manufactured problem.

    python scripts/order_study.py --halvings 4
"""
import argparse

import numpy as np

from neutral_periodic.ivp import HistorySegment, simulate
from neutral_periodic.problem import DEFAULT_RECIPE, build_problem, parse_recipe


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dt0", type=float, default=1 / 40)
    parser.add_argument("--halvings", type=int, default=3)
    parser.add_argument("--horizon", type=float, default=1.0)
    args = parser.parse_args(argv)

    spec = build_problem("manufactured", tau=0.3, xi=0.2)
    sol = parse_recipe(DEFAULT_RECIPE, spec.omega)
    exact = sol.coefficients(args.horizon, spec.n_modes)
    previous = None
    print(f"{'dt':>10} {'L2 error':>12} {'ratio':>8}")
    for k in range(args.halvings + 1):
        dt = args.dt0 / 2**k
        history = HistorySegment.from_function(
            lambda t: sol.coefficients(t[:, 0], spec.n_modes), spec.tau, dt)
        traj = simulate(spec, history, args.horizon, dt)
        err = float(np.linalg.norm(traj.values[-1] - exact))
        ratio = "" if previous is None else f"{previous / err:8.3f}"
        print(f"{dt:10.6f} {err:12.4e} {ratio}")
        previous = err


if __name__ == "__main__":
    main()
