"""Distance of a zero-history trajectory to the periodic solution, period by period.

    python scripts/attraction_study.py --periods 20 --dt 0.0015625
"""
import argparse

import numpy as np

from neutral_periodic.ivp import HistorySegment, distance_to_periodic, history_from_periodic, simulate
from neutral_periodic.problem import build_problem
from neutral_periodic.solver import picard_solve


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", type=int, default=64)
    parser.add_argument("--periods", type=int, default=20)
    parser.add_argument("--dt", type=float, default=1 / 640)
    parser.add_argument("--out", default=None, help="optional CSV path for the distances")
    args = parser.parse_args(argv)

    spec = build_problem("example51", a0=0.01, a1=0.01, L=0.01, n_modes=args.modes,
                         m_x=args.modes * 4 + 1, convention="paper")
    u_per = picard_solve(spec, tol=1e-12).solution
    delay = max(spec.tau, spec.xi)

    zero = simulate(spec, HistorySegment.constant(np.zeros(spec.n_modes), delay, args.dt),
                    float(args.periods), args.dt)
    periodic = simulate(spec, history_from_periodic(u_per, delay, args.dt),
                        float(args.periods), args.dt)
    d_zero = distance_to_periodic(zero, u_per, 0.5, "eigen")
    d_per = distance_to_periodic(periodic, u_per, 0.5, "eigen")

    print(f"{'period':>6} {'zero start':>12} {'periodic start':>15}")
    for k, (a, b) in enumerate(zip(d_zero, d_per)):
        print(f"{k:6d} {a:12.4e} {b:15.4e}")
    if args.out:
        np.savetxt(args.out, np.column_stack([np.arange(len(d_zero)), d_zero, d_per]),
                   delimiter=",", header="period_index,zero_start,periodic_start", comments="")


if __name__ == "__main__":
    main()
