"""Command line entry point: check | solve | simulate | compare | manufacture.

Exit codes: 0 success, 1 failure of the requested property (FAIL verdict,
no convergence, distance above threshold), 2 UNKNOWN verdict, 3 invalid
configuration or input.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import config as cfg
from .hypotheses import Verdict, build_report
from .ivp import HistorySegment, distance_to_periodic, history_from_periodic, simulate
from .periodic import PeriodicTrajectory
from .problem import EvaluationError, ProblemSpec, build_problem, parse_recipe
from .solver import fixed_point_residual, picard_solve
from .spectral import forward_transform, grid, inverse_transform

log = logging.getLogger("neutral_periodic")

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_CONFIG = 0, 1, 2, 3

_SPEC_KEYS = ("omega", "tau", "xi", "alpha", "a0", "a1", "L", "L1", "L2", "mu1", "mu2",
              "gamma", "lipschitz", "convention", "interpolation", "strict_delays")


def problem_from_config(conf: cfg.RunConfig) -> ProblemSpec:
    params = {key: getattr(conf, key) for key in _SPEC_KEYS if getattr(conf, key) is not None}
    params.update(n_modes=conf.modes, m_t=conf.time_grid, m_x=conf.space_grid)
    if conf.K is not None:
        params["K"] = conf.K
    if conf.problem in ("manufactured", "manufactured_linear"):
        params["recipe"] = conf.recipe
        if conf.problem == "manufactured" and conf.g_scale is not None:
            params["g_scale"] = conf.g_scale
    spec = build_problem(conf.problem, **params)
    hidden = [name for name in conf.undeclared.split(",") if name]
    return spec.with_(**{name: None for name in hidden}) if hidden else spec


# output helpers

def write_atomic(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def field_csv(times: np.ndarray, coeffs: np.ndarray, m_x: int) -> str:
    """``t,x,u`` rows, t-major, at the interior space nodes."""
    x = grid(m_x)
    values = inverse_transform(coeffs, m_x)
    table = np.column_stack([np.repeat(times, x.size), np.tile(x, times.size), values.ravel()])
    lines = ["t,x,u"]
    lines.extend(",".join("%.17g" % v for v in row) for row in table)
    return "\n".join(lines) + "\n"


def read_solution_csv(path, spec: ProblemSpec) -> PeriodicTrajectory:
    """A periodic solution written by ``solve``, back in spectral form on the spec's grid."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"periodic solution {path} does not exist")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n_x = spec.m_x - 1
    if data.shape != (spec.m_t * n_x, 3):
        raise ValueError(f"{path} has {data.shape[0]} rows; the grid needs {spec.m_t * n_x}")
    values = data[:, 2].reshape(spec.m_t, n_x)
    return PeriodicTrajectory(spec.omega, forward_transform(values, spec.n_modes))


def _report(pairs, conf: cfg.RunConfig, command: str) -> str:
    lines = [f"command: {command}"]
    lines += [f"{key}: {_fmt(value)}" for key, value in pairs]
    lines += [f"config.{key}: {cfg._format(value)}" for key, value in conf.items()
              if value is not None]
    return "\n".join(lines) + "\n"


def _finish(out: Path, command: str, pairs, conf: cfg.RunConfig) -> None:
    write_atomic(out / f"{command}_report.txt", _report(pairs, conf, command))
    write_atomic(out / f"{command}_effective.cfg", conf.to_text())


def _initial(conf: cfg.RunConfig, spec: ProblemSpec) -> PeriodicTrajectory:
    if conf.initial == "zero":
        return spec.zero_trajectory()
    rng = np.random.default_rng(conf.seed)
    n = np.arange(1, spec.n_modes + 1)
    values = rng.standard_normal((spec.m_t, spec.n_modes)) * n**-3.0
    return PeriodicTrajectory(spec.omega, values)


def _solve(conf, spec):
    guaranteed = build_report(spec).mild_verdict is Verdict.PASS
    return picard_solve(spec, _initial(conf, spec), tol=conf.tol, max_iter=conf.max_iter,
                        damping=conf.damping, guaranteed=guaranteed)


def _solve_pairs(result):
    return [("status", result.status), ("converged", result.converged),
            ("iterations", result.iterations), ("residual", result.residual),
            ("max_ratio", result.max_ratio),
            ("ratios", " ".join("%.6g" % r for r in result.contraction_ratios)),
            ("differences", " ".join("%.6g" % d for d in result.differences))]


def _default_dt(conf: cfg.RunConfig, spec: ProblemSpec) -> float:
    if conf.dt is not None:
        return conf.dt
    positive = [d for d in (spec.tau, spec.xi) if d > 0]
    dt = spec.omega / 640
    if positive:
        dt = min(dt, min(positive) / 4)
    return dt


# commands

def cmd_check(conf, spec, out):
    report = build_report(spec)
    _finish(out, "check", [(line.split(": ", 1)[0], line.split(": ", 1)[1])
                           for line in report.lines()], conf)
    return {Verdict.PASS: EXIT_OK, Verdict.FAIL: EXIT_FAIL,
            Verdict.UNKNOWN: EXIT_UNKNOWN}[report.mild_verdict]


def cmd_solve(conf, spec, out):
    result = _solve(conf, spec)
    write_atomic(out / "solution.csv", field_csv(spec.times, result.solution.values, spec.m_x))
    _finish(out, "solve", _solve_pairs(result), conf)
    return EXIT_OK if result.converged else EXIT_FAIL


def _run_ivp(conf, spec, u_per):
    dt = _default_dt(conf, spec)
    d = max(spec.tau, spec.xi)
    if conf.history == "periodic":
        history = history_from_periodic(u_per, d, dt, spec.interpolation)
    else:
        start = np.zeros(spec.n_modes)
        if conf.history == "first_mode":
            start[0] = 1.0
        history = HistorySegment.constant(start, d, dt)
    traj = simulate(spec, history, conf.horizon, dt)
    keep = slice(None, None, conf.stride)
    csv = field_csv(traj.times[keep], traj.values[keep], spec.m_x)
    return traj, dt, csv


def _periodic_solution(conf, spec):
    if conf.solution is not None:
        return read_solution_csv(conf.solution, spec), [("periodic_source", conf.solution)]
    result = _solve(conf, spec)
    if not result.converged:
        raise RuntimeError(f"in-run periodic solve did not converge ({result.status})")
    return result.solution, [("periodic_source", "solved"),
                             ("periodic_residual", result.residual)]


def cmd_simulate(conf, spec, out):
    pairs = []
    u_per = None
    if conf.history == "periodic":
        u_per, pairs = _periodic_solution(conf, spec)
    traj, dt, csv = _run_ivp(conf, spec, u_per)
    write_atomic(out / "trajectory.csv", csv)
    final = traj.values[-1]
    pairs += [("dt", dt), ("steps", traj.times.size - 1), ("horizon", traj.times[-1]),
              ("final_l2_norm", float(np.sqrt(final @ final)))]
    _finish(out, "simulate", pairs, conf)
    return EXIT_OK


def cmd_compare(conf, spec, out):
    u_per, pairs = _periodic_solution(conf, spec)
    traj, dt, csv = _run_ivp(conf, spec, u_per)
    dist = distance_to_periodic(traj, u_per, spec.alpha, spec.convention, spec.interpolation)
    write_atomic(out / "trajectory.csv", csv)
    rows = ["period_index,distance"] + [f"{i},{'%.17g' % d}" for i, d in enumerate(dist)]
    write_atomic(out / "distance.csv", "\n".join(rows) + "\n")
    ok = dist[-1] <= conf.threshold
    pairs += [("dt", dt), ("periods", dist.size), ("final_distance", dist[-1]),
              ("threshold", conf.threshold), ("within_threshold", bool(ok)),
              ("non_increasing", bool(np.all(np.diff(dist) <= 1e-12)))]
    _finish(out, "compare", pairs, conf)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_manufacture(conf, spec, out):
    solution = parse_recipe(conf.recipe, spec.omega)
    exact = solution.trajectory(spec.m_t, spec.n_modes)
    residual = fixed_point_residual(spec, exact)
    write_atomic(out / "exact_solution.csv", field_csv(spec.times, exact.values, spec.m_x))
    write_atomic(out / "problem.cfg", conf.to_text())
    _finish(out, "manufacture", [("recipe", conf.recipe), ("max_mode", solution.max_mode()),
                                 ("exact_residual", residual)], conf)
    return EXIT_OK


# words in validation messages -> config keys that can cause them
_MESSAGE_KEYS = {"n_modes": "modes", "M_x": "space_grid", "space grid": "space_grid",
                 "omega": "omega", "period": "omega", "tau": "tau", "xi": "xi",
                 "alpha": "alpha", "recipe": "recipe", "mode": "modes"}


def _blame(message: str, origins: dict) -> str:
    places = []
    for word, key in _MESSAGE_KEYS.items():
        if word in message and key in origins and origins[key] not in places:
            places.append(origins[key])
    return f" (set at {', '.join(places)})" if places else ""


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "simulate": cmd_simulate,
            "compare": cmd_compare, "manufacture": cmd_manufacture}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neutral-periodic",
        description="Periodic solutions of a neutral parabolic delay equation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--modes", type=int, help="number of sine modes N")
        p.add_argument("--time-grid", type=int, help="time grid points per period M_t")
        p.add_argument("--space-grid", type=int, help="space grid parameter M_x")
        p.add_argument("--tol", type=float, help="Picard tolerance")
        p.add_argument("--max-iter", type=int, help="Picard iteration cap")
        p.add_argument("--convention", choices=("eigen", "paper"),
                       help="fractional power convention")
        p.add_argument("--seed", type=int, help="seed for random initial guesses")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {"out": args.out, "modes": args.modes, "time_grid": args.time_grid,
                 "space_grid": args.space_grid, "tol": args.tol, "max_iter": args.max_iter,
                 "convention": args.convention, "seed": args.seed}
    try:
        conf, origins = cfg.load(args.config, args.command, overrides)
    except cfg.ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "manufacture" and conf.problem != "manufactured_linear":
        conf.problem = "manufactured"
    try:
        spec = problem_from_config(conf)
    except ValueError as err:
        print(f"error: {err}{_blame(str(err), origins)}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](conf, spec, Path(conf.out))
    except (EvaluationError, RuntimeError, FloatingPointError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL
    except (FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
