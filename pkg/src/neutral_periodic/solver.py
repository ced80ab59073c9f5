"""Fixed-point map Q and Picard iteration for periodic mild solutions.

    Qu(t) = P[F(., u, u(. - tau))](t) + G(t, u(t - xi)) - P[AG(., u(. - xi))](t)

where P is the periodic solution operator of u' + Au = h.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .periodic import PeriodicTrajectory, periodic_solve, trajectory_norm
from .problem import ProblemSpec, eval_AG, eval_F, eval_G

log = logging.getLogger(__name__)

OVERFLOW_GUARD = 1e8


def _check_grid(spec: ProblemSpec, u: PeriodicTrajectory) -> None:
    if (u.m_t, u.n_modes) != (spec.m_t, spec.n_modes) or not np.isclose(u.omega, spec.omega):
        raise ValueError(
            f"trajectory grid (omega={u.omega}, M_t={u.m_t}, N={u.n_modes}) does not match "
            f"problem (omega={spec.omega}, M_t={spec.m_t}, N={spec.n_modes})")


def forcing_trajectories(spec: ProblemSpec, u: PeriodicTrajectory):
    """(F, G, AG) sampled on the time grid for the state trajectory u."""
    _check_grid(spec, u)
    t = u.times
    u_tau = u.delayed(spec.tau, spec.interpolation, spec.strict_delays)
    u_xi = u.delayed(spec.xi, spec.interpolation, spec.strict_delays)
    F = eval_F(spec, u.values, u_tau.values, t)
    G = eval_G(spec, u_xi.values, t)
    AG = eval_AG(spec, u_xi.values, t)
    wrap = lambda a: PeriodicTrajectory(spec.omega, a)  # noqa: E731
    return wrap(F), wrap(G), wrap(AG)


def apply_Q1(spec: ProblemSpec, u: PeriodicTrajectory) -> PeriodicTrajectory:
    F, _, _ = forcing_trajectories(spec, u)
    return periodic_solve(F, spec.source_order)


def apply_Q2(spec: ProblemSpec, u: PeriodicTrajectory) -> PeriodicTrajectory:
    _, G, AG = forcing_trajectories(spec, u)
    return G - periodic_solve(AG, spec.source_order)


def apply_Q(spec: ProblemSpec, u: PeriodicTrajectory) -> PeriodicTrajectory:
    F, G, AG = forcing_trajectories(spec, u)
    # P is linear, so one solve covers both integral terms
    return periodic_solve(F - AG, spec.source_order) + G


def fixed_point_residual(spec: ProblemSpec, u: PeriodicTrajectory) -> float:
    """||Qu - u|| in the C_alpha norm."""
    return trajectory_norm(apply_Q(spec, u) - u, spec.alpha, spec.convention)


@dataclass
class SolveResult:
    solution: PeriodicTrajectory
    residual: float
    iterations: int
    differences: list = field(default_factory=list)
    contraction_ratios: list = field(default_factory=list)
    converged: bool = False
    status: str = "running"
    guaranteed: Optional[bool] = None

    @property
    def max_ratio(self) -> float:
        return max(self.contraction_ratios, default=float("nan"))


def picard_solve(spec: ProblemSpec, initial: Optional[PeriodicTrajectory] = None,
                 tol: float = 1e-10, max_iter: int = 100, damping: float = 1.0,
                 guaranteed: Optional[bool] = None) -> SolveResult:
    """Iterate u <- (1 - damping) u + damping Qu from ``initial`` (zero by default).

    Stops once successive iterates differ by at most ``tol`` in C_alpha, then
    reports ||Qu - u|| for the returned iterate.  ``status`` is one of
    ``converged``, ``max_iter`` or ``diverged``.  ``guaranteed`` is passed
    through from the hypothesis check; iteration runs either way.
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    if guaranteed is False:
        log.warning("contraction hypotheses do not hold for %s; "
                    "no convergence guarantee for Picard iteration", spec.name)
    u = spec.zero_trajectory() if initial is None else initial
    _check_grid(spec, u)

    def norm(w):
        return trajectory_norm(w, spec.alpha, spec.convention)

    diffs, ratios = [], []
    status = "max_iter"
    for _ in range(max_iter):
        q = apply_Q(spec, u)
        new = q if damping == 1.0 else (1.0 - damping) * u + damping * q
        diff = norm(new - u)
        if diffs and diffs[-1] > 0:
            ratios.append(diff / diffs[-1])
        diffs.append(diff)
        u = new
        log.debug("picard iter %d: diff %.3e", len(diffs), diff)
        if not np.isfinite(diff) or norm(u) > OVERFLOW_GUARD:
            status = "diverged"
            break
        if diff <= tol:
            status = "converged"
            break
    residual = fixed_point_residual(spec, u) if status != "diverged" else float("inf")
    return SolveResult(solution=u, residual=residual, iterations=len(diffs),
                       differences=diffs, contraction_ratios=ratios,
                       converged=status == "converged", status=status,
                       guaranteed=guaranteed)
