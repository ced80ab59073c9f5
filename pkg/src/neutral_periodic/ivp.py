"""Method-of-steps initial value integration of the neutral problem.

Integrates v = u - G(t, u(t - xi)), which satisfies

    v' + A v = F(t, u(t), u(t - tau)) - A G(t, u(t - xi)),

with a second-order exponential Runge-Kutta step (exact linear part per
mode, predictor-corrector on the source), then recovers u = v + G.  With
dt <= the smallest positive delay every delayed argument is already known.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .periodic import PeriodicTrajectory, lagrange_weights, phi_functions
from .problem import ProblemSpec, eval_AG, eval_F, eval_G
from .spectral import Convention, eigenvalues, norm_alpha

log = logging.getLogger(__name__)

_GRID_TOL = 1e-9
_ZERO_DELAY_SWEEPS = 8
_HISTORY_STENCIL = 3  # cubic interpolation inside the history buffer


@dataclass
class HistorySegment:
    """Initial data on [-duration, 0] sampled every ``spacing``; ``values[-1]`` is u(0)."""

    spacing: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError(f"history values must be (nodes, N_modes), got {self.values.shape}")
        if not self.spacing > 0:
            raise ValueError(f"history spacing must be positive, got {self.spacing}")

    @property
    def duration(self) -> float:
        return (self.values.shape[0] - 1) * self.spacing

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.values.shape[0]) - (self.values.shape[0] - 1)) * self.spacing

    @classmethod
    def from_function(cls, fn, duration: float, spacing: float) -> HistorySegment:
        """Sample ``fn(t) -> coefficients`` (broadcasting over t of shape (K, 1))."""
        k = int(np.ceil(duration / spacing - _GRID_TOL))
        t = (np.arange(k + 1) - k) * spacing
        return cls(spacing, np.asarray(fn(t[:, None]), dtype=float) * np.ones((k + 1, 1)))

    @classmethod
    def constant(cls, field, duration: float, spacing: float) -> HistorySegment:
        field = np.asarray(field, dtype=float)
        return cls.from_function(lambda t: field + 0.0 * t, duration, spacing)


def history_from_periodic(u_per: PeriodicTrajectory, duration: float, spacing: float,
                          interpolation: str = "quintic") -> HistorySegment:
    return HistorySegment.from_function(lambda t: u_per.at(t[:, 0], interpolation),
                                        duration, spacing)


@dataclass
class Trajectory:
    """States on the uniform grid 0, dt, ..., horizon."""

    times: np.ndarray
    values: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def _steps(length: float, dt: float, what: str) -> int:
    n = int(round(length / dt))
    if abs(n * dt - length) > _GRID_TOL * max(1.0, length):
        raise ValueError(f"{what} {length} is not a multiple of dt={dt}")
    return n


class _Buffer:
    """History plus computed states on one uniform grid, indexed by time."""

    def __init__(self, history: np.ndarray, n_steps: int, dt: float):
        self.offset = history.shape[0] - 1
        self.dt = dt
        self.data = np.zeros((self.offset + n_steps + 1, history.shape[1]))
        self.data[:self.offset + 1] = history
        self.known = self.offset  # last index holding a committed state

    def at(self, t: float) -> np.ndarray:
        p = self.offset + t / self.dt
        k = int(round(p))
        if abs(p - k) <= _GRID_TOL * max(1.0, abs(p)):
            if k < 0 or k > self.known:
                raise ValueError(f"time {t} lies outside the integrated range")
            return self.data[k]
        base = int(np.floor(p))
        nodes = np.arange(-1, _HISTORY_STENCIL) + base
        # keep the stencil inside known data
        nodes -= max(0, nodes[-1] - self.known)
        nodes += max(0, -nodes[0])
        if nodes[-1] > self.known:
            raise ValueError(f"history too short to interpolate at t={t}")
        theta = p - (nodes[0] + 1)
        w = lagrange_weights(theta, _HISTORY_STENCIL)
        return np.tensordot(w, self.data[nodes], axes=1)


def _resample(history: HistorySegment, dt: float, needed: float) -> np.ndarray:
    if abs(history.spacing - dt) <= _GRID_TOL * dt:
        if history.duration < needed - _GRID_TOL:
            raise ValueError(f"history covers {history.duration}, delays need {needed}")
        return history.values
    k = int(np.ceil(needed / dt - _GRID_TOL))
    if history.duration < k * dt - _GRID_TOL:
        raise ValueError(f"history covers {history.duration}, delays need {k * dt}")
    src = _Buffer(history.values, 0, history.spacing)
    src.known = src.offset
    return np.array([src.at(-(k - i) * dt) for i in range(k + 1)])


def simulate(spec: ProblemSpec, history: HistorySegment, horizon: float,
             dt: float) -> Trajectory:
    """Integrate from the history segment to t = horizon with fixed step dt.

    dt must not exceed the smallest positive delay; min(delay)/4 is the
    recommended cap.  Zero delays are resolved by fixed-point sweeps.
    """
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    positive = [d for d in (spec.tau, spec.xi) if d > 0]
    if positive and dt > min(positive) * (1.0 + _GRID_TOL):
        raise ValueError(f"dt={dt} exceeds the smallest positive delay {min(positive)}")
    if history.values.shape[1] != spec.n_modes:
        raise ValueError(
            f"history has {history.values.shape[1]} modes, problem has {spec.n_modes}")
    n_steps = _steps(horizon, dt, "horizon")
    buf = _Buffer(_resample(history, dt, max(spec.tau, spec.xi)), n_steps, dt)

    lam = eigenvalues(spec.n_modes)
    rho = np.exp(-lam * dt)
    phi1, phi2 = dt * phi_functions(lam * dt, 2)

    def recover(t, v):
        """u = v + G(t, u(t - xi)); G and AG are returned for reuse."""
        if spec.xi > 0:
            w = buf.at(t - spec.xi)
            return v + eval_G(spec, w, t), eval_AG(spec, w, t)
        u = v
        for _ in range(_ZERO_DELAY_SWEEPS):
            new = v + eval_G(spec, u, t)
            done = np.max(np.abs(new - u)) <= 1e-15 * max(1.0, np.max(np.abs(new)))
            u = new
            if done:
                break
        return u, eval_AG(spec, u, t)

    def source(t, u, ag):
        u_tau = u if spec.tau == 0 else buf.at(t - spec.tau)
        return eval_F(spec, u, u_tau, t) - ag

    u0 = buf.data[buf.offset]
    w0 = buf.at(-spec.xi)
    v = u0 - eval_G(spec, w0, 0.0)
    ag = eval_AG(spec, w0, 0.0)
    u = u0
    for k in range(n_steps):
        t, t_next = k * dt, (k + 1) * dt
        n_now = source(t, u, ag)
        a = rho * v + phi1 * n_now
        u_pred, ag_next = recover(t_next, a)
        v = a + phi2 * (source(t_next, u_pred, ag_next) - n_now)
        u, ag = recover(t_next, v)
        if not np.all(np.isfinite(u)):
            raise FloatingPointError(f"non-finite state at t={t_next}")
        buf.data[buf.offset + k + 1] = u
        buf.known = buf.offset + k + 1
    times = np.arange(n_steps + 1) * dt
    return Trajectory(times, buf.data[buf.offset:].copy())


def distance_to_periodic(traj: Trajectory, u_per: PeriodicTrajectory, alpha: float = 0.5,
                         convention=Convention.EIGEN,
                         interpolation: str = "quintic") -> np.ndarray:
    """Per whole period p, max over samples t in [p omega, (p+1) omega] of ||u(t) - u_per(t)||_alpha."""
    omega = u_per.omega
    n_periods = int(np.floor(traj.times[-1] / omega + _GRID_TOL))
    if n_periods < 1:
        raise ValueError("trajectory is shorter than one period")
    gap = norm_alpha(traj.values - u_per.at(traj.times, interpolation), alpha, convention)
    index = np.floor(traj.times / omega + _GRID_TOL).astype(int)
    out = np.empty(n_periods)
    for p in range(n_periods):
        # closed window: the shared endpoint belongs to both periods
        window = (index == p) | (np.abs(traj.times - (p + 1) * omega) <= _GRID_TOL * omega)
        out[p] = np.max(gap[window])
    return out
