"""Periodic trajectories and the periodic solution operator of u' + Au = h.

Time integrals int T(t-s) h(s) ds are done mode by mode with exact
exponential weights against a local polynomial interpolant of h in time, so
the only quadrature error is the interpolation error of h itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import lfilter

from .spectral import Convention, eigenvalues, norm_alpha

# interpolation stencils, as node offsets relative to the left end of a step
STENCILS = {1: (0, 1), 3: (-1, 0, 1, 2), 5: (-2, -1, 0, 1, 2, 3)}
INTERPOLATION_ORDERS = {"linear": 1, "cubic": 3, "quintic": 5}
DEFAULT_ORDER = 5

# below this lambda*dt the phi recurrence loses digits; sum the series instead
_TAYLOR_CUTOFF = 2.0
_TAYLOR_TERMS = 40


def _stencil(order: int) -> tuple[int, ...]:
    try:
        return STENCILS[order]
    except KeyError:
        raise ValueError(f"unsupported interpolation order {order}; use 1, 3 or 5") from None


def lagrange_weights(theta, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Lagrange basis values at ``theta`` for the stencil of ``order``.

    Returns shape (len(stencil),) + theta.shape.
    """
    nodes = np.array(_stencil(order), dtype=float)
    theta = np.asarray(theta, dtype=float)
    out = []
    for m, node in enumerate(nodes):
        others = np.delete(nodes, m)
        out.append(np.prod([(theta - o) / (node - o) for o in others], axis=0))
    return np.array(out)


def phi_functions(z, kmax: int) -> np.ndarray:
    """phi_k(-z) for k = 1..kmax, where phi_k(x) = sum_j x^j / (j+k)!.

    ``z`` >= 0 may be an array; the result has shape (kmax,) + z.shape.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty((kmax,) + z.shape)
    small = z < _TAYLOR_CUTOFF
    if np.any(small):
        x = -z[small]
        for k in range(1, kmax + 1):
            term = np.full_like(x, 1.0 / factorial(k))
            acc = term.copy()
            for j in range(1, _TAYLOR_TERMS):
                term = term * x / (j + k)
                acc += term
            out[k - 1][small] = acc
    big = ~small
    if np.any(big):
        x = -z[big]
        phi = np.exp(x)
        for k in range(1, kmax + 1):
            phi = (phi - 1.0 / factorial(k - 1)) / x
            out[k - 1][big] = phi
    return out


def product_weights(lam, dt: float, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Weights W_m with int_0^dt e^{-lam (dt-s)} p(s) ds = sum_m W_m h(t_j + m dt).

    p is the Lagrange interpolant of h through the stencil nodes.  Shape
    (len(stencil),) + lam.shape.
    """
    nodes = np.array(_stencil(order), dtype=float)
    z = np.asarray(lam, dtype=float) * dt
    deg = len(nodes) - 1
    # moments int_0^1 e^{-z(1-theta)} theta^k dtheta = k! phi_{k+1}(-z)
    phis = phi_functions(z, deg + 1)
    moments = np.array([factorial(k) * phis[k] for k in range(deg + 1)])
    weights = []
    for m, node in enumerate(nodes):
        others = np.delete(nodes, m)
        poly = npoly.polyfromroots(others) / np.prod(node - others)
        weights.append(dt * np.tensordot(poly, moments, axes=1))
    return np.array(weights)


@dataclass
class PeriodicTrajectory:
    """One period of spectral fields on the uniform grid t_j = j * omega / M_t.

    ``values`` has shape (M_t, N_modes); grid indices wrap modulo M_t.
    """

    omega: float
    values: np.ndarray

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"period must be positive, got {self.omega}")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] < 1:
            raise ValueError(f"values must be (M_t, N_modes), got {self.values.shape}")

    @classmethod
    def zeros(cls, omega: float, m_t: int, n_modes: int) -> PeriodicTrajectory:
        return cls(omega, np.zeros((m_t, n_modes)))

    @classmethod
    def constant(cls, omega: float, m_t: int, field) -> PeriodicTrajectory:
        field = np.asarray(field, dtype=float)
        return cls(omega, np.tile(field, (m_t, 1)))

    @classmethod
    def from_function(cls, omega: float, m_t: int, fn) -> PeriodicTrajectory:
        """Sample ``fn(t) -> coefficients`` on the grid (fn must broadcast over t)."""
        t = np.arange(m_t) * (omega / m_t)
        return cls(omega, np.asarray(fn(t[:, None]), dtype=float) * np.ones((m_t, 1)))

    @property
    def m_t(self) -> int:
        return self.values.shape[0]

    @property
    def n_modes(self) -> int:
        return self.values.shape[1]

    @property
    def dt(self) -> float:
        return self.omega / self.m_t

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.m_t) * self.dt

    def field(self, j: int) -> np.ndarray:
        return self.values[j % self.m_t]

    def shift(self, k: int) -> PeriodicTrajectory:
        """Trajectory s with s(t_j) = self(t_{j-k})."""
        return PeriodicTrajectory(self.omega, np.roll(self.values, k, axis=0))

    def _check_same_grid(self, other: PeriodicTrajectory) -> None:
        if self.values.shape != other.values.shape or not np.isclose(self.omega, other.omega):
            raise ValueError(
                f"grid mismatch: omega {self.omega} vs {other.omega}, "
                f"shape {self.values.shape} vs {other.values.shape}")

    def __add__(self, other):
        if isinstance(other, PeriodicTrajectory):
            self._check_same_grid(other)
            other = other.values
        return PeriodicTrajectory(self.omega, self.values + other)

    def __sub__(self, other):
        if isinstance(other, PeriodicTrajectory):
            self._check_same_grid(other)
            other = other.values
        return PeriodicTrajectory(self.omega, self.values - other)

    def __mul__(self, scalar):
        return PeriodicTrajectory(self.omega, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return PeriodicTrajectory(self.omega, -self.values)

    def at(self, t, interpolation: str = "quintic") -> np.ndarray:
        """Fields at arbitrary times, wrapping periodically.

        Returns shape np.shape(t) + (N_modes,).
        """
        order = INTERPOLATION_ORDERS[interpolation]
        s = np.mod(np.asarray(t, dtype=float), self.omega) / self.dt
        j = np.floor(s).astype(int)
        theta = s - j
        w = lagrange_weights(theta, order)
        out = np.zeros(np.shape(s) + (self.n_modes,))
        for m, offset in enumerate(_stencil(order)):
            out += w[m][..., None] * self.values[(j + offset) % self.m_t]
        return out

    def delayed(self, delay: float, interpolation: str = "quintic",
                strict: bool = False) -> PeriodicTrajectory:
        """Trajectory d with d(t_j) = self(t_j - delay).

        Grid-multiple delays are an exact roll.  Otherwise the same stencil
        weights apply at every j, so the shift is a periodic convolution.
        ``strict`` rejects delays that are not grid multiples.
        """
        s = delay / self.dt
        k = int(round(s))
        if abs(s - k) <= 1e-9 * max(1.0, abs(s)):
            return self.shift(k)
        if strict:
            raise ValueError(
                f"delay {delay} is not a multiple of the time step {self.dt} (strict mode)")
        order = INTERPOLATION_ORDERS[interpolation]
        base = int(np.floor(s))
        theta = 1.0 - (s - base)
        # t_j - delay = (j - base - 1 + theta) dt
        w = lagrange_weights(theta, order)
        out = np.zeros_like(self.values)
        for m, offset in enumerate(_stencil(order)):
            out += w[m] * np.roll(self.values, base + 1 - offset, axis=0)
        return PeriodicTrajectory(self.omega, out)


def trajectory_norm(u: PeriodicTrajectory, alpha: float,
                    convention=Convention.EIGEN) -> float:
    """max_j ||u(t_j)||_alpha over the grid."""
    return float(np.max(norm_alpha(u.values, alpha, convention)))


def _step_sources(h: PeriodicTrajectory, order: int) -> tuple[np.ndarray, np.ndarray]:
    lam = eigenvalues(h.n_modes)
    rho = np.exp(-lam * h.dt)
    weights = product_weights(lam, h.dt, order)
    b = np.zeros_like(h.values)
    for m, offset in enumerate(_stencil(order)):
        # b_j picks h_{j + offset}
        b += weights[m] * np.roll(h.values, -offset, axis=0)
    return rho, b


def periodic_solve(h: PeriodicTrajectory, order: int = DEFAULT_ORDER) -> PeriodicTrajectory:
    """The omega-periodic mild solution of u' + Au = h.

    Per mode: u_{j+1} = rho u_j + b_j with rho = exp(-lambda dt) and b_j the
    exact integral of the propagated interpolant of h over [t_j, t_{j+1}].
    The initial value is fixed by periodicity,
    u_0 = sum_k rho^{M-1-k} b_k / (1 - rho^M).
    """
    lam = eigenvalues(h.n_modes)
    rho, b = _step_sources(h, order)
    m_t = h.m_t
    zero_start = np.empty_like(b)
    for n in range(h.n_modes):
        zero_start[:, n] = lfilter([1.0], [1.0, -rho[n]], b[:, n])
    u0 = zero_start[-1] / -np.expm1(-lam * h.omega)
    # u_{j} = rho^j u_0 + (zero-start recurrence)_{j-1}
    powers = np.exp(-np.outer(np.arange(1, m_t), lam) * h.dt)
    out = np.empty_like(b)
    out[0] = u0
    out[1:] = powers * u0 + zero_start[:-1]
    return PeriodicTrajectory(h.omega, out)


def mild_identity_residual(u: PeriodicTrajectory, h: PeriodicTrajectory,
                           order: int = DEFAULT_ORDER) -> float:
    """max_j ||u(t_{j+1}) - T(dt) u(t_j) - int_{t_j}^{t_{j+1}} T(t_{j+1}-s) h(s) ds||_{L^2}.

    The step integral uses the same interpolant of h as :func:`periodic_solve`;
    the step from t_{M-1} wraps to t_0.
    """
    u._check_same_grid(h)
    rho, b = _step_sources(h, order)
    step = np.roll(u.values, -1, axis=0) - rho * u.values - b
    return float(np.max(np.sqrt(np.sum(step * step, axis=-1))))
