"""The neutral delay problem on (0, 1):

    d/dt [u - g(x,t)(u + u_x)(x, t - xi)] - u_xx = f(x, t, u, u_x, u(t - tau), u_x(t - tau)),
    u(0, t) = u(1, t) = 0,

and its abstract pieces F, G and AG acting on spectral fields.

Nonlinearity handles are plain numpy callables.  They receive the interior
grid ``x`` with shape (M_x-1,) and a time array shaped to broadcast against
it, e.g. (M_t, 1), and must return something broadcastable to the state
shape.  ``f(x, t, v, eta, w, zeta)`` takes u, u_x, delayed u and delayed u_x
in that order; ``g(x, t)`` must vanish at x = 0 and x = 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .periodic import DEFAULT_ORDER, INTERPOLATION_ORDERS, PeriodicTrajectory
from .spectral import (Convention, SQRT2, eigenvalues, forward_transform, grid,
                       inverse_transform, norm_alpha, spatial_derivative)

Handle = Callable[..., np.ndarray]


class EvaluationError(ValueError):
    """A nonlinearity handle produced a non-finite value."""


@dataclass
class ProblemSpec:
    """Period, delays, discretization and declared constants of one problem.

    Constants left as ``None`` are undeclared; hypotheses depending on them
    evaluate to UNKNOWN.  ``lipschitz`` says whether a0, a1 bound differences
    of F (so the contraction argument applies) or only its growth.
    Delays are stored reduced modulo the period.  That is exact for
    periodic trajectories; the initial-value integrator shares the spec, so
    it matches the unreduced equation only when both delays are below omega.
    """

    omega: float = 1.0
    tau: float = 0.0
    xi: float = 0.0
    alpha: float = 0.5
    n_modes: int = 64
    m_t: int = 256
    m_x: int = 257
    a0: Optional[float] = None
    a1: Optional[float] = None
    K: Optional[float] = None
    L: Optional[float] = None
    L1: Optional[float] = None
    mu1: float = 1.0
    L2: Optional[float] = None
    mu2: float = 1.0
    gamma: Optional[float] = None
    lipschitz: bool = True
    f: Optional[Handle] = field(default=None, repr=False)
    g: Optional[Handle] = field(default=None, repr=False)
    g_x: Optional[Handle] = field(default=None, repr=False)
    g_xx: Optional[Handle] = field(default=None, repr=False)
    convention: Convention = Convention.EIGEN
    interpolation: str = "quintic"
    strict_delays: bool = False
    source_order: int = DEFAULT_ORDER
    ag_mode: str = "spectral"
    name: str = "custom"

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.tau < 0 or self.xi < 0:
            raise ValueError(f"delays must be non-negative, got tau={self.tau}, xi={self.xi}")
        self.tau = float(self.tau) % self.omega
        self.xi = float(self.xi) % self.omega
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.n_modes < 1 or self.m_t < 1:
            raise ValueError("n_modes and m_t must be positive")
        if self.m_x - 1 < self.n_modes:
            raise ValueError(
                f"space grid M_x={self.m_x} has fewer interior nodes than n_modes={self.n_modes}")
        for name in ("a0", "a1", "K", "L", "L1", "L2", "gamma"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")
        for name in ("mu1", "mu2"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {getattr(self, name)}")
        self.convention = Convention(self.convention)
        if self.interpolation not in INTERPOLATION_ORDERS:
            raise ValueError(f"unknown interpolation {self.interpolation!r}")
        if self.ag_mode not in ("spectral", "direct"):
            raise ValueError(f"unknown ag_mode {self.ag_mode!r}")

    @property
    def x(self) -> np.ndarray:
        return grid(self.m_x)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.m_t) * (self.omega / self.m_t)

    def zero_trajectory(self) -> PeriodicTrajectory:
        return PeriodicTrajectory.zeros(self.omega, self.m_t, self.n_modes)

    def with_(self, **changes) -> ProblemSpec:
        return replace(self, **changes)


def _check_finite(values: np.ndarray, what: str) -> np.ndarray:
    bad = ~np.isfinite(values)
    if np.any(bad):
        where = np.argwhere(bad)[0]
        loc = f" at time index {where[0]}" if values.ndim > 1 else ""
        raise EvaluationError(f"{what} returned a non-finite value{loc}")
    return values


def _time_column(t, batch_shape) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.broadcast_to(t, batch_shape)[..., None]


def delayed_state(u: PeriodicTrajectory, t, delay: float,
                  interpolation: str = "quintic") -> np.ndarray:
    """u(t - delay), wrapped into one period."""
    return u.at(np.asarray(t, dtype=float) - delay, interpolation)


def eval_F(spec: ProblemSpec, u_now, u_tau, t) -> np.ndarray:
    """Sine coefficients of x -> f(x, t, u, u_x, u_tau, (u_tau)_x).

    Fields may carry leading batch axes; ``t`` broadcasts against them.
    """
    u_now = np.asarray(u_now, dtype=float)
    if spec.f is None:
        return np.zeros_like(u_now)
    v = inverse_transform(u_now, spec.m_x)
    eta = spatial_derivative(u_now, spec.m_x)
    w = inverse_transform(u_tau, spec.m_x)
    zeta = spatial_derivative(u_tau, spec.m_x)
    t_col = _time_column(t, v.shape[:-1])
    vals = np.broadcast_to(spec.f(spec.x, t_col, v, eta, w, zeta), v.shape)
    return forward_transform(_check_finite(np.asarray(vals, dtype=float), "f"), spec.n_modes)


def _g_product(spec: ProblemSpec, u_xi, t):
    u_xi = np.asarray(u_xi, dtype=float)
    w = inverse_transform(u_xi, spec.m_x)
    w_x = spatial_derivative(u_xi, spec.m_x)
    t_col = _time_column(t, w.shape[:-1])
    return u_xi, w, w_x, t_col


def eval_G(spec: ProblemSpec, u_xi, t) -> np.ndarray:
    """Sine coefficients of g(x, t) (w + w_x) with w = u(t - xi)."""
    u_xi = np.asarray(u_xi, dtype=float)
    if spec.g is None:
        return np.zeros_like(u_xi)
    u_xi, w, w_x, t_col = _g_product(spec, u_xi, t)
    vals = np.broadcast_to(spec.g(spec.x, t_col), w.shape) * (w + w_x)
    return forward_transform(_check_finite(vals, "g"), spec.n_modes)


def eval_AG(spec: ProblemSpec, u_xi, t, mode: Optional[str] = None) -> np.ndarray:
    """A G(t, u(t - xi)).

    ``spectral`` multiplies the coefficients of G by n^2 pi^2.  ``direct``
    evaluates -d^2/dx^2 [g (w + w_x)] on the grid with the product rule,
    which needs the g_x and g_xx handles, then transforms once.
    """
    mode = mode or spec.ag_mode
    u_xi = np.asarray(u_xi, dtype=float)
    if spec.g is None:
        return np.zeros_like(u_xi)
    if mode == "spectral":
        return eigenvalues(spec.n_modes) * eval_G(spec, u_xi, t)
    if mode != "direct":
        raise ValueError(f"unknown AG mode {mode!r}")
    if spec.g_x is None or spec.g_xx is None:
        raise ValueError("direct AG evaluation needs the g_x and g_xx handles")
    u_xi, w, w_x, t_col = _g_product(spec, u_xi, t)
    neg_lam_u = -eigenvalues(spec.n_modes) * u_xi
    w_xx = inverse_transform(neg_lam_u, spec.m_x)
    w_xxx = spatial_derivative(neg_lam_u, spec.m_x)
    x = spec.x
    g0 = np.broadcast_to(spec.g(x, t_col), w.shape)
    g1 = np.broadcast_to(spec.g_x(x, t_col), w.shape)
    g2 = np.broadcast_to(spec.g_xx(x, t_col), w.shape)
    vals = -(g2 * (w + w_x) + 2.0 * g1 * (w_x + w_xx) + g0 * (w_xx + w_xxx))
    return forward_transform(_check_finite(vals, "g"), spec.n_modes)


def random_fields(rng: np.random.Generator, shape, n_modes: int,
                  decay: float = 3.0) -> np.ndarray:
    """Random coefficient arrays with |c_n| ~ n^{-decay}."""
    n = np.arange(1, n_modes + 1, dtype=float)
    return rng.standard_normal(tuple(shape) + (n_modes,)) * n**-decay


def empirical_lipschitz_AG(spec: ProblemSpec, n_probes: int = 64, seed: int = 0,
                           t: float = 0.0, decay: float = 3.0) -> float:
    """Largest observed ||AG(w1) - AG(w2)|| / ||w1 - w2||_{1/2} over random probes.

    A diagnostic only: it says nothing about fields rougher than the probes.
    """
    rng = np.random.default_rng(seed)
    w1 = random_fields(rng, (n_probes,), spec.n_modes, decay)
    w2 = random_fields(rng, (n_probes,), spec.n_modes, decay)
    num = norm_alpha(eval_AG(spec, w1, t) - eval_AG(spec, w2, t), 0.0)
    den = norm_alpha(w1 - w2, 0.5, Convention.EIGEN)
    return float(np.max(num / den))


# ----------------------------------------------------------------------------
# named problems


@dataclass(frozen=True)
class ManufacturedSolution:
    """u*(t) = sum over terms of (mean + s sin(k nu t) + c cos(k nu t)) e_mode, nu = 2 pi / omega.

    ``terms`` holds (mode, mean, sin_amp, cos_amp, harmonic) tuples.
    """

    omega: float
    terms: tuple

    def _parts(self, t):
        nu = 2.0 * np.pi / self.omega
        for mode, mean, s_amp, c_amp, k in self.terms:
            arg = k * nu * np.asarray(t, dtype=float)
            value = mean + s_amp * np.sin(arg) + c_amp * np.cos(arg)
            rate = k * nu * (s_amp * np.cos(arg) - c_amp * np.sin(arg))
            yield int(mode), value, rate

    def max_mode(self) -> int:
        return max((int(term[0]) for term in self.terms), default=0)

    def coefficients(self, t, n_modes: int) -> np.ndarray:
        """Sine coefficients of u*(t); shape np.shape(t) + (n_modes,)."""
        if self.max_mode() > n_modes:
            raise ValueError(
                f"recipe references mode {self.max_mode()} above n_modes={n_modes}")
        out = np.zeros(np.shape(t) + (n_modes,))
        for mode, value, _ in self._parts(t):
            out[..., mode - 1] += value
        return out

    def trajectory(self, m_t: int, n_modes: int) -> PeriodicTrajectory:
        t = np.arange(m_t) * (self.omega / m_t)
        return PeriodicTrajectory(self.omega, self.coefficients(t, n_modes))

    def pointwise(self, x, t, derivative: int = 0, time_derivative: bool = False):
        """u* (or its x-derivative, or d/dt of either) at grid x and broadcast t."""
        out = 0.0
        for mode, value, rate in self._parts(t):
            k = mode * np.pi
            basis = SQRT2 * k**derivative * np.sin(k * x + derivative * np.pi / 2)
            out = out + (rate if time_derivative else value) * basis
        return out


def parse_recipe(text: str, omega: float) -> ManufacturedSolution:
    """``"1:0.5:0.25:0[:1]; 3:0:0.1:0"`` -> terms mode:mean:sin:cos[:harmonic]."""
    terms = []
    for chunk in text.replace(",", ";").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) not in (4, 5):
            raise ValueError(f"recipe term {chunk!r} needs mode:mean:sin:cos[:harmonic]")
        mode = int(parts[0])
        if mode < 1:
            raise ValueError(f"recipe mode must be >= 1, got {mode}")
        harmonic = int(parts[4]) if len(parts) == 5 else 1
        terms.append((mode, float(parts[1]), float(parts[2]), float(parts[3]), harmonic))
    return ManufacturedSolution(omega, tuple(terms))


def manufactured_problem(solution: ManufacturedSolution, g_scale: float = 0.0,
                         **params) -> ProblemSpec:
    """Problem with state-independent forcing whose exact periodic solution is u*.

    With g = g_scale x (1 - x):  F = (u* - G(u*(t - xi)))' + A u*, where the
    time derivative is taken analytically from the recipe.
    """
    params.setdefault("omega", solution.omega)
    if not np.isclose(params["omega"], solution.omega):
        raise ValueError("recipe period and problem period differ")
    n_modes = params.get("n_modes", ProblemSpec.n_modes)
    if solution.max_mode() > n_modes:
        raise ValueError(
            f"recipe references mode {solution.max_mode()} above n_modes={n_modes}")
    xi = params.get("xi", 0.0)

    def g(x, t):
        return g_scale * x * (1.0 - x) + 0.0 * t

    def g_x(x, t):
        return g_scale * (1.0 - 2.0 * x) + 0.0 * t

    def g_xx(x, t):
        return -2.0 * g_scale + 0.0 * x + 0.0 * t

    def f(x, t, v, eta, w, zeta):
        # u*_t + A u*  (A u* = -u*_xx)
        out = (solution.pointwise(x, t, time_derivative=True)
               - solution.pointwise(x, t, derivative=2))
        if g_scale:
            delayed_rate = (solution.pointwise(x, t - xi, time_derivative=True)
                            + solution.pointwise(x, t - xi, derivative=1, time_derivative=True))
            out = out - g(x, t) * delayed_rate
        return out

    params.setdefault("a0", 0.0)
    params.setdefault("a1", 0.0)
    params.setdefault("L", 2.0 * abs(g_scale))
    params.setdefault("name", "manufactured" if g_scale else "manufactured_linear")
    has_g = g_scale != 0.0
    return ProblemSpec(f=f, g=g if has_g else None, g_x=g_x if has_g else None,
                       g_xx=g_xx if has_g else None, **params)


DEFAULT_RECIPE = "1:0.5:0.25:0"


def example51(a0: float = 0.01, a1: float = 0.01, L: float = 0.01, K: float = 1.0,
              **params) -> ProblemSpec:
    """The parabolic neutral problem with concrete f and g meeting the growth bounds.

    f = sin(pi x) [K cos(nu t) + a0 sin(v + eta) + a1 sin(w + zeta)],
    g = (L/2) x (1 - x) (2 + sin(nu t)) / 3,  so |g_xx| <= L.
    """
    omega = params.setdefault("omega", 1.0)
    nu = 2.0 * np.pi / omega

    def f(x, t, v, eta, w, zeta):
        return np.sin(np.pi * x) * (K * np.cos(nu * t) + a0 * np.sin(v + eta)
                                    + a1 * np.sin(w + zeta))

    def g(x, t):
        return 0.5 * L * x * (1.0 - x) * (2.0 + np.sin(nu * t)) / 3.0

    def g_x(x, t):
        return 0.5 * L * (1.0 - 2.0 * x) * (2.0 + np.sin(nu * t)) / 3.0

    def g_xx(x, t):
        return -L * (2.0 + np.sin(nu * t)) / 3.0 + 0.0 * x

    params.setdefault("tau", 0.3)
    params.setdefault("xi", 0.2)
    return ProblemSpec(a0=a0, a1=a1, L=L, K=K, f=f, g=g, g_x=g_x, g_xx=g_xx,
                       name="example51", **params)


def heat_decay(**params) -> ProblemSpec:
    for name in ("a0", "a1", "K", "L", "L1", "L2"):
        params.setdefault(name, 0.0)
    return ProblemSpec(name="heat_decay", **params)


def constant_forcing(**params) -> ProblemSpec:
    """F(t, u, w) = e_1 for every state; the periodic solution is e_1 / pi^2."""
    def f(x, t, v, eta, w, zeta):
        return SQRT2 * np.sin(np.pi * x) + 0.0 * t

    for name in ("a0", "a1", "L", "L1", "L2"):
        params.setdefault(name, 0.0)
    params.setdefault("K", 1.0)
    return ProblemSpec(f=f, name="constant_forcing", **params)


def _manufactured(recipe: str = DEFAULT_RECIPE, g_scale: float = 0.01, **params):
    solution = parse_recipe(recipe, params.get("omega", 1.0))
    return manufactured_problem(solution, g_scale=g_scale, **params)


def _manufactured_linear(recipe: str = DEFAULT_RECIPE, **params):
    return _manufactured(recipe, g_scale=0.0, **params)


REGISTRY: dict[str, Callable[..., ProblemSpec]] = {
    "heat_decay": heat_decay,
    "constant_forcing": constant_forcing,
    "example51": example51,
    "manufactured": _manufactured,
    "manufactured_linear": _manufactured_linear,
}


def build_problem(name: str, **params) -> ProblemSpec:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; known: {sorted(REGISTRY)}") from None
    return factory(**params)
