"""Sine-basis calculus for A = -d^2/dx^2 on (0, 1) with Dirichlet conditions.

A spectral field is a real coefficient array whose last axis runs over the
modes e_n(x) = sqrt(2) sin(n pi x), n = 1..N.  Leading axes are batch axes
(time grid points, probes, ...), so every routine here broadcasts.

Grid functions live on the interior nodes x_i = i / M_x, i = 1..M_x-1; the
boundary values are zero by construction.
"""
from __future__ import annotations

import enum
import functools

import numpy as np
from scipy import fft

SQRT2 = np.sqrt(2.0)


class Convention(str, enum.Enum):
    """Which eigenvalues the square root of A is given.

    ``EIGEN`` uses (n^2 pi^2)^a for every real power a, so A^{1/2} e_n = n pi e_n
    and ||v'|| = ||A^{1/2} v||.  ``PAPER`` reproduces the literal series
    A^{+-1/2} e_n = n^{+-1} e_n, which is what gives ||A^{-1/2}|| = 1; it only
    defines the orders 0, +-1/2 and +-1.
    """

    EIGEN = "eigen"
    PAPER = "paper"


_PAPER_ORDERS = (-1.0, -0.5, 0.0, 0.5, 1.0)


def mode_numbers(n_modes: int) -> np.ndarray:
    return np.arange(1, n_modes + 1, dtype=float)


def eigenvalues(n_modes: int) -> np.ndarray:
    """lambda_n = n^2 pi^2."""
    n = mode_numbers(n_modes)
    return n * n * np.pi**2


def power_factors(n_modes: int, order: float, convention=Convention.EIGEN) -> np.ndarray:
    """Diagonal of A^order in the sine basis."""
    convention = Convention(convention)
    order = float(order)
    if not -1.0 <= order <= 1.0:
        raise ValueError(f"fractional order {order} outside [-1, 1]")
    if convention is Convention.PAPER:
        if order not in _PAPER_ORDERS:
            raise ValueError(
                f"order {order} is undefined under the paper convention "
                f"(allowed: {_PAPER_ORDERS})")
        if abs(order) == 0.5:
            return mode_numbers(n_modes) ** (2.0 * order)
    return eigenvalues(n_modes) ** order


def _check_grid(m_x: int) -> None:
    if m_x < 2:
        raise ValueError(f"space grid M_x={m_x} has no interior nodes")


def grid(m_x: int) -> np.ndarray:
    """Interior nodes i / M_x."""
    _check_grid(m_x)
    return np.arange(1, m_x) / m_x


def forward_transform(values, n_modes: int) -> np.ndarray:
    """Sine coefficients of interior grid values (DST-I analysis).

    Returns the first ``n_modes`` discrete inner products with e_n.  Exact for
    inputs in the span of e_1..e_{M_x-1}.
    """
    values = np.asarray(values, dtype=float)
    m_inner = values.shape[-1]
    if m_inner < n_modes:
        raise ValueError(
            f"dimension mismatch: {m_inner} interior nodes cannot resolve "
            f"{n_modes} modes")
    m_x = m_inner + 1
    coeffs = fft.dst(values, type=1, axis=-1) / (SQRT2 * m_x)
    return np.ascontiguousarray(coeffs[..., :n_modes])


@functools.lru_cache(maxsize=32)
def _basis_matrices(n_modes: int, m_x: int) -> tuple[np.ndarray, np.ndarray]:
    # rows: modes, columns: interior nodes
    arg = np.pi * np.outer(mode_numbers(n_modes), grid(m_x))
    sin_m = SQRT2 * np.sin(arg)
    cos_m = SQRT2 * np.cos(arg) * (np.pi * mode_numbers(n_modes))[:, None]
    sin_m.setflags(write=False)
    cos_m.setflags(write=False)
    return sin_m, cos_m


def inverse_transform(coeffs, m_x: int) -> np.ndarray:
    """Values of sum_n c_n e_n(x) at the interior nodes of an M_x grid."""
    _check_grid(m_x)
    coeffs = np.asarray(coeffs, dtype=float)
    n_modes = coeffs.shape[-1]
    if n_modes <= m_x - 1:
        pad = [(0, 0)] * (coeffs.ndim - 1) + [(0, m_x - 1 - n_modes)]
        return fft.dst(np.pad(coeffs, pad), type=1, axis=-1) / SQRT2
    sin_m, _ = _basis_matrices(n_modes, m_x)
    return coeffs @ sin_m


def spatial_derivative(coeffs, m_x: int) -> np.ndarray:
    """d/dx of the expansion at the interior nodes: sum_n c_n sqrt(2) n pi cos(n pi x)."""
    coeffs = np.asarray(coeffs, dtype=float)
    _, cos_m = _basis_matrices(coeffs.shape[-1], m_x)
    return coeffs @ cos_m


def evaluate(coeffs, x, derivative: int = 0) -> np.ndarray:
    """Evaluate the expansion (or one of its x-derivatives) at points ``x``.

    ``x`` is a scalar or 1-d array; the result has shape coeffs.shape[:-1] + x.shape.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    x = np.asarray(x, dtype=float)
    k = np.pi * mode_numbers(coeffs.shape[-1])
    # d^m/dx^m sin(kx) = k^m sin(kx + m pi / 2)
    basis = SQRT2 * k**derivative * np.sin(np.multiply.outer(x, k) + derivative * np.pi / 2)
    return coeffs @ basis.T


def semigroup_apply(t: float, coeffs) -> np.ndarray:
    """T(t)u: multiply mode n by exp(-n^2 pi^2 t)."""
    if t < 0:
        raise ValueError(f"semigroup time must be non-negative, got {t}")
    coeffs = np.asarray(coeffs, dtype=float)
    return coeffs * np.exp(-eigenvalues(coeffs.shape[-1]) * t)


def fractional_power_apply(order: float, coeffs, convention=Convention.EIGEN) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    return coeffs * power_factors(coeffs.shape[-1], order, convention)


def resolvent_apply(omega: float, coeffs) -> np.ndarray:
    """(I - T(omega))^{-1} u, i.e. divide mode n by 1 - exp(-lambda_n omega)."""
    if omega <= 0:
        raise ValueError(f"period must be positive, got {omega}")
    coeffs = np.asarray(coeffs, dtype=float)
    return coeffs / -np.expm1(-eigenvalues(coeffs.shape[-1]) * omega)


def norm_alpha(coeffs, alpha: float, convention=Convention.EIGEN) -> np.ndarray:
    """||A^alpha u||_{L^2}; reduces over the mode axis only."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha} outside [0, 1]")
    weighted = fractional_power_apply(alpha, coeffs, convention)
    return np.sqrt(np.sum(weighted * weighted, axis=-1))


def smoothing_norm(alpha: float, t: float, n_modes: int) -> float:
    """Operator norm of A^alpha T(t) on the truncated space: max_n lambda_n^alpha e^{-lambda_n t}."""
    lam = eigenvalues(n_modes)
    return float(np.max(lam**alpha * np.exp(-lam * t)))
