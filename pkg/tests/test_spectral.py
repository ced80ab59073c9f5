import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from neutral_periodic import spectral as sp
from neutral_periodic.spectral import Convention

N, MX = 32, 65

coeff_arrays = arrays(np.float64, (N,), elements=st.floats(-10, 10, allow_subnormal=False))


def test_eigenvalues():
    assert np.allclose(sp.eigenvalues(3), [np.pi**2, 4 * np.pi**2, 9 * np.pi**2], rtol=1e-15)


def test_forward_transform_matches_direct_sum():
    # discrete inner product written out with explicit sines
    rng = np.random.default_rng(3)
    vals = rng.standard_normal(MX - 1)
    x = sp.grid(MX)
    direct = np.array([np.sum(vals * np.sqrt(2) * np.sin(n * np.pi * x)) / MX
                       for n in range(1, N + 1)])
    assert np.allclose(sp.forward_transform(vals, N), direct, atol=1e-14)


def test_basis_function_transform():
    x = sp.grid(MX)
    e3 = np.sqrt(2) * np.sin(3 * np.pi * x)
    expected = np.zeros(N)
    expected[2] = 1.0
    assert np.allclose(sp.forward_transform(e3, N), expected, atol=1e-14)


@given(coeff_arrays)
def test_round_trip(c):
    back = sp.forward_transform(sp.inverse_transform(c, MX), N)
    assert np.max(np.abs(back - c)) <= 1e-12 * max(1.0, np.max(np.abs(c)))


def test_forward_rejects_too_few_nodes():
    with pytest.raises(ValueError, match="dimension mismatch"):
        sp.forward_transform(np.zeros(10), 20)


def test_evaluate_matches_inverse_and_derivative():
    rng = np.random.default_rng(0)
    c = rng.standard_normal(N) / np.arange(1, N + 1) ** 2
    x = sp.grid(MX)
    assert np.allclose(sp.evaluate(c, x), sp.inverse_transform(c, MX), atol=1e-13)
    assert np.allclose(sp.evaluate(c, x, 1), sp.spatial_derivative(c, MX), atol=1e-12)
    # second derivative is -A in coefficient space
    assert np.allclose(sp.evaluate(c, x, 2), sp.inverse_transform(-sp.eigenvalues(N) * c, MX),
                       atol=1e-10)


def test_derivative_against_finite_difference():
    c = np.zeros(N)
    c[0], c[1] = 1.0, 0.5
    x = np.linspace(0.1, 0.9, 9)
    h = 1e-6
    fd = (sp.evaluate(c, x + h) - sp.evaluate(c, x - h)) / (2 * h)
    assert np.allclose(sp.evaluate(c, x, 1), fd, atol=1e-7)


@given(coeff_arrays, st.floats(0, 0.1), st.floats(0, 0.1))
def test_semigroup_law(c, s, t):
    lhs = sp.semigroup_apply(s + t, c)
    rhs = sp.semigroup_apply(s, sp.semigroup_apply(t, c))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_semigroup_rejects_negative_time():
    with pytest.raises(ValueError):
        sp.semigroup_apply(-1e-3, np.ones(4))


@given(coeff_arrays, st.sampled_from([0.25, 0.5, 0.75, 1.0]), st.floats(0, 0.05))
def test_fractional_power_commutes_with_semigroup(c, order, t):
    a = sp.fractional_power_apply(order, sp.semigroup_apply(t, c))
    b = sp.semigroup_apply(t, sp.fractional_power_apply(order, c))
    # the same two diagonal scalings in swapped order: equal up to rounding
    assert np.allclose(a, b, rtol=1e-15, atol=1e-300)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("t", [1e-4, 1e-3, 1e-2, 1e-1, 1.0])
def test_smoothing_bound(alpha, t):
    assert sp.smoothing_norm(alpha, t, 2000) <= math.gamma(alpha) * t**-alpha


def test_half_power_is_derivative_norm():
    rng = np.random.default_rng(1)
    c = rng.standard_normal(N) / np.arange(1, N + 1) ** 2
    # ||v'||^2 by fine trapezoid quadrature, independent of the transform code
    x = np.linspace(0.0, 1.0, 40001)
    dv = sp.evaluate(c, x, 1)
    quad = np.sqrt(np.trapezoid(dv * dv, x))
    assert abs(quad - sp.norm_alpha(c, 0.5)) <= 1e-10 * quad


def test_paper_convention_half_power():
    c = np.ones(4)
    assert np.allclose(sp.fractional_power_apply(-0.5, c, Convention.PAPER), 1 / np.arange(1, 5))
    assert np.allclose(sp.fractional_power_apply(1.0, c, "paper"), sp.eigenvalues(4))
    with pytest.raises(ValueError, match="undefined"):
        sp.power_factors(4, 0.25, Convention.PAPER)


def test_resolvent_inverts_one_minus_semigroup():
    rng = np.random.default_rng(2)
    c = rng.standard_normal(N)
    omega = 0.7
    back = sp.resolvent_apply(omega, c - sp.semigroup_apply(omega, c))
    assert np.allclose(back, c, rtol=1e-13)
    with pytest.raises(ValueError):
        sp.resolvent_apply(0.0, c)


def test_norm_alpha_bounds_and_batching():
    c = np.zeros((3, N))
    c[1, 0] = 2.0
    assert np.allclose(sp.norm_alpha(c, 0.5), [0.0, 2 * np.pi, 0.0])
    with pytest.raises(ValueError):
        sp.norm_alpha(c, 1.5)


@settings(max_examples=30)
@given(st.integers(2, 200))
def test_grid_interior(m_x):
    x = sp.grid(m_x)
    assert x.size == m_x - 1 and x[0] > 0 and x[-1] < 1
