from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from slpconv.slp_basis import (
    BasisFunctionId,
    derivative_relation_residual,
    eval_beta,
    eval_phi,
    eval_Q,
    eval_Q_derivative,
    multiply_by_x,
    poly_coefficients,
    poly_eval_exact,
)

GRID = np.linspace(0.0, 1.0, 101)


def test_Q0_is_constant():
    assert np.all(eval_Q(0, GRID) == 1.0)


def test_Q1_vanishes_at_midpoint():
    assert eval_Q(1, 0.5) == 0.0


def test_Q2_at_point_three():
    # L_2(u) = (3u^2 - 1)/2 at u = 2(0.3) - 1 = -0.4
    assert eval_Q(2, 0.3) == pytest.approx(-0.26, abs=1e-15)


def test_Q_rejects_outside_unit_interval():
    with pytest.raises(ValueError):
        eval_Q(3, 1.2)
    with pytest.raises(ValueError):
        eval_Q(3, [-0.1, 0.5])


def test_Q_at_one_is_one():
    assert all(eval_Q(i, 1.0) == pytest.approx(1.0, abs=1e-13) for i in range(31))


def test_Q_exact_coefficients_match_recurrence():
    for i in range(0, 15):
        exact = np.array([float(poly_eval_exact(poly_coefficients(BasisFunctionId("Q", i)), x)) for x in GRID])
        np.testing.assert_allclose(eval_Q(i, GRID), exact, atol=1e-12)


def test_orthogonality_up_to_30():
    x, w = np.polynomial.legendre.leggauss(40)
    x, w = 0.5 * (x + 1), 0.5 * w
    Q = np.array([eval_Q(i, x) for i in range(31)])
    gram = (Q * w) @ Q.T
    expected = np.diag(1.0 / (2 * np.arange(31) + 1))
    assert np.abs(gram - expected).max() < 1e-13


def test_phi1_endpoints_and_midpoint():
    assert eval_phi(1, 0.0) == 0.0
    assert eval_phi(1, 1.0) == pytest.approx(0.0, abs=1e-16)
    assert eval_phi(1, 0.5) == pytest.approx(-0.25, abs=1e-15)


def test_phi3_is_integral_of_Q3():
    for x in (0.1, 0.37, 0.5, 0.8, 1.0):
        ref, _ = quad(lambda t: float(eval_Q(3, t)), 0.0, x, epsabs=1e-14)
        assert eval_phi(3, x) == pytest.approx(ref, abs=1e-12)


def test_phi_rejects_index_zero():
    with pytest.raises(ValueError):
        eval_phi(0, 0.5)
    with pytest.raises(ValueError):
        eval_beta(0, 0.5)


def test_beta1_closed_form():
    # beta_1 = x^2 (1 - x)^2 / 2
    np.testing.assert_allclose(eval_beta(1, GRID), GRID**2 * (1 - GRID) ** 2 / 2, atol=1e-15)
    assert eval_beta(1, 0.5) == pytest.approx(0.03125, abs=1e-16)


def test_beta1_endpoint_conditions():
    for end in (0.0, 1.0):
        assert eval_beta(1, end) == pytest.approx(0.0, abs=1e-16)
        assert eval_beta(1, end, deriv=1) == pytest.approx(0.0, abs=1e-16)


def test_beta2_second_derivative_is_Q3():
    h = 1e-4
    x = np.linspace(0.05, 0.95, 37)
    fd = (eval_beta(2, x + h) - 2 * eval_beta(2, x) + eval_beta(2, x - h)) / h**2
    np.testing.assert_allclose(fd, eval_Q(3, x), atol=1e-6)
    np.testing.assert_allclose(eval_beta(2, GRID, deriv=2), eval_Q(3, GRID), atol=1e-12)


@pytest.mark.parametrize("i", range(1, 31))
def test_exact_endpoint_conditions(i):
    phi = poly_coefficients(BasisFunctionId("phi", i))
    beta = poly_coefficients(BasisFunctionId("beta", i))
    dbeta = poly_coefficients(BasisFunctionId("beta", i, 1))
    for end in (0, 1):
        assert poly_eval_exact(phi, end) == 0
        assert poly_eval_exact(beta, end) == 0
        assert poly_eval_exact(dbeta, end) == 0


@pytest.mark.parametrize("i", range(1, 31))
def test_second_derivative_of_beta_is_Q_exactly(i):
    assert poly_coefficients(BasisFunctionId("beta", i, 2)) == poly_coefficients(BasisFunctionId("Q", i + 1))


@pytest.mark.parametrize("kind,offset", [("Q", 0), ("phi", 1), ("beta", 3)])
def test_degrees(kind, offset):
    for i in range(1, 12):
        assert len(poly_coefficients(BasisFunctionId(kind, i))) - 1 == i + offset


def test_multiply_by_x_index_zero():
    assert multiply_by_x(0) == [(1, Fraction(1, 2)), (0, Fraction(1, 2))]
    x = GRID
    np.testing.assert_allclose(0.5 * eval_Q(1, x) + 0.5 * eval_Q(0, x), x, atol=1e-15)


def test_multiply_by_x_index_one():
    terms = dict(multiply_by_x(1))
    assert 2 * terms[2] == Fraction(2, 3) and 2 * terms[1] == 1 and 2 * terms[0] == Fraction(1, 3)
    lhs = 2 * GRID * eval_Q(1, GRID)
    np.testing.assert_allclose(lhs, 4 * GRID**2 - 2 * GRID, atol=1e-14)
    rhs = sum(2 * float(c) * eval_Q(j, GRID) for j, c in multiply_by_x(1))
    np.testing.assert_allclose(rhs, lhs, atol=1e-14)


@pytest.mark.parametrize("i", [5, 17, 30])
def test_multiply_by_x_residual(i):
    rhs = sum(float(c) * eval_Q(j, GRID) for j, c in multiply_by_x(i))
    assert np.max(np.abs(GRID * eval_Q(i, GRID) - rhs)) < 1e-12


def test_derivative_relation():
    # 6 Q_1 = Q_2' - Q_0' = 12x - 6
    np.testing.assert_allclose(6 * eval_Q(1, GRID), eval_Q_derivative(2, GRID), atol=1e-14)
    assert np.max(derivative_relation_residual(1, GRID)) < 1e-13
    assert derivative_relation_residual(2, 0.0) < 1e-12
    with pytest.raises(ValueError):
        derivative_relation_residual(0, 0.5)


def test_derivative_relation_dense_grid():
    g = np.linspace(0, 1, 1001)
    assert max(float(np.max(derivative_relation_residual(i, g))) for i in range(1, 31)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(i=st.integers(0, 30), x=st.floats(0.0, 1.0))
def test_multiply_by_x_property(i, x):
    rhs = sum(float(c) * eval_Q(j, x) for j, c in multiply_by_x(i))
    assert abs(x * eval_Q(i, x) - rhs) < 1e-12


@settings(max_examples=30, deadline=None)
@given(i=st.integers(1, 25), x=st.fractions(0, 1, max_denominator=1000))
def test_beta_derivative_is_phi_exactly(i, x):
    dbeta = poly_coefficients(BasisFunctionId("beta", i, 1))
    phi = poly_coefficients(BasisFunctionId("phi", i + 1))
    assert poly_eval_exact(dbeta, x) == poly_eval_exact(phi, x)
