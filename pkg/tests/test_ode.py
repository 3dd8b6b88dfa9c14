import numpy as np
import pytest

from threepoint import ode, oracle
from threepoint.coeffs import CoefficientPair
from threepoint.quadrature import gauss_legendre


@pytest.mark.parametrize("lam", [3.7, -250.0, 40 + 300j, 1e-3])
def test_unperturbed_fundamental_matrix(lam):
    u = CoefficientPair.zero(1)
    x = np.linspace(0, 2, 9)
    got = ode.fundamental_matrix(u, lam, x)
    assert np.allclose(got, oracle.phi0(x, lam), rtol=1e-11, atol=1e-12 * np.abs(got).max())


def test_identity_at_zero_and_liouville(small):
    P = ode.fundamental_matrix(small, 120.0, [0.0, 0.5, 1.3, 2.0])
    assert np.allclose(P[0], np.eye(3))
    assert np.allclose(np.linalg.det(P), 1.0, atol=1e-11)


def test_lambda_derivative_matches_difference(small):
    lam, h = 55.0, 1e-3
    _, dP = ode.fundamental_matrix(small, lam, [1.0], with_lambda_derivative=True)
    fd = (ode.fundamental_matrix(small, lam + h, [1.0]) - ode.fundamental_matrix(small, lam - h, [1.0])) / (2 * h)
    assert np.allclose(dP, fd, rtol=1e-6)


def test_transposed_matrix_is_flip_inverse_transpose(small):
    lam = 310.0
    P = ode.fundamental_matrix(small, lam, [0.4, 1.0])
    Pt = ode.transposed_fundamental_matrix(small, lam, [0.4, 1.0])
    assert np.allclose(Pt, ode.flip_inverse_transpose(P), rtol=1e-9)


def test_periodicity(small):
    lam = -80.0
    P = ode.fundamental_matrix(small, lam, [0.3, 1.0, 1.3])
    assert np.allclose(P[2], P[0] @ P[1], rtol=1e-11)


def test_backward_propagator(small):
    lam = 200.0
    t = np.array([0.0, 0.25, 0.8, 1.0])
    G = ode.backward_propagator(small, lam, t)
    P = ode.fundamental_matrix(small, lam, np.append(t, 1.0))
    want = P[-1] @ np.linalg.inv(P[:-1])
    assert np.allclose(G, want, rtol=1e-9)
    assert np.allclose(G[-1], np.eye(3))


def test_shifted_matrix_agrees_with_products(small):
    lam, x, t = 30.0, 0.6, 0.35
    P = ode.fundamental_matrix(small, lam, [t, x + t])
    want = P[1] @ np.linalg.inv(P[0])
    assert np.allclose(ode.shifted_fundamental_matrix(small, lam, x, t), want, rtol=1e-10)


def test_point_validation(small):
    with pytest.raises(ValueError):
        ode.fundamental_matrix(small, 1.0, [0.5, 0.2])
    with pytest.raises(ValueError):
        ode.fundamental_matrix(small, 1.0, [2.5])


def test_step_budget_raises(small):
    tight = ode.Tolerances(max_steps=5)
    with pytest.raises(ode.IntegrationError):
        ode.fundamental_matrix(small, 10.0, [2.0], tol=tight)


def test_real_for_real_lambda(small):
    P = ode.fundamental_matrix(small, -123.0, [0.7, 2.0])
    assert np.abs(P.imag).max() <= 1e-12 * np.abs(P).max()


def test_lambda_derivative_integral_representation(small):
    # dPhi(1)/dlam = int_0^1 Phi(1 - t, t) J_q Phi(t) dt, with Phi(1 - t, t) = G(t)
    lam = 70.0
    grid = gauss_legendre(16, 8)
    G = ode.backward_propagator(small, lam, grid.nodes)
    P = ode.fundamental_matrix(small, lam, grid.nodes)
    integrand = G @ ode.J_Q @ P
    quad = np.tensordot(grid.weights, integrand, axes=(0, 0))
    _, dP = ode.fundamental_matrix(small, lam, [1.0], with_lambda_derivative=True)
    assert np.allclose(quad, dP[0], rtol=1e-7, atol=1e-9 * np.abs(dP).max())
