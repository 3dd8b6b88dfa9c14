"""Self-consistency of the closed forms (no ODE integration)."""

import numpy as np
import pytest

from threepoint import oracle


@pytest.mark.parametrize("n", [1, 2, 5, -1, -3])
def test_delta_vanishes_at_mu0(n):
    lam = oracle.mu0(n)
    assert abs(oracle.delta0(lam)) <= 1e-12 * abs(oracle.delta0(lam * 1.01))


@pytest.mark.parametrize("n", [1, 2, 4])
def test_delta_dot_by_difference(n):
    lam, h = oracle.mu0(n), 1e-4 * oracle.mu0(n)
    fd = (oracle.delta0(lam + h) - oracle.delta0(lam - h)) / (2 * h)
    assert fd.real == pytest.approx(oracle.delta0_dot_at(n), rel=1e-6)


@pytest.mark.parametrize("n", [1, 3])
def test_multipliers_and_tau3(n):
    t = oracle.multipliers0(oracle.mu0(n))
    assert np.prod(t) == pytest.approx(1.0)
    assert t[2] == pytest.approx(oracle.tau3_0(n))


def test_phi0_properties():
    x = np.linspace(0, 2, 5)
    P = oracle.phi0(x, 17.0)
    assert np.allclose(P[0], np.eye(3))
    assert np.allclose(np.linalg.det(P), 1.0)


@pytest.mark.parametrize("n", [1, 2])
def test_trig_solutions_match_matrix_form(n):
    x = np.linspace(0, 1, 11)
    P = oracle.phi0(x, oracle.mu0(n))
    y1, y2, y3 = oracle.fundamental_solutions(n, x)
    assert np.allclose(P[:, 0, :].real, np.stack([y1, y2, y3], axis=1), rtol=1e-12)
    assert oracle.y3_at1(n) == pytest.approx(oracle.fundamental_solutions(n, 1.0)[2])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_eigenfunction_vanishes_at_three_points(n):
    vals = oracle.eigenfunction0(n, np.array([0.0, 1.0, 2.0]))[0]
    scale = np.max(np.abs(oracle.eigenfunction0(n, np.linspace(0, 2, 101))[0]))
    assert np.max(np.abs(vals)) <= 1e-13 * scale


def test_zero_mode_rejected():
    with pytest.raises(ValueError):
        oracle.mu0(0)
    with pytest.raises(ValueError):
        oracle.grad_mu0(0, [0.5])
