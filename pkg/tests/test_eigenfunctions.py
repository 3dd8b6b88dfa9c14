import numpy as np
import pytest

from threepoint import eigenfunctions as ef
from threepoint import ode, oracle
from threepoint.monodromy import monodromy_data
from threepoint.spectrum import eigenvalue

X = np.linspace(0.0, 2.0, 41)


@pytest.fixture(scope="module", params=[1, -1, 2, -3])
def case(request, small):
    n = request.param
    mu = eigenvalue(small, n).mu
    return small, n, mu, monodromy_data(small, mu)


def test_eigenfunction_vanishes_at_nodes(case):
    u, n, mu, data = case
    for f in (ef.phi(u, mu, X, data=data), ef.psi(u, mu, X, data=data)):
        scale = np.abs(f.values).max()
        at = np.abs(f.values[[0, 20, 40]])
        assert at.max() <= 1e-8 * scale


def test_psi_matches_direct_integration(case):
    u, n, mu, data = case
    P = ode.fundamental_matrix(u, mu, X)
    direct = P[:, 0, :] @ ef.psi_initial_vector(data)
    got = ef.psi(u, mu, X, data=data).values
    # the direct route is trustworthy where psi dominates
    mask = np.abs(direct) > 1e-6 * np.abs(direct).max()
    assert np.allclose(got[mask], direct[mask], rtol=1e-6)


def test_phi_scale_cross_check(case):
    u, n, mu, data = case
    if abs(n) <= 2:
        assert ef.phi_scale(data) == pytest.approx(ef.phi_scale_from_minor(data), rel=1e-6)


def test_period_ratio(case):
    u, n, mu, data = case
    t = np.linspace(0.05, 0.95, 7)
    f = ef.psi(u, mu, np.concatenate([t, t + 1]), data=data)
    assert np.allclose(f.values[7:], ef.period_ratio(data) * f.values[:7])


def test_phi_against_determinant(case):
    u, n, mu, data = case
    if abs(n) > 1:
        pytest.skip("the determinant form cancels beyond the first mode")
    grid = np.linspace(0.0, 2.0, 11)
    a = ef.phi(u, mu, grid, data=data).values
    b = ef.phi_determinant(u, mu, grid)
    assert np.allclose(a, b, rtol=1e-6, atol=1e-8 * np.abs(b).max())


def test_rejects_non_eigenvalue(small):
    with pytest.raises(ef.NotAnEigenvalueError):
        ef.phi(small, oracle.mu0(1) + 3.0, X)


@pytest.mark.parametrize("n", [1, 2])
def test_unperturbed_chi(zero, n):
    mu = oracle.mu0(n)
    x = np.linspace(0.0, 0.95, 12)
    c = ef.chi(zero, mu, x)
    assert np.allclose(c.values, oracle.transposed_fundamental_solutions(n, x)[2], rtol=1e-11)


def test_bracket_is_antisymmetric(case):
    u, n, mu, data = case
    f = ef.phi(u, mu, X, data=data)
    g = ef.psi(u, mu, X, data=data)
    assert np.allclose(ef.bracket(f, g).values, -ef.bracket(g, f).values)
    assert np.allclose(ef.bracket(f, f).values, 0.0)
    with pytest.raises(ValueError):
        ef.bracket(f, ef.psi(u, mu, X[:-1], data=data))
