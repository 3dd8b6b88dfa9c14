import numpy as np
import pytest

from threepoint import monodromy as mo
from threepoint import oracle


def test_inverse_without_solve(small):
    data = mo.monodromy_data(small, 140.0)
    assert np.allclose(data.inverse() @ data.M, np.eye(3), atol=1e-10)


def test_swapped_is_transposed_view(small):
    data = mo.monodromy_data(small, 90.0)
    other = mo.monodromy_data(small.star(), -90.0)
    sw = data.swapped()
    assert np.allclose(sw.M, other.M) and np.allclose(sw.Mt, other.Mt)


@pytest.mark.parametrize("lam", [50.0, 900.0, 30 + 400j])
def test_multipliers_are_eigenvalues(small, lam):
    M = mo.monodromy(small, lam)
    trip = mo.multipliers(small, lam).as_array()
    ev = np.linalg.eigvals(M)
    for t in trip:
        assert np.min(np.abs(ev - t)) <= 1e-8 * np.abs(ev).max()
    assert np.prod(trip) == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_tau3_tracks_exp_z(zero, n):
    lam = oracle.mu0(n)
    assert mo.tau3(zero, lam).real == pytest.approx(oracle.tau3_0(n), rel=1e-12)
    assert mo.tau3_lambda_derivative(zero, lam).real == pytest.approx(oracle.tau3_dot0(n), rel=1e-10)


def test_tau3_derivative_by_difference(small):
    lam, h = 700.0, 1e-2
    fd = (mo.tau3(small, lam + h) - mo.tau3(small, lam - h)) / (2 * h)
    assert mo.tau3_lambda_derivative(small, lam) == pytest.approx(fd, rel=1e-7)


def test_excluded_discs(zero):
    assert mo.excluded_disc(0.5) == 0
    assert mo.excluded_disc(oracle.mu0(-2)) == 2
    assert mo.excluded_disc(oracle.mu0(2)) is None
    with pytest.raises(mo.DomainError):
        mo.tau3(zero, oracle.mu0(-1))


def test_cardano_roots_solve_cubic():
    T, Tt = 3.5 + 0.2j, -1.0 + 0.5j
    for r in mo.cardano_roots(T, Tt):
        assert abs(r**3 - T * r**2 + Tt * r - 1) <= 1e-12 * max(1.0, abs(r) ** 3)
