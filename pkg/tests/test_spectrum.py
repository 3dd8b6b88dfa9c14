import pytest

from threepoint import oracle, spectrum
from threepoint.coeffs import CoefficientPair


def test_stable_delta_matches_determinant(small):
    for lam in (25.0, -300.0, 100 + 50j):
        a = spectrum.delta(small, lam)
        b = spectrum.delta_determinant(small, lam)
        assert a == pytest.approx(b, rel=1e-8)


def test_delta_dot_by_difference(small):
    lam, h = 400.0, 1e-2
    fd = (spectrum.delta(small, lam + h) - spectrum.delta(small, lam - h)) / (2 * h)
    assert spectrum.delta_dot(small, lam) == pytest.approx(fd, rel=1e-7)


@pytest.mark.parametrize("n", [1, -1, 3, -4])
def test_eigenvalue_is_zero_of_delta(small, n):
    rec = spectrum.eigenvalue(small, n)
    assert isinstance(rec.mu, float)
    D = spectrum.delta(small, rec.mu)
    assert abs(D) <= 1e-9 * abs(spectrum.delta_dot(small, rec.mu)) * (1 + abs(rec.mu))
    assert 0 < rec.disc_margin <= 1
    # first order shift predicts the eigenvalue to O(||u||^2)
    assert abs(rec.mu - oracle.mu0(n) - spectrum.linear_shift(small, n)) < 0.05 * small.norm1()


def test_unperturbed_eigenvalues(zero):
    for n in (1, -1, 2, -2):
        assert spectrum.eigenvalue(zero, n).mu == pytest.approx(oracle.mu0(n), rel=1e-12)


def test_transposed_eigenvalue_definition(small):
    a = spectrum.transposed_eigenvalue(small, 2).mu
    b = -spectrum.eigenvalue(small.star(), -2).mu
    assert a == b


def test_winding_number_is_one(small):
    assert spectrum.winding_number(small, 2, points=32) == pytest.approx(1.0, abs=1e-6)


def test_sweep_reports_all_modes(small):
    records, failures = spectrum.eigenvalue_sweep(small, 3)
    assert not failures
    assert [r.n for r in records] == [-3, -2, -1, 1, 2, 3]
    assert all(a.mu < b.mu for a, b in zip(records, records[1:]))


def test_outside_ball_warns():
    u = CoefficientPair.from_arrays([0.0], [0.0], [0.5], [0.0])
    with pytest.warns(UserWarning):
        spectrum.eigenvalue(u, 1)


def test_zero_index_rejected(small):
    with pytest.raises(ValueError):
        spectrum.eigenvalue(small, 0)
