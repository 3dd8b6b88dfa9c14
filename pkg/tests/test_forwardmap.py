import json

import numpy as np
import pytest

from threepoint import forwardmap as fm
from threepoint.coeffs import CoefficientPair, random_direction
from threepoint.oracle import SQRT3


def test_zero_data_at_zero(zero):
    data = fm.forward(zero, 3)
    assert data.norm() <= 1e-9


def test_F_single_cosine():
    eps = 1e-3
    u = CoefficientPair.from_arrays([0.0], [0.0], [eps], [0.0])
    hc, hs = fm.F_mode(u, 1)
    assert hc == pytest.approx(-eps / 2)
    assert hs == pytest.approx(eps / 2)


def test_F_explicit_components():
    u = random_direction(3, 4)
    dp = u.p.derivative()
    for n in (2, -3):
        pc, ps = dp.fourier_coeff(n, "cos"), dp.fourier_coeff(n, "sin")
        qc, qs = u.q.fourier_coeff(n, "cos"), u.q.fourier_coeff(n, "sin")
        hc = -qc - ps / SQRT3 - qs / SQRT3 + pc / 3
        hs = qc + ps / SQRT3 + SQRT3 * qs - pc
        assert np.allclose(fm.F_mode(u, n), [hc, hs], rtol=1e-13)


def test_F_round_trip():
    u = random_direction(5, 6)
    back = fm.F_inverse(fm.F_apply(u, 5))
    assert np.allclose(back.to_vector(), u.to_vector(), atol=1e-14)
    M = fm.F_matrix(5)
    assert np.allclose(M @ u.to_vector(), fm.F_apply(u, 5).to_vector())


def test_linearisation_is_second_order():
    u0 = random_direction(3, 2)
    r = [fm.linear_residual(e * u0, 3).total for e in (0.02, 0.04)]
    assert r[1] / r[0] == pytest.approx(4.0, rel=0.05)


def test_eigenvalue_shift_entry(small):
    data = fm.forward(small, 2)
    assert data.entries[1][0] == pytest.approx(fm.h_cn(small, 1), abs=1e-12)
    assert data.entries[-2][1] == pytest.approx(fm.h_sn(small, -2), abs=1e-12)


def test_negative_norming_is_reflected(small):
    assert fm.h_sn(small, -1) == -fm.h_sn(small.star_reflect(), 1)


def test_symmetry_defects_small(small):
    for dm, dh in fm.symmetry_defects(small, 2).values():
        assert abs(dm) < 1e-8 and abs(dh) < 1e-8


def test_spectral_data_io(tmp_path, small):
    data = fm.forward(small, 2)
    path = tmp_path / "h.json"
    data.save(path)
    back = fm.SpectralData.load(path)
    assert back.provenance == "loaded"
    assert np.array_equal(back.to_vector(), data.to_vector())
    data.write_eigenvalue_csv(tmp_path / "mu.csv")
    lines = (tmp_path / "mu.csv").read_text().splitlines()
    assert len(lines) == 5 and lines[0].startswith("n,mu")


def test_spectral_data_validation(tmp_path):
    with pytest.raises(ValueError):
        fm.SpectralData(2, {1: (0.0, 0.0), -1: (0.0, 0.0)})
    with pytest.raises(ValueError):
        fm.SpectralData(1, {1: (np.nan, 0.0), -1: (0.0, 0.0)})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"N": 1}))
    with pytest.raises(ValueError):
        fm.SpectralData.load(bad)


def test_vector_layout():
    d = fm.SpectralData.from_vector(np.arange(8.0), 2)
    assert d.entries[1] == (0.0, 1.0) and d.entries[-1] == (2.0, 3.0) and d.entries[-2] == (6.0, 7.0)
    assert d.truncated(1).to_vector().tolist() == [0.0, 1.0, 2.0, 3.0]


def test_threads_give_same_result(small):
    a = fm.forward(small, 2)
    b = fm.forward(small, 2, jobs=3)
    assert np.array_equal(a.to_vector(), b.to_vector())
