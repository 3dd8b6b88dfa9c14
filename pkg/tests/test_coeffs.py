import json

import numpy as np
import pytest

from threepoint.coeffs import CoefficientPair, TrigSeries, random_direction, random_in_ball


def test_evaluation_and_derivative():
    f = TrigSeries([0.3, 0.0], [0.0, -0.2])
    x = np.linspace(0, 1, 7)
    want = 0.3 * np.cos(2 * np.pi * x) - 0.2 * np.sin(4 * np.pi * x)
    assert np.allclose(f(x), want)
    dwant = -0.3 * 2 * np.pi * np.sin(2 * np.pi * x) - 0.2 * 4 * np.pi * np.cos(4 * np.pi * x)
    assert np.allclose(f.derivative()(x), dwant)
    assert np.allclose(f(x + 1.0), f(x))


def test_fourier_coefficients_match_quadrature():
    f = TrigSeries([0.3, -0.1], [0.7, 0.2])
    x = (np.arange(256) + 0.5) / 256
    for n in (1, -1, 2, -2, 3):
        for kind, trig in (("cos", np.cos), ("sin", np.sin)):
            numeric = np.mean(f(x) * trig(2 * np.pi * n * x))
            assert f.fourier_coeff(n, kind) == pytest.approx(numeric, abs=1e-14)
    with pytest.raises(ValueError):
        f.fourier_coeff(0, "cos")


def test_norms():
    u = CoefficientPair.from_arrays([0.1], [0.0], [0.0], [0.2])
    plain, weighted = u.norms()
    assert plain == pytest.approx(np.sqrt(0.5 * (0.01 + 0.04)))
    assert weighted == pytest.approx(np.sqrt(0.5 * ((2 * np.pi * 0.1) ** 2 + 0.04)))


def test_involutions_are_involutive():
    u = random_direction(3, 5)
    for which in ("star", "reflect", "star_reflect"):
        v = u.involution(which).involution(which)
        assert np.array_equal(v.to_vector(), u.to_vector())
    x = np.linspace(0, 1, 9)
    r = u.reflect()
    assert np.allclose(r.q(x), u.q(1 - x))
    assert np.allclose(u.star().q(x), -u.q(x))


def test_vector_and_json_round_trip(tmp_path):
    u = random_direction(4, 2)
    assert np.array_equal(CoefficientPair.from_vector(u.to_vector(), 4).to_vector(), u.to_vector())
    path = tmp_path / "u.json"
    u.save(path)
    assert np.array_equal(CoefficientPair.load(path).to_vector(), u.to_vector())
    obj = json.loads(path.read_text())
    obj["q_sin"] = obj["q_sin"][:-1]
    with pytest.raises(ValueError):
        CoefficientPair.from_json(obj)


def test_random_pairs_are_normalised():
    assert random_direction(6, 1).norm1() == pytest.approx(1.0)
    u = random_in_ball(0.05, 6, 1)
    assert 0 < u.norm1() < 0.05
    assert np.array_equal(u.to_vector(), random_in_ball(0.05, 6, 1).to_vector())


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        TrigSeries([np.nan], [0.0])
