import numpy as np
import pytest

from threepoint import forwardmap as fm
from threepoint import inverse as inv
from threepoint.coeffs import CoefficientPair, random_in_ball


def test_jacobian_at_zero_is_F():
    J = inv.jacobian(CoefficientPair.zero(2), 2)
    assert np.allclose(J, fm.F_matrix(2), atol=1e-10)


def test_zero_data_needs_no_iterations():
    rep = inv.invert(fm.SpectralData.zeros(2))
    assert rep.converged and rep.iterations == 0
    assert np.all(rep.final_u.to_vector() == 0)


@pytest.mark.parametrize("mode", ["quasi", "full"])
def test_round_trip(mode):
    truth = random_in_ball(0.05, 3, seed=21)
    rep = inv.invert(fm.forward(truth, 3), mode=mode)
    assert rep.converged, rep.message
    assert inv.coefficient_error(rep.final_u, truth) < 1e-7
    assert np.all(rep.contraction_ratios() < 0.5)


def test_report_csv(tmp_path):
    truth = random_in_ball(0.03, 2, seed=4)
    rep = inv.invert(fm.forward(truth, 2))
    rep.write_csv(tmp_path / "conv.csv")
    rows = (tmp_path / "conv.csv").read_text().splitlines()
    assert rows[0] == "iteration,residual,step_norm"
    assert len(rows) == rep.residual_history.size + 1


def test_iteration_budget_reported():
    truth = random_in_ball(0.05, 2, seed=9)
    rep = inv.invert(fm.forward(truth, 2), max_iters=0)
    assert not rep.converged and "no convergence" in rep.message


def test_bad_mode():
    with pytest.raises(ValueError):
        inv.invert(fm.SpectralData.zeros(1), mode="newton")
