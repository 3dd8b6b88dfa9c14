import json

import numpy as np
import pytest

from threepoint.cli import main
from threepoint.coeffs import CoefficientPair, random_in_ball


@pytest.fixture
def coeff_file(tmp_path):
    path = tmp_path / "u.json"
    random_in_ball(0.04, 2, seed=5).save(path)
    return path


def test_forward_then_invert(tmp_path, coeff_file, capsys):
    spectral, eig = tmp_path / "h.json", tmp_path / "mu.csv"
    assert main(["forward", str(coeff_file), "--modes", "2", "-o", str(spectral), "--csv", str(eig)]) == 0
    assert json.loads(spectral.read_text())["N"] == 2
    out, rep = tmp_path / "rec.json", tmp_path / "conv.csv"
    code = main(["invert", str(spectral), "-o", str(out), "--report", str(rep), "--truth", str(coeff_file)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["converged"] and summary["coefficient_error"] < 1e-7
    rec = CoefficientPair.load(out)
    assert np.allclose(rec.to_vector(), CoefficientPair.load(coeff_file).to_vector(), atol=1e-9)


def test_numbers_carry_full_precision(tmp_path, coeff_file):
    eig = tmp_path / "mu.csv"
    main(["forward", str(coeff_file), "--modes", "1", "--csv", str(eig), "-o", str(tmp_path / "h.json")])
    mu = eig.read_text().splitlines()[1].split(",")[1]
    assert len(mu.replace("-", "").replace(".", "").lstrip("0")) >= 16


def test_oracle_command(capsys):
    assert main(["oracle", "--modes", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "pass"


def test_gradcheck_failure_list(capsys):
    # an impossible threshold turns every comparison into a reported failure
    code = main(["gradcheck", "--modes", "1", "--directions", "1", "--threshold", "0"])
    assert code == 1
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "fail" and report["failures"]
    assert {"quantity", "n", "rel_error"} <= set(report["failures"][0])


def test_usage_errors(tmp_path, capsys):
    assert main(["invert", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["forward", str(bad)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["forward"])
    assert exc.value.code == 2
