import json

import numpy as np
import pytest

from qpbounds.cli import CliError, _parse_grid, load_matrix, main
from qpbounds.instances import EXAMPLE1_Q

MATRIX_TEXT = """\
# reference 6x6 instance
6
-11 -11 -7 -10 -8 -2
-11 -5 -10 -9 -10 -7
# a comment inside the data block
-7 -10 -10 -3 -6 -8
-10 -9 -3 -8 -9 -10
-8 -10 -6 -9 -8 -7
-2 -7 -8 -10 -7 -6
"""


@pytest.fixture
def matrix_file(tmp_path):
    path = tmp_path / "q.txt"
    path.write_text(MATRIX_TEXT)
    return str(path)


def test_embedded_matrix_matches_published_entries():
    published = [
        [-11, -11, -7, -10, -8, -2],
        [-11, -5, -10, -9, -10, -7],
        [-7, -10, -10, -3, -6, -8],
        [-10, -9, -3, -8, -9, -10],
        [-8, -10, -6, -9, -8, -7],
        [-2, -7, -8, -10, -7, -6],
    ]
    assert np.array_equal(EXAMPLE1_Q, np.array(published, dtype=float))


def test_load_matrix_comments_and_symmetrization(matrix_file):
    q = load_matrix(matrix_file)
    assert np.array_equal(q, EXAMPLE1_Q)


def test_load_matrix_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n1 2 3\n4 5\n")
    with pytest.raises(CliError, match="row 1"):
        load_matrix(str(bad))
    bad.write_text("2\n1 2\n")
    with pytest.raises(CliError, match="expected 2 matrix rows"):
        load_matrix(str(bad))
    bad.write_text("x\n")
    with pytest.raises(CliError, match="order"):
        load_matrix(str(bad))
    bad.write_text("1\nnan\n")
    with pytest.raises(CliError, match="non-finite"):
        load_matrix(str(bad))


def test_bound_text(matrix_file, capsys):
    code = main(["bound", "--matrix", matrix_file, "--relaxation", "dnn-l1"])
    out = capsys.readouterr().out
    assert code == 0
    value = float(next(ln.split()[1] for ln in out.splitlines() if ln.startswith("value")))
    assert value == pytest.approx(2.0487, abs=1e-2)
    assert "residual_primal" in out and "seconds" in out


def test_bound_json(matrix_file, capsys):
    code = main(
        ["bound", "--matrix", matrix_file, "--relaxation", "dnn-l2l1-new-eq",
         "--k", "5", "--format", "json"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] == pytest.approx(7.048, abs=1e-2)
    assert payload["status"] == "optimal"


def test_bound_input_errors(matrix_file, capsys):
    assert main(["bound", "--matrix", matrix_file, "--relaxation", "dnn-lp"]) == 1
    assert "--p" in capsys.readouterr().err
    assert main(["bound", "--matrix", matrix_file, "--relaxation", "no-such"]) == 1
    assert "invalid choice" in capsys.readouterr().err
    assert main(["bound", "--matrix", "missing.txt", "--relaxation", "dnn-l1"]) == 1
    assert "matrix file" in capsys.readouterr().err
    assert main(["bound", "--matrix", matrix_file, "--relaxation", "dnn-l1", "--k", "2"]) == 1
    assert "--k" in capsys.readouterr().err


def test_bound_iter_limit_exit_code(matrix_file, capsys):
    code = main(
        ["bound", "--matrix", matrix_file, "--relaxation", "dnn-l1",
         "--max-iter", "10", "--format", "json"]
    )
    assert code == 2
    payload = json.loads(capsys.readouterr().out)
    assert payload["status"] == "iter_limit"
    assert payload["residual_primal"] > 0.0  # achieved residuals still reported


def test_compare_reference_k3(matrix_file, capsys):
    code = main(["compare", "--matrix", matrix_file, "--k", "3", "--format", "json"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["bounds"]["sdp_x"]["value"] == pytest.approx(6.3104, abs=1e-2)
    assert report["bounds"]["dnn_l2l1"]["value"] == pytest.approx(6.0964, abs=1e-2)
    assert report["bounds"]["dnn_l2l1_new_le"]["value"] == pytest.approx(5.9962, abs=1e-2)
    assert report["bounds"]["sdp_x"]["value"] >= report["bounds"]["dnn_l2l1"]["value"]
    assert all(c["satisfied"] for c in report["orderings"] if not c["informational"])
    assert report["certificate"]["certified"] is True


def test_compare_reference_k5_not_certified(matrix_file, capsys):
    code = main(["compare", "--matrix", matrix_file, "--k", "5", "--format", "json"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["bounds"]["dnn_l2l1_new_eq"]["value"] == pytest.approx(7.048, abs=1e-2)
    assert report["certificate"]["certified"] is False
    assert report["lambda_max"] == pytest.approx(7.0857, abs=1e-3)


def test_compare_text_and_json_values_identical(matrix_file, capsys):
    assert main(["compare", "--matrix", matrix_file, "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert main(["compare", "--matrix", matrix_file, "--format", "text"]) == 0
    text = capsys.readouterr().out
    for name in ("dnn_l1", "dnn_l1_new"):
        line = next(ln for ln in text.splitlines() if ln.strip().startswith(name))
        assert float(line.split()[1]) == report["bounds"][name]["value"]
    lam_line = next(ln for ln in text.splitlines() if ln.startswith("lambda_max"))
    assert float(lam_line.split()[1]) == report["lambda_max"]


def test_compare_csv_contains_values(matrix_file, capsys):
    assert main(["compare", "--matrix", matrix_file, "--p", "1.5", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    rows = dict(ln.split(",", 1) for ln in out.strip().splitlines()[1:])
    assert float(rows["dnn_lp"]) <= min(float(rows["b1"]), float(rows["b2"])) + 1e-5


def test_compare_k_validation(matrix_file, capsys):
    assert main(["compare", "--matrix", matrix_file, "--k", "0.5"]) == 1
    assert "k must lie in [1, n]" in capsys.readouterr().err


def test_examples_pass(capsys):
    assert main(["examples"]) == 0
    out = capsys.readouterr().out
    assert out.count("pass") == 8
    assert "FAIL" not in out


def test_examples_tight_tolerance_fails(capsys):
    assert main(["examples", "--tol", "1e-9"]) == 2
    assert "FAIL" in capsys.readouterr().out


def test_parse_grid():
    assert len(_parse_grid("1.05:0.05:1.95")) == 19
    assert _parse_grid("1.5:0.1:1.5") == [1.5]
    with pytest.raises(CliError, match="inside"):
        _parse_grid("0.9:0.1:1.5")
    with pytest.raises(CliError, match="inside"):
        _parse_grid("1.5:0.1:2.0")
    with pytest.raises(CliError, match="START:STEP:END"):
        _parse_grid("1.5:1.9")


def test_sweep_p(tmp_path, capsys):
    out_csv = tmp_path / "sweep.csv"
    code = main(["sweep-p", "--n", "6", "--seed", "0",
                 "--grid", "1.05:0.05:1.95", "--out", str(out_csv)])
    assert code == 0
    lines = out_csv.read_text().strip().splitlines()
    assert lines[0] == "p,lower,dnn_lp,b1,b2"
    assert len(lines) == 20  # header + 19 grid rows
    rows = [tuple(float(tok) for tok in ln.split(",")) for ln in lines[1:]]
    b2_values = {row[4] for row in rows}
    assert len(b2_values) == 1  # p-free bound is constant
    b1_values = [row[3] for row in rows]
    assert all(b1_values[i] <= b1_values[i + 1] + 1e-12 for i in range(len(b1_values) - 1))
    for p, lower, dnn_lp, b1, b2 in rows:
        assert 1.0 < p < 2.0
        assert lower <= dnn_lp + 1e-5
        assert dnn_lp <= min(b1, b2) + 1e-5


def test_sweep_p_validation(tmp_path, capsys):
    out_csv = str(tmp_path / "s.csv")
    assert main(["sweep-p", "--n", "25", "--grid", "1.1:0.1:1.9", "--out", out_csv]) == 1
    assert main(["sweep-p", "--n", "5", "--grid", "0.5:0.1:1.9", "--out", out_csv]) == 1
