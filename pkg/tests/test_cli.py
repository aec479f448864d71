import json
import subprocess
import sys
from fractions import Fraction

import pytest

from cuspforge import cli
from cuspforge.dessin import dump, from_fermat
from cuspforge.homology import manin_presentation


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def test_analyze_fermat(capsys):
    code, rep = run_cli(capsys, "analyze", "--N", "3")
    assert code == 0
    assert rep["n"] == 9 and rep["genus"] == 1
    assert rep["cusps"] == {"zero": 3, "one": 3, "infinity": 3}
    assert all(c["width"] == 3 for kind in rep["cusp_list"].values() for c in kind)


def test_analyze_trivial(capsys):
    code, rep = run_cli(capsys, "analyze", "--trivial")
    assert code == 0 and rep["genus"] == 0 and rep["n"] == 1


def test_analyze_from_file(capsys, tmp_path):
    path = tmp_path / "f5.json"
    dump(from_fermat(5), path)
    code, rep = run_cli(capsys, "analyze", "--dessin", str(path))
    assert code == 0 and rep["genus"] == 6


def test_invalid_dessin_exit_code(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 3, "piA": [0, 0, 1], "piB": [0, 1, 2]}))
    code, rep = run_cli(capsys, "analyze", "--dessin", str(path))
    assert code == 2
    assert rep["violations"] and rep["exit_code"] == 2


def test_not_json_is_invalid_dessin(capsys, tmp_path):
    path = tmp_path / "garbage.json"
    path.write_text("{n: 3")
    code, rep = run_cli(capsys, "analyze", "--dessin", str(path))
    assert code == 2


def test_missing_file_exit_code(capsys, tmp_path):
    code, rep = run_cli(capsys, "analyze", "--dessin", str(tmp_path / "absent.json"))
    assert code == 3


def test_conflicting_inputs(capsys):
    code = cli.main(["analyze", "--N", "3", "--trivial"])
    assert code == 1


@pytest.mark.parametrize("jac", ["full", "plus", "minus"])
def test_cuspidal_pass(capsys, jac):
    code, rep = run_cli(capsys, "cuspidal", "--N", "5", "--jacobian", jac)
    assert code == 0 and rep["status"] == "PASS"
    assert rep["structure"]["invariant_factors"] == rep["predicted"]["invariant_factors"]


def test_cuspidal_mismatch_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "predicted_structure", lambda n, jac: (n, n, n))
    code, rep = run_cli(capsys, "cuspidal", "--N", "3")
    assert code == 4 and rep["status"] == "FAIL"


def test_cuspidal_needs_level(capsys):
    code, rep = run_cli(capsys, "cuspidal")
    assert code == 1 and "error" in rep


def test_eisenstein_calibrated(capsys):
    code, rep = run_cli(capsys, "eisenstein", "--N", "3", "--divisor", "a0 - c1")
    assert code == 0
    assert rep["boundary_check"] == "-D"
    assert rep["side"] == "plus" and rep["imag_norm"] == 0
    assert rep["torsion"]["is_torsion"] and rep["torsion"]["order"] == 9
    assert {k: -int(v) for k, v in rep["divisor"].items()} == {k: int(v) for k, v in rep["boundary"].items()}


def test_eisenstein_paper_literal_reports_failure(capsys):
    code, rep = run_cli(capsys, "eisenstein", "--N", "3", "--divisor", "a0 - c0", "--mode", "paper_literal")
    assert code == 0
    assert rep["boundary_check"] != "-D"
    assert rep["notes"]


def test_eisenstein_paper_literal_needs_basis_pair(capsys):
    code, rep = run_cli(capsys, "eisenstein", "--N", "3", "--divisor", "a0 - a1", "--mode", "paper_literal")
    assert code == 1


def test_eisenstein_bad_divisor(capsys):
    code, rep = run_cli(capsys, "eisenstein", "--N", "3", "--divisor", "q7 - a0")
    assert code == 1 and "bad divisor" in rep["error"]


def test_manin(capsys):
    code, rep = run_cli(capsys, "manin", "--N", "3")
    assert code == 0 and rep["rank"] == rep["expected_rank"] == 10


def test_md_check_divisor(capsys):
    code, rep = run_cli(capsys, "md-check", "--N", "3", "--divisor", "a0 - a1")
    assert code == 0 and rep["status"] == "PASS"


def test_md_check_values_file(capsys, tmp_path):
    p = manin_presentation(from_fermat(3))
    exact = [str(Fraction(i % 5 - 2, 3)) for i in range(p.size)]
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"values": exact}))
    code, rep = run_cli(capsys, "md-check", "--N", "3", "--values", str(good))
    assert code == 0 and rep["results"][0]["verdict"]["is_torsion"] is True
    # an irrational amount along a coordinate the relations do not fix
    free = next(i for i in range(p.size) if i not in p._reduced[1])
    vals = [float(Fraction(v)) for v in exact]
    vals[free] += 0.30102999566
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"values": vals}))
    code, rep = run_cli(capsys, "md-check", "--N", "3", "--values", str(bad))
    assert code == 1 and rep["status"] == "FAIL"
    short = tmp_path / "short.json"
    short.write_text(json.dumps({"values": exact[:-1]}))
    assert cli.main(["md-check", "--N", "3", "--values", str(short)]) == 1


def test_numeric_phi_empty(capsys):
    code, rep = run_cli(capsys, "numeric", "--trivial", "--estimator", "phi", "--cmax", "0", "--r", "0", "--s", "2")
    assert code == 0
    assert rep["result"]["value"] in ("0.0", "(0.0 + 0.0j)", ["0.0", "0.0"])


def test_numeric_sD_sweep(capsys):
    code, rep = run_cli(
        capsys, "numeric", "--trivial", "--estimator", "sD-sweep", "--divisor", "inf:0 - zero:0", "--x", "1/3",
        "--cmax", "30", "--rmax", "40",
    )
    assert code == 0
    assert [r["eps"] for r in rep["rows"]] == [1e-2, 1e-3, 1e-4]
    assert all("error_estimate" in r["result"] for r in rep["rows"])


def test_numeric_sD_rejects_support(capsys):
    code, rep = run_cli(capsys, "numeric", "--trivial", "--estimator", "sD", "--divisor", "inf:0 - zero:0", "--x", "2/3")
    assert code == 1


def test_every_report_carries_conventions(capsys):
    for argv in (["analyze", "--N", "3"], ["manin", "--trivial"], ["cuspidal", "--N", "3"]):
        code, rep = run_cli(capsys, *argv)
        assert rep["conventions"]["boundary"].endswith("-D")
        assert rep["command"] == argv[0] and rep["exit_code"] == code


def test_output_file_and_determinism(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert cli.main(["fermat-report", "--N", "5", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert all(rep["geometry"]["checks"].values())


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cuspforge", "analyze", "--N", "3"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["genus"] == 1
