import json

import numpy as np
import pytest

from blockpos.cli import FORMAT_VERSION, main
from blockpos.tensor_lab import HermitianOperator
from blockpos.witness_search import witness_operator


@pytest.fixture
def op_file(tmp_path):
    def write(X, name="op.json"):
        path = tmp_path / name
        X.save(path)
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_certify_identity(op_file, capsys):
    code, out = run(capsys, "certify", op_file(HermitianOperator(2, np.eye(4))), "--k", "2", "--n-max", "1",
                    "--restarts", "4")
    report = json.loads(out.out)
    assert code == 0 and report["verdict"] == "certified"
    assert report["format"] == FORMAT_VERSION and report["config"]["seed"] == 0


def test_certify_refuted(op_file, capsys):
    code, out = run(capsys, "certify", op_file(witness_operator(1, 2)), "--k", "2", "--n-max", "1",
                    "--restarts", "8")
    report = json.loads(out.out)
    assert code == 1 and report["witness"]["violation"] <= -0.5 + 1e-6


def test_certify_inconclusive_text(op_file, capsys):
    code, out = run(capsys, "certify", op_file(witness_operator(1, 2)), "--k", "1", "--n-max", "2",
                    "--restarts", "4", "--format", "text")
    assert code == 2 and out.out.startswith("verdict: inconclusive")


def test_reports_are_reproducible(op_file, capsys, tmp_path):
    path = op_file(witness_operator(1, 3))
    args = ["search", path, "--k", "2", "--restarts", "4", "--seed", "3"]
    _, a = run(capsys, *args)
    _, b = run(capsys, *args)
    assert a.out == b.out
    _, c = run(capsys, *args, "--threads", "2")
    ra, rc = json.loads(a.out), json.loads(c.out)
    ra.pop("config"), rc.pop("config")
    assert ra == rc


def test_search_writes_out_file(op_file, capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out = run(capsys, "search", op_file(witness_operator(1, 2)), "--k", "2", "--restarts", "4",
                    "--out", str(target))
    assert code == 0 and out.out == ""
    report = json.loads(target.read_text())
    assert report["V"]["value"] == pytest.approx(-0.5, abs=1e-8)


def test_complexity_formats(capsys):
    code, out = run(capsys, "complexity", "--d", "3", "--k", "2", "--n", "1:3", "--format", "csv")
    assert code == 0
    assert out.out.splitlines()[0] == "d,k,n,C,C_unreduced,collapse"
    code, out = run(capsys, "complexity", "--d", "3", "--k", "3", "--n", "4")
    assert json.loads(out.out)["rows"][0]["C"] == 9


def test_verify_suite(capsys):
    code, out = run(capsys, "verify", "branching", "--format", "text")
    assert code == 0 and "[PASS]" in out.out and "[FAIL]" not in out.out


def test_verify_json_report(capsys):
    code, out = run(capsys, "verify", "projectors")
    report = json.loads(out.out)
    assert code == 0 and report["passed"]
    assert all(isinstance(c["passed"], bool) for c in report["suites"]["projectors"])


def test_witness_command(capsys):
    code, out = run(capsys, "witness", "--k", "1", "--d", "2")
    X = HermitianOperator.from_json(json.loads(out.out))
    np.testing.assert_allclose(X.matrix, witness_operator(1, 2).matrix)


def test_malformed_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 2, "re": [[1, 2], [3, 4]]}')
    assert main(["certify", str(bad), "--k", "1"]) == 64
    assert main(["certify", str(tmp_path / "missing.json"), "--k", "1"]) == 64
    with pytest.raises(SystemExit) as exc:
        main(["complexity", "--d", "2", "--k", "1", "--n", "3:1"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64
    assert main(["complexity", "--d", "2", "--k", "3"]) == 64
    assert main(["verify", "schur", "--tol-cert", "-1"]) == 64


def test_resource_cap(op_file, capsys, monkeypatch):
    monkeypatch.setenv("BLOCKPOS_CAP", "8")
    path = op_file(HermitianOperator(2, np.eye(4)))
    assert main(["search", path, "--k", "2", "--restarts", "1"]) == 0
    code = main(["verify", "dualization"])
    assert code == 65
