import json
import math

import pytest

from skewflow.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_certify_stated_nued(capsys):
    code, out, _ = run(capsys, "certify", "--gallery", "ex_nued", "--check", "dichotomy", "--no-timestamp")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "pass" and doc["kind"] == "dichotomy"


def test_certify_failure_exit(capsys):
    code, out, _ = run(capsys, "certify", "--gallery", "ex_nued", "--check", "dichotomy", "--N", "1",
                       "--no-timestamp")
    assert code == 1 and json.loads(out)["verdict"] == "fail"


def test_certify_deterministic(capsys):
    argv = ("certify", "--gallery", "ex_ses", "--check", "forward", "--no-timestamp", "--triples", "30")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_seed_env_and_flag_precedence(capsys, monkeypatch):
    argv = ["certify", "--gallery", "ex_ses", "--check", "axioms", "--no-timestamp", "--triples", "10"]
    monkeypatch.setenv("SKEWFLOW_SEED", "99")
    _, out, _ = run(capsys, *argv)
    assert json.loads(out)["grid"]["seed"] == 99
    _, out, _ = run(capsys, *argv, "--seed", "5")
    assert json.loads(out)["grid"]["seed"] == 5
    monkeypatch.setenv("SKEWFLOW_SEED", "x")
    assert run(capsys, *argv)[0] == 2


def test_csv_format(capsys):
    code, out, _ = run(capsys, "certify", "--gallery", "ex_nued", "--derived", "--check", "dichotomy",
                       "--format", "csv", "--triples", "20")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "kind,part,verdict,worst_violation,t,s,t0" and len(lines) == 3


def test_out_file(capsys, tmp_path):
    path = tmp_path / "cert.json"
    code, out, _ = run(capsys, "certify", "--gallery", "ex_nues1", "--check", "forward", "--out", str(path),
                       "--triples", "20")
    assert code == 0 and out == "" and json.loads(path.read_text())["verdict"] == "pass"


def test_file_source(capsys, tmp_path):
    code, out, _ = run(capsys, "gallery", "export", "ex_tri_anchored")
    src = tmp_path / "tri.skw"
    src.write_text(out)
    code, out, _ = run(capsys, "certify", "--file", str(src), "--triples", "30", "--no-timestamp")
    assert code == 0 and json.loads(out)["kind"] == "axioms"


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "certify", "--file", str(tmp_path / "missing.skw"), "--check", "axioms")[0] == 2
    assert run(capsys, "certify", "--gallery", "ex_nued", "--check", "sideways")[0] == 2
    assert run(capsys, "certify", "--gallery", "ex_ses", "--check", "dichotomy", "--N", "1")[0] == 2
    bad = tmp_path / "bad.skw"
    bad.write_text("dim 1\nphi[1][1] = exp(\n")
    code, _, err = run(capsys, "certify", "--file", str(bad), "--check", "axioms")
    assert code == 2 and err.startswith(f"{bad}:3:1: syntax error")  # newlines inside brackets are skipped
    with pytest.raises(SystemExit) as info:
        main(["certify", "--bogus"])
    assert info.value.code == 2


def test_evaluate(capsys):
    code, out, _ = run(capsys, "evaluate", "--gallery", "ex_nues1", "--t", str(1 + math.exp(-1)), "--s", "1",
                       "--v", "1")
    assert code == 0 and json.loads(out)["norm"] == pytest.approx(math.exp(2 - math.exp(-1)), rel=1e-9)
    code, out, _ = run(capsys, "evaluate", "--gallery", "ex_nued", "--t", "1", "--s", "0", "--v", "1,1",
                       "--adjoint")
    assert code == 0 and json.loads(out)["adjoint"] is True
    assert run(capsys, "evaluate", "--gallery", "ex_nued", "--t", "1", "--s", "0", "--v", "1")[0] == 2
    assert run(capsys, "evaluate", "--gallery", "ex_nued", "--t", "0", "--s", "1", "--v", "1,0")[0] == 2


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "--gallery", "ex_nued", "--k", "1", "--triples", "60")
    assert code == 0 and "nu_hat" in json.loads(out)["estimate"]
    code, out, _ = run(capsys, "estimate", "--gallery", "ex_ses", "--envelope", "0,1,2", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "n,t,s,value"


def test_probe(capsys):
    code, out, _ = run(capsys, "probe", "--gallery", "ex_nues1", "--n-max", "5")
    doc = json.loads(out)["probes"][0]
    assert code == 0 and doc["falsified"] and doc["verdict"] == "uniform bound falsified up to n=5"
    assert run(capsys, "probe", "--gallery", "ex_ses")[0] == 2
    assert run(capsys, "probe", "--gallery", "ex_nued", "--witness", "7")[0] == 2


def test_gallery_commands(capsys):
    code, out, _ = run(capsys, "gallery", "list")
    assert code == 0 and len(out.splitlines()) == 6
    code, out, _ = run(capsys, "gallery", "show", "ex_tri")
    assert code == 0 and json.loads(out)["flags"] == ["as_printed", "unordered_rates"]
    assert run(capsys, "gallery", "show")[0] == 2
