import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from ptbound import cli, example_ensemble, solve_pg, validate_ensemble
from ptbound.errors import SolverFailure

from randomized import random_ensemble


def _run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def bell2(tmp_path):
    path = tmp_path / "ens.json"
    cli.dump_json(cli.ensemble_to_json(example_ensemble(2, 1.0)), str(path))
    return path


def test_ensemble_round_trip_is_exact():
    e = random_ensemble(np.random.default_rng(1), 2, 3, 3)
    text = json.dumps(cli.ensemble_to_json(e))
    back = cli.ensemble_from_json(json.loads(text))
    assert back.priors == e.priors
    for a, b in zip(e.states, back.states):
        assert np.array_equal(a.matrix, b.matrix)
    assert json.dumps(cli.ensemble_to_json(back)) == text


def test_result_round_trip_is_exact():
    res = solve_pg(example_ensemble(2, 0.5))
    doc = json.loads(json.dumps(cli.result_to_json(res, "pg")))
    back = cli.result_from_json(doc)
    assert back["value"] == res.value and back["certified_gap"] == res.certified_gap
    assert np.array_equal(back["dual_K"], res.dual_K.matrix)
    for a, b in zip(back["povm"], res.povm.elements):
        assert np.array_equal(a, b.matrix)


def test_solve_pg_and_qg(capsys, bell2, tmp_path):
    out = tmp_path / "res.json"
    code, _, _ = _run(capsys, "solve", "--problem", "pg", "--input", bell2, "--output", out)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["problem"] == "pg" and doc["value"] == pytest.approx(1.0, abs=1e-6)
    assert len(doc["povm"]) == 4 and doc["dual_K"]["rows"] == 4

    code, text, _ = _run(capsys, "solve", "--problem", "qg", "--input", bell2)
    assert code == 0
    assert json.loads(text)["value"] == pytest.approx(0.5, abs=1e-6)


def test_malformed_json_writes_nothing(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d1": 2, "d2": ')
    out = tmp_path / "res.json"
    code, _, err = _run(capsys, "solve", "--problem", "pg", "--input", bad, "--output", out)
    assert code == 2 and not out.exists()
    assert err.count("\n") == 1


@pytest.mark.parametrize(
    "doc",
    [
        {"d1": 2, "d2": 2, "states": [{"prior": 1.0, "rho": {"rows": 2, "cols": 2, "data": [[1, 0]]}}]},
        {"d1": 2, "d2": 2, "states": [{"prior": 0.5, "rho": cli.matrix_to_json(np.eye(4) / 4)}]},
        {"d1": "2", "d2": 2, "states": []},
        {"d2": 2, "states": []},
    ],
)
def test_invalid_documents_exit_2(capsys, tmp_path, doc):
    path = tmp_path / "e.json"
    path.write_text(json.dumps(doc))
    assert _run(capsys, "solve", "--problem", "pg", "--input", path)[0] == 2


def test_nan_is_rejected(capsys, tmp_path):
    path = tmp_path / "e.json"
    path.write_text('{"d1": 1, "d2": 1, "states": [{"prior": NaN, "rho": {"rows":1,"cols":1,"data":[[1,0]]}}]}')
    assert _run(capsys, "bounds", "--input", path)[0] == 2


def test_certify_exit_codes(capsys, bell2, tmp_path):
    local = tmp_path / "local.json"
    assert _run(capsys, "example", "--d", 2, "--emit", "local-povm", "--output", local)[0] == 0
    code, text, _ = _run(capsys, "certify", "--problem", "qg", "--ensemble", bell2, "--povm", local)
    assert code == 0 and json.loads(text)["passed"] is True
    code, text, _ = _run(capsys, "certify", "--problem", "pg", "--ensemble", bell2, "--povm", local)
    assert code == 1 and json.loads(text)["passed"] is False

    short = tmp_path / "short.json"
    short.write_text(json.dumps([cli.matrix_to_json(np.eye(4))]))
    assert _run(capsys, "certify", "--problem", "pg", "--ensemble", bell2, "--povm", short)[0] == 2


def test_certify_accepts_a_result_file(capsys, bell2, tmp_path):
    res = tmp_path / "res.json"
    _run(capsys, "solve", "--problem", "pg", "--input", bell2, "--output", res)
    assert _run(capsys, "certify", "--problem", "pg", "--ensemble", bell2, "--povm", res)[0] == 0


def test_example_outputs(capsys):
    code, text, _ = _run(capsys, "example", "--d", 2, "--lambda", 1, "--emit", "closed-forms")
    doc = json.loads(text)
    assert code == 0
    assert (doc["p_G"], doc["q_G"], doc["gap"]) == (1.0, 0.5, 0.5)

    code, text, _ = _run(capsys, "example", "--d", 3, "--lambda", 0.5, "--emit", "ensemble")
    doc = json.loads(text)
    assert len(doc["states"]) == 12
    assert all(s["prior"] == pytest.approx(1 / 12) for s in doc["states"])

    assert _run(capsys, "example", "--d", 1, "--lambda", 0.5, "--emit", "ensemble")[0] == 2
    assert _run(capsys, "example", "--d", 2, "--emit", "closed-forms")[0] == 2


def test_example_with_custom_sigma(capsys, tmp_path):
    sig = tmp_path / "sigma.json"
    sig.write_text(json.dumps(cli.matrix_to_json(np.diag([0.1, 0.2, 0.3, 0.4]))))
    code, text, _ = _run(capsys, "example", "--d", 2, "--lambda", 0.5, "--sigma", sig, "--emit", "ensemble")
    assert code == 0
    rho = cli.matrix_from_json(json.loads(text)["states"][0]["rho"])
    assert rho[1, 1].real == pytest.approx(0.1)


def test_bounds(capsys, bell2, tmp_path):
    code, text, _ = _run(capsys, "bounds", "--input", bell2)
    doc = json.loads(text)
    assert code == 0
    assert doc["p_G"] == pytest.approx(1.0, abs=1e-6)
    assert doc["q_G"] == pytest.approx(0.5, abs=1e-6)
    assert doc["p_PPT"] == pytest.approx(0.5, abs=1e-6)
    assert doc["ordering_ok"] is True and doc["nlwe_flag"] is False

    single = tmp_path / "one.json"
    cli.dump_json(cli.ensemble_to_json(validate_ensemble([1.0], [np.eye(4) / 4], 2, 2)), str(single))
    doc = json.loads(_run(capsys, "bounds", "--input", single)[1])
    assert [doc[k] for k in ("p_G", "q_G", "p_PPT")] == pytest.approx([1, 1, 1], abs=1e-6)

    diag = tmp_path / "diag.json"
    e = validate_ensemble([0.5, 0.5], [np.diag([1.0, 0, 0, 0]), np.diag([0, 0.5, 0.5, 0])], 2, 2, True)
    cli.dump_json(cli.ensemble_to_json(e), str(diag))
    assert json.loads(_run(capsys, "bounds", "--input", diag)[1])["nlwe_flag"] is False


def test_solver_failure_exit_3(capsys, bell2, monkeypatch):
    def boom(e, cfg):
        raise SolverFailure("did not converge", residual=1.0, trace_log=[])

    monkeypatch.setitem(cli.SOLVERS, "pg", boom)
    code, out, err = _run(capsys, "solve", "--problem", "pg", "--input", bell2)
    assert code == 3 and out == "" and "did not converge" in err


def test_inconsistent_ordering_exit_4(capsys, bell2, monkeypatch):
    from ptbound.solver import BoundsReport

    monkeypatch.setattr(cli, "bounds_report", lambda e, cfg: BoundsReport(0.5, 0.9, 0.7, False, False))
    assert _run(capsys, "bounds", "--input", bell2)[0] == 4


def test_usage_errors(capsys, bell2):
    assert _run(capsys, "solve", "--problem", "xx", "--input", bell2)[0] == 2
    assert _run(capsys)[0] == 2
    assert _run(capsys, "solve", "--problem", "pg", "--input", bell2, "--tol", -1)[0] == 2
    assert _run(capsys, "bounds", "--input", "/nonexistent/file.json")[0] == 2


def test_console_script(tmp_path):
    exe = shutil.which("ptbound")
    cmd = [exe] if exe else [sys.executable, "-m", "ptbound.cli"]
    out = subprocess.run(
        cmd + ["example", "--d", "2", "--lambda", "0.5", "--emit", "closed-forms"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["gap"] == pytest.approx(0.25)
