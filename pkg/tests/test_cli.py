import json
from pathlib import Path

import pytest

from frobase import io
from frobase.cli import main

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip().startswith("{") else out), err


def test_verify_covering_passes(capsys):
    code, rep, _ = run(capsys, "verify", DATA / "covering_structure.json")
    assert code == 0 and rep["verdict"] == "pass"
    assert set(rep) >= {"command", "version", "inputs_digest", "seed", "tolerance", "checks", "verdict"}
    assert rep["tolerance"] == 1e-9


def test_verify_perturbed_names_associativity(capsys):
    code, rep, _ = run(capsys, "verify", DATA / "perturbed.json")
    assert code == 1 and "associativity" in rep["checks"]["failing"]
    assert rep["checks"]["laws"]["associativity"]["residual"] >= 1e-4


def test_verify_all_laws_on_covering_fails_special(capsys):
    code, rep, _ = run(capsys, "verify", DATA / "covering_structure.json", "--laws", "all")
    assert code == 1 and rep["checks"]["failing"] == ["special"]


def test_input_errors_exit_2(capsys, tmp_path, monkeypatch):
    bad = tmp_path / "bad.json"
    bad.write_text('{"base": {"points": ["t"]}, "dims": ')
    code, _, err = run(capsys, "verify", bad)
    assert code == 2 and "invalid JSON" in err
    code, _, err = run(capsys, "verify", tmp_path / "absent.json")
    assert code == 2
    bad.write_text('{"base": {"points": ["t"]}, "dims": {"t": 1}, "mult": {"t": [[1]]}, "unit": {"t": [1]}}')
    code, _, err = run(capsys, "verify", bad)
    assert code == 2 and "$.mult.t" in err
    code, _, err = run(capsys, "verify", DATA / "m2.json", "--laws", "bogus")
    assert code == 2
    monkeypatch.setenv("FROBASE_TOL", "lots")
    code, _, err = run(capsys, "verify", DATA / "m2.json")
    assert code == 2 and "FROBASE_TOL" in err


def test_env_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("FROBASE_TOL", "1e-6")
    _, rep, _ = run(capsys, "verify", DATA / "m2.json")
    assert rep["tolerance"] == 1e-6
    _, rep, _ = run(capsys, "verify", DATA / "m2.json", "--tol", "1e-3")
    assert rep["tolerance"] == 1e-3


def test_classify(capsys):
    code, rep, _ = run(capsys, "classify", DATA / "trivial_1_2.json")
    assert code == 0 and rep["checks"]["fibers"] == {"a": [1, 2], "b": [1, 2]}
    _, rep, _ = run(capsys, "classify", DATA / "blocks_conjugated.json")
    assert rep["checks"]["fibers"] == {"a": [2, 3], "b": [1, 1, 2]}


def test_spectrum_from_covering_round_trip(capsys, tmp_path):
    code, rep, _ = run(capsys, "spectrum", DATA / "covering_structure.json")
    assert code == 0 and rep["checks"]["isomorphism_residual"] < 1e-9
    report = tmp_path / "spectrum.json"
    report.write_text(json.dumps(rep))
    code, rep2, _ = run(capsys, "from-covering", report)
    assert code == 0
    F = io.frobenius_from_json(rep2["data"]["structure"])
    assert F.carrier.dims == (2, 3)
    code, _, _ = run(capsys, "spectrum", DATA / "m2.json")
    assert code == 1


def test_rebase(capsys):
    code, rep, _ = run(capsys, "rebase", DATA / "blocks_conjugated.json")
    assert code == 0 and rep["checks"]["rebased"]["central"]
    assert rep["checks"]["rebased"]["round_trip_residual"] < 1e-9
    assert rep["checks"]["transitivity"]["agree"]
    code, rep, _ = run(capsys, "rebase", DATA / "perturbed.json")
    assert code == 1


def test_cp_check(capsys):
    code, rep, _ = run(capsys, "cp-check", DATA / "m2.json", DATA / "m2.json", DATA / "transpose.json")
    assert code == 1 and rep["checks"]["choi"]["spectra"]["t"] == [-1.0, 1.0, 1.0, 1.0]
    assert rep["checks"]["routes_agree"]
    code, rep, _ = run(capsys, "cp-check", DATA / "m2.json", DATA / "m2.json", DATA / "conjugation_channel.json")
    assert code == 0 and rep["checks"]["witness"]["found"]


def test_coherence(capsys):
    code, rep, _ = run(capsys, "coherence", DATA / "cells.json")
    assert code == 0
    code, rep, _ = run(capsys, "coherence", "--seed", "5")
    assert code == 0 and rep["seed"] == 5


def test_markdown_output(capsys):
    code, out, _ = run(capsys, "classify", DATA / "trivial_1_2.json", "--format", "md")
    assert code == 0 and isinstance(out, str) and "|" in out and "verdict" in out


def test_reports_are_deterministic(capsys):
    argv = ("rebase", DATA / "blocks_conjugated.json", "--seed", "3")
    main([str(a) for a in argv])
    first = capsys.readouterr().out
    main([str(a) for a in argv])
    assert capsys.readouterr().out == first


def test_timing_goes_to_stderr(capsys):
    code, rep, err = run(capsys, "verify", DATA / "m2.json", "--timing")
    assert code == 0 and "elapsed" in err and isinstance(rep, dict)


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0 and capsys.readouterr().out.strip() == "0.1.0"
