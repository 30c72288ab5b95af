import csv
import io
import json
import math

import pytest

from entlock.cli import main
from entlock.serialize import dump, state_to_dict
from entlock.states import omega_state


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_lemma1_json(capsys):
    code, out, _ = run(capsys, "verify", "lemma1", "--d", "3", "--samples", "50", "--seed", "7")
    assert code == 0
    rep = json.loads(out)
    assert rep["property"] == "lemma1" and rep["seed"] == 7 and rep["violations"] == 0
    assert rep["wallclock_ms"] is None


def test_verify_prop1_csv_breakdown(capsys):
    code, out, _ = run(capsys, "verify", "prop1", "--d", "2", "--env-dims", "1,2,4", "--samples", "10", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["group"] for r in rows] == ["", "env_dim=1", "env_dim=2", "env_dim=4"]
    assert "min_slack_bits" in rows[0]


def test_verify_all_quick(capsys):
    code, out, _ = run(capsys, "verify", "all", "--quick", "--samples", "5", "--restarts", "2")
    assert code == 0
    data = json.loads(out)
    assert len(data["reports"]) == 9 and data["passed"] is True


def test_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("ENTLOCK_SEED", "13")
    _, out, _ = run(capsys, "verify", "maassen-uffink", "--d", "2", "--samples", "5")
    assert json.loads(out)["seed"] == 13
    monkeypatch.setenv("ENTLOCK_SEED", "x")
    code, _, err = run(capsys, "verify", "maassen-uffink", "--samples", "5")
    assert code == 2 and "ENTLOCK_SEED" in err


def test_same_seed_same_bytes(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify", "prop3", "--d", "2", "--samples", "20", "--seed", "3", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_usage_errors(capsys):
    assert run(capsys, "verify", "nonsense")[0] == 2
    assert run(capsys, "verify", "lemma1", "--d", "zero")[0] == 2
    assert run(capsys, "verify", "lemma1", "--samples", "-1")[0] == 2
    assert run(capsys, "compute", "ep")[0] == 2
    assert run(capsys, "verify", "omega-corollary", "--d", "5")[0] == 2
    assert run(capsys, "table", "locking-gap", "--format", "json")[0] == 2
    assert run(capsys, "verify", "all", "--d", "2")[0] == 2


def test_violation_exit_code(capsys, monkeypatch):
    from entlock import harness

    real = harness.verify_maassen_uffink

    def broken(*args, **kwargs):
        rep = real(*args, **kwargs)
        rep.violations = 1
        return rep

    monkeypatch.setattr(harness, "verify_maassen_uffink", broken)
    assert run(capsys, "verify", "maassen-uffink", "--samples", "3")[0] == 1


def test_compute_esq_flower(capsys):
    code, out, _ = run(capsys, "compute", "esq-flower", "--d", "2", "--env-dim", "4", "--restarts", "16")
    assert code == 0
    data = json.loads(out)
    assert abs(data["value_bits"] - 1.5) < 1e-3
    assert abs(data["meta"]["measurement_bound_bits"] - 1.5) < 1e-3


def test_compute_iacc(capsys):
    _, out, _ = run(capsys, "compute", "iacc", "--conjugate-pair", "--d", "2", "--outcomes", "4")
    assert abs(json.loads(out)["value_bits"] - 0.5) < 2e-3
    _, out, _ = run(capsys, "compute", "iacc", "--d", "2", "--restarts", "4")
    assert abs(json.loads(out)["value_bits"] - 1) < 1e-6


def test_compute_ef_flower(capsys):
    _, out, _ = run(capsys, "compute", "ef-flower", "--d", "2", "--restarts", "8")
    assert abs(json.loads(out)["value_bits"] - 1.5) < 2e-3


def test_compute_from_state_file(capsys, tmp_path):
    path = tmp_path / "omega_d2.json"
    dump(state_to_dict(omega_state(2)), path)
    _, out, _ = run(capsys, "compute", "ep", "--state", str(path), "--aside", "0,1", "--ext-dim", "4")
    assert abs(json.loads(out)["value_bits"] - 1) < 5e-3
    _, out, _ = run(capsys, "compute", "entropy", "--state", str(path), "--aside", "2")
    assert abs(json.loads(out)["value_bits"] - 1) < 1e-12
    _, out, _ = run(capsys, "compute", "cmi", "--state", str(path), "--aside", "1", "--bside", "2")
    assert abs(json.loads(out)["value_bits"]) < 1e-12
    _, out, _ = run(capsys, "compute", "cmi", "--state", str(path), "--aside", "1", "--bside", "2", "--cond", "0")
    assert json.loads(out)["quantity"] == "conditional_mutual_information"
    assert run(capsys, "compute", "entropy", "--state", str(path), "--aside", "7")[0] == 2


def test_malformed_state_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dims": [2], "re": [1, 0]}))
    code, _, err = run(capsys, "compute", "entropy", "--state", str(path))
    assert code == 2 and "'im'" in err
    code, _, err = run(capsys, "compute", "entropy", "--state", str(tmp_path / "missing.json"))
    assert code == 2


def test_table_locking_gap(capsys):
    code, out, _ = run(capsys, "table", "locking-gap", "--dims", "2,4,8")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(k.endswith("_bits") for k in rows[0] if k != "d")
    for row in rows:
        d = int(row["d"])
        assert abs(float(row["gap_bits"]) - (1 + 0.5 * math.log2(d))) < 1e-9
        assert abs(float(row["E_sq_after_qubit_loss_bits"])) < 1e-9


def test_table_slack_histogram(capsys):
    code, out, _ = run(capsys, "table", "slack-histogram", "--d", "2", "--samples", "200", "--bins", "10")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 11 and lines[0] == "bin_lo_bits,bin_hi_bits,count"
    assert sum(int(l.split(",")[2]) for l in lines[1:]) == 200
    code, out, _ = run(capsys, "table", "slack-histogram", "--d", "2", "--samples", "0")
    assert code == 0 and out == "bin_lo_bits,bin_hi_bits,count\n"
