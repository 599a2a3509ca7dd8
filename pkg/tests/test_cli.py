import csv
import io
import json

import numpy as np
import pytest

from bellmax import inequality as io_ineq
from bellmax import records
from bellmax.cli import main
from bellmax.inequality import bundled
from bellmax.measurements import Field, ScenarioShape, projective
from bellmax.optimizer import OptimizerConfig, finalize, workers_from_env
from helpers import random_state


@pytest.fixture
def corpus(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    for name in io_ineq.BUNDLED:
        (d / f"{name}.json").write_bytes((io_ineq.bundled_dir() / f"{name}.json").read_bytes())
    return d


def run(argv, capsys):
    status = main([str(a) for a in argv])
    return status, capsys.readouterr()


def test_optimize_chsh_real(tmp_path, capsys, corpus):
    out = tmp_path / "r.json"
    status, cap = run(["optimize", "--ineq", corpus / "chsh.json", "--field", "real", "--dim", 2,
                       "--restarts", 200, "--seed", 7, "--out", out], capsys)
    assert status == 0
    record = json.loads(out.read_text())
    assert record["violation"] == pytest.approx(0.207107, abs=1e-5)
    assert record["table"] == {"value": "0.207107", "violation": "0.207107", "star": True}
    assert "violation 0.207107 *" in cap.out
    assert run(["verify", "--record", out], capsys)[0] == 0


def test_optimize_i3322_complex(tmp_path, capsys, corpus):
    out = tmp_path / "r.json"
    status, _ = run(["optimize", "--ineq", corpus / "i3322.json", "--field", "complex", "--dim", 2,
                     "--restarts", 40, "--seed", 1, "--out", out], capsys)
    assert status == 0
    assert json.loads(out.read_text())["violation"] == pytest.approx(0.25, abs=1e-5)


def test_bundled_name_resolves(capsys):
    status, cap = run(["classical", "--ineq", "i3322"], capsys)
    assert status == 0
    assert "classical bound 0.000000" in cap.out


def test_unsupported_dimension(capsys, corpus):
    assert run(["optimize", "--ineq", corpus / "chsh.json", "--dim", 5], capsys)[0] == 3
    assert run(["optimize", "--ineq", corpus / "chsh.json", "--dim", 3, "--allow-degenerate"], capsys)[0] == 3


def test_usage_errors(capsys, corpus, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["optimize", "--ineq", str(corpus / "chsh.json"), "--field", "quaternion"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["optimize"])
    assert exc.value.code == 2
    assert run(["optimize", "--ineq", tmp_path / "missing.json"], capsys)[0] == 2
    assert run(["optimize", "--ineq", corpus / "chsh.json", "--restarts", 0], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**io_ineq.to_dict(bundled("chsh")), "classical_bound": 3.0}))
    assert run(["classical", "--ineq", bad], capsys)[0] == 2


def test_same_seed_same_report(tmp_path, capsys, corpus):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        run(["optimize", "--ineq", corpus / "i3322.json", "--restarts", 5, "--seed", 3, "--out", p], capsys)
    a, b = (records.numeric_fields(json.loads(p.read_text())) for p in paths)
    assert json.dumps(a) == json.dumps(b)


def test_sweep_bundled_corpus_csv(tmp_path, capsys, corpus):
    out = tmp_path / "table.csv"
    status, _ = run(["sweep", "--corpus", corpus, "--dims", "2", "--no-degenerate", "--restarts", 20,
                     "--format", "csv", "--out", out], capsys)
    assert status == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [r["name"] for r in rows] == ["CHSH", "I3322"]
    expected = {"CHSH": 0.207107, "I3322": 0.25}
    for r in rows:
        for col in ("real_qubit", "complex_qubit"):
            assert float(r[col].rstrip(" *")) == pytest.approx(expected[r["name"]], abs=1e-5)
        assert r["monotone"] == "ok" and r["status"] == "ok"


def test_sweep_json_and_failed_row(tmp_path, capsys, corpus):
    (corpus / "zz_broken.json").write_text("{not json")
    status, cap = run(["sweep", "--corpus", corpus, "--dims", "2", "--no-degenerate", "--restarts", 2,
                       "--format", "json"], capsys)
    assert status == 0
    doc = json.loads(cap.out)
    assert doc["columns"] == ["real_qubit", "complex_qubit"]
    assert [r["status"] for r in doc["rows"]] == ["ok", "ok", "failed"]


def test_sweep_empty_directory(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    status, cap = run(["sweep", "--corpus", empty, "--format", "csv"], capsys)
    assert status == 0
    assert cap.out.strip().splitlines() == [
        "name,type,classical_bound,real_qubit,complex_qubit,real_qubit_deg,complex_qubit_deg,"
        "real_qutrit,complex_qutrit,real_ququart,complex_ququart,monotone,status"
    ]


def test_sweep_rejects_bad_dims(tmp_path, capsys, corpus):
    assert run(["sweep", "--corpus", corpus, "--dims", "5"], capsys)[0] == 3


def test_embed_check_optimum(tmp_path, capsys, corpus):
    rec = tmp_path / "c.json"
    run(["optimize", "--ineq", corpus / "chsh.json", "--field", "complex", "--restarts", 20, "--out", rec], capsys)
    status, cap = run(["embed-check", "--record", rec], capsys)
    assert status == 0
    report = json.loads(cap.out)
    assert report["delta"] <= 1e-9
    assert report["target_dim"] == [4, 4]
    assert report["embedded_value"] == pytest.approx(0.207107, abs=1e-6)


def random_record(seed):
    rng = np.random.default_rng(seed)
    ineq = bundled("i3322")
    shape = ScenarioShape(Field.COMPLEX, 2, 2, (projective(1),) * 3, (projective(1),) * 3)
    result = finalize(ineq, shape, rng.uniform(0, 2 * np.pi, 6))
    result.state = random_state(rng, 4)
    return records.make_record(ineq, result, OptimizerConfig(restarts=1), False, 0.0)


def test_embed_check_random_point(tmp_path, capsys):
    for seed in range(5):
        path = tmp_path / f"r{seed}.json"
        records.write(random_record(seed), path)
        status, cap = run(["embed-check", "--record", path], capsys)
        assert status == 0
        assert json.loads(cap.out)["delta"] <= 1e-9


def test_embed_check_rejects_bad_state_norm(tmp_path, capsys):
    record = random_record(0)
    record["state"] = [[2 * re, 2 * im] for re, im in record["state"]]
    path = tmp_path / "bad.json"
    records.write(record, path)
    status, cap = run(["embed-check", "--record", path], capsys)
    assert status == 4
    assert "normalised" in cap.err


def test_embed_check_missing_params(tmp_path, capsys):
    record = random_record(1)
    del record["params"]
    path = tmp_path / "bad.json"
    records.write(record, path)
    assert run(["embed-check", "--record", path], capsys)[0] == 4


def test_verify_detects_tampering(tmp_path, capsys):
    record = random_record(2)
    record["value"] += 1e-6
    path = tmp_path / "t.json"
    records.write(record, path)
    assert run(["verify", "--record", path], capsys)[0] == 4


def test_record_reevaluates_to_stored_value():
    record = random_record(3)
    assert abs(records.reevaluate(record) - record["value"]) <= 1e-9


def test_workers_env(monkeypatch):
    monkeypatch.setenv("BELLMAX_THREADS", "1")
    assert workers_from_env(8) == 1
    monkeypatch.setenv("BELLMAX_THREADS", "3")
    assert workers_from_env(8) == 3
    monkeypatch.delenv("BELLMAX_THREADS")
    assert workers_from_env(8) == 8
