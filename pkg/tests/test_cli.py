import json

import yaml

from s3sim import fixtures
from s3sim.cli import main, sha256_file
from s3sim.metrics import EvalSet, MetricsSeries
from s3sim.network import Post, UserRecord, write_dataset


def _dataset(tmp_path, records, name="data.jsonl"):
    p = tmp_path / name
    write_dataset(records, p)
    return p


def _ingest(tmp_path, records, keywords="", out="ing"):
    data = _dataset(tmp_path, records)
    args = ["ingest", str(data), "--out", str(tmp_path / out)]
    if keywords:
        args += ["--keywords", keywords]
    assert main(args) == 0
    return tmp_path / out


def _line_config(tmp_path, **extra):
    cfg = {
        "seed": 1,
        "backend": {"kind": "rule", "rule": {"forward_probability": 1.0}},
        "event": {"event_id": "e", "description": "news", "max_steps": 2,
                  "seed_posts": [{"user_id": "u0000", "text": "breaking"}]},
        **extra,
    }
    p = tmp_path / "run.yaml"
    p.write_text(yaml.safe_dump(cfg), encoding="utf-8")
    return p


def test_ingest_happy_path(tmp_path):
    recs = [
        UserRecord("alice", posts=(Post(0, "Solar energy now"),)),
        UserRecord("bob", followees=("alice", "ghost")),
        UserRecord("carol"),
    ]
    out = _ingest(tmp_path, recs, keywords="solar")
    assert (out / "edges.tsv").read_text() == "alice\tbob\n"
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["dropped_edges"][0]["reason"] == "followee not in user set"
    users = [json.loads(l)["user_id"] for l in (out / "users.jsonl").read_text().splitlines()]
    assert users == ["alice", "bob"]


def test_ingest_missing_file(tmp_path, capsys):
    missing = tmp_path / "absent.jsonl"
    assert main(["ingest", str(missing), "--out", str(tmp_path / "o")]) == 2
    assert str(missing) in capsys.readouterr().err


def test_ingest_duplicate_is_fatal(tmp_path):
    p = tmp_path / "d.jsonl"
    p.write_text('{"user_id": "a"}\n{"user_id": "a"}\n')
    assert main(["ingest", str(p), "--out", str(tmp_path / "o")]) == 2


def test_ingest_rerun_byte_identical(tmp_path):
    recs, _ = fixtures.erdos_renyi(40, 4, 2)
    a = _ingest(tmp_path, recs, out="a")
    b = _ingest(tmp_path, recs, out="b")
    for name in ("users.jsonl", "edges.tsv", "diagnostics.json"):
        assert sha256_file(a / name) == sha256_file(b / name)


def test_demographics_rows(tmp_path):
    recs = [UserRecord(f"u{i}", "mother and teacher" if i % 2 else "",
                       (Post(0, f"post {i}"),) if i < 8 else ()) for i in range(10)]
    ing = _ingest(tmp_path, recs)
    assert main(["demographics", "--graph", str(ing), "--out", str(tmp_path / "d1.jsonl")]) == 0
    assert main(["demographics", "--graph", str(ing), "--out", str(tmp_path / "d2.jsonl")]) == 0
    rows = [json.loads(l) for l in (tmp_path / "d1.jsonl").read_text().splitlines()]
    assert len(rows) == 10
    assert (tmp_path / "d1.jsonl").read_bytes() == (tmp_path / "d2.jsonl").read_bytes()
    by = {r["user_id"]: r for r in rows}
    assert by["u0"]["gender"] == "Unknown"
    assert by["u1"]["gender"] == "Female" and by["u1"]["occupation"] == "Education Practitioner"
    assert by["u9"]["age"] is None
    assert set(rows[0]) == {"user_id", "age", "gender", "occupation", "confidence"}


def test_demographics_empty_graph(tmp_path):
    ing = _ingest(tmp_path, [])
    out = tmp_path / "d.jsonl"
    assert main(["demographics", "--graph", str(ing), "--out", str(out)]) == 0
    assert out.read_text() == ""


def test_demographics_unreachable_backend_is_partial(tmp_path):
    ing = _ingest(tmp_path, [UserRecord("a", "a father"), UserRecord("b")])
    cfg = tmp_path / "http.yaml"
    cfg.write_text(yaml.safe_dump({"backend": {"kind": "http", "http": {
        "url": "http://127.0.0.1:9/v1/chat/completions", "retries": 0, "backoff": 0.0, "timeout": 2.0}}}))
    out = tmp_path / "d.jsonl"
    assert main(["demographics", "--graph", str(ing), "--out", str(out), "--config", str(cfg)]) == 1
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert [r["user_id"] for r in rows] == ["b"]


def test_demographics_missing_dir(tmp_path):
    assert main(["demographics", "--graph", str(tmp_path / "nope"), "--out", str(tmp_path / "d")]) == 2


def _simulate(tmp_path, ing, out, *extra):
    args = ["simulate", "--graph", str(ing), "--out", str(tmp_path / out),
            "--config", str(_line_config(tmp_path)), *extra]
    return main(args)


def test_simulate_line(tmp_path):
    recs, _ = fixtures.line(3)
    ing = _ingest(tmp_path, recs)
    assert _simulate(tmp_path, ing, "run") == 0
    series = MetricsSeries.from_csv((tmp_path / "run" / "metrics.csv").read_text())
    assert series.column("aware") == [1, 2, 3]
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert set(manifest) >= {"config_hash", "dataset_hash", "seed", "backend", "artifacts", "duration_s"}
    for name, art in manifest["artifacts"].items():
        assert sha256_file(tmp_path / "run" / art["path"]) == art["sha256"]


def test_simulate_repeat_identical(tmp_path):
    recs, _ = fixtures.erdos_renyi(60, 4, 1)
    ing = _ingest(tmp_path, recs)
    assert _simulate(tmp_path, ing, "a", "--max-steps", "8") == 0
    assert _simulate(tmp_path, ing, "b", "--max-steps", "8", "--workers", "4") == 0
    ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
    mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
    for name in ("metrics.csv", "events.jsonl"):
        assert ma["artifacts"][name]["sha256"] == mb["artifacts"][name]["sha256"]
    # --workers is recorded in the frozen config, so config hashes differ
    assert ma["dataset_hash"] == mb["dataset_hash"]


def test_simulate_max_steps_zero(tmp_path):
    recs, _ = fixtures.line(3)
    ing = _ingest(tmp_path, recs)
    assert _simulate(tmp_path, ing, "z", "--max-steps", "0") == 0
    lines = (tmp_path / "z" / "metrics.csv").read_text().splitlines()
    assert len(lines) == 2  # header plus the step-0 row


def test_simulate_unknown_seed_author(tmp_path):
    ing = _ingest(tmp_path, [UserRecord("x")])
    assert _simulate(tmp_path, ing, "r") == 2


def test_simulate_with_demographics(tmp_path):
    recs, _ = fixtures.line(3)
    ing = _ingest(tmp_path, recs)
    demo = tmp_path / "demo.jsonl"
    assert main(["demographics", "--graph", str(ing), "--out", str(demo)]) == 0
    assert _simulate(tmp_path, ing, "r", "--demographics", str(demo)) == 0
    assert _simulate(tmp_path, ing, "r2", "--demographics", str(tmp_path / "none.jsonl")) == 2


def test_eval_event_log(tmp_path, capsys):
    recs, _ = fixtures.erdos_renyi(80, 5, 3)
    ing = _ingest(tmp_path, recs)
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump({"seed": 2, "event": {"event_id": "e", "description": "news", "max_steps": 10,
                                                        "seed_posts": [{"user_id": "u0000", "text": "news"}]}}))
    assert main(["simulate", "--graph", str(ing), "--out", str(tmp_path / "r"), "--config", str(cfg)]) == 0
    out = tmp_path / "rep.json"
    rc = main(["eval", "--input", str(tmp_path / "r" / "events.jsonl"), "--negative-ratio", "4",
               "--seed", "1", "--out", str(out)])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert {"accuracy", "auc", "f1", "precision"} <= set(rep)


def test_eval_csv_tasks(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text(EvalSet("gender", [1, 1, 0, 0], [1, 1, 0, 0], [0.9, 0.4, 0.5, 0.1]).to_csv())
    out = tmp_path / "r.json"
    assert main(["eval", "--input", str(p), "--task", "gender", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["accuracy"] == 1.0 and rep["auc"] == 0.75
    a = tmp_path / "a.csv"
    a.write_text(EvalSet("age", [30.0, 20.0], [20.0, 30.0]).to_csv())
    assert main(["eval", "--input", str(a), "--task", "age", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["mse"] == 100.0


def test_eval_bad_input(tmp_path):
    assert main(["eval", "--input", str(tmp_path / "x.csv")]) == 2
    p = tmp_path / "bad.csv"
    p.write_text("nope\n")
    assert main(["eval", "--input", str(p)]) == 2


def test_bad_config_is_fatal(tmp_path):
    recs, _ = fixtures.line(3)
    ing = _ingest(tmp_path, recs)
    cfg = tmp_path / "bad.yaml"
    cfg.write_text(yaml.safe_dump({"sede": 1}))
    assert main(["simulate", "--graph", str(ing), "--out", str(tmp_path / "o"), "--config", str(cfg)]) == 2
