"""Command line entry point.

Exit codes: 0 success, 1 partial or degraded output, 2 fatal input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

from .agent import Demographics, Gender, Occupation
from .cognition import BackendError
from .config import RunConfig, load_config, override
from .engine import build_world, inject_event, run
from .metrics import EvalSet, build_interaction_eval_set, evaluate
from .network import (
    DatasetError,
    build_graph,
    extract_event_subgraph,
    load_dataset,
    read_edge_list,
    write_dataset,
)

log = logging.getLogger("s3sim")

EXIT_OK, EXIT_PARTIAL, EXIT_FATAL = 0, 1, 2


class FatalInput(Exception):
    pass


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _config(args) -> RunConfig:
    try:
        cfg = load_config(getattr(args, "config", None))
    except (OSError, ValueError, TypeError) as exc:
        raise FatalInput(f"bad config {args.config}: {exc}") from exc
    return override(cfg, seed=getattr(args, "seed", None), backend=getattr(args, "backend", None),
                    max_steps=getattr(args, "max_steps", None), workers=getattr(args, "workers", None))


def _load_ingested(graph_dir: Path):
    users = graph_dir / "users.jsonl"
    edges = graph_dir / "edges.tsv"
    for p in (users, edges):
        if not p.exists():
            raise FatalInput(f"missing ingested file {p}")
    records, _ = load_dataset(users)
    graph = read_edge_list(edges, [r.user_id for r in records])
    return records, graph


def cmd_ingest(args) -> int:
    path = Path(args.dataset)
    if not path.exists():
        raise FatalInput(f"dataset not found: {path}")
    try:
        records, diag = load_dataset(path)
    except DatasetError as exc:
        raise FatalInput(str(exc)) from exc
    keywords = [k.strip() for k in args.keywords.split(",") if k.strip()] if args.keywords else []
    subset = extract_event_subgraph(records, keywords) if keywords else sorted(records, key=lambda r: r.user_id)
    graph = build_graph(subset, diag)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_dataset(subset, out / "users.jsonl")
    (out / "edges.tsv").write_text(graph.to_edge_list(), encoding="utf-8")
    (out / "diagnostics.json").write_text(json.dumps(diag.to_json(), indent=2, sort_keys=True) + "\n",
                                          encoding="utf-8")
    print(f"{len(subset)} users, {len(graph.edges())} edges, {len(diag.skipped_lines)} skipped lines -> {out}")
    return EXIT_OK


def cmd_demographics(args) -> int:
    cfg = _config(args)
    records, _ = _load_ingested(Path(args.graph))
    backend = cfg.make_backend()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    failed = 0
    with open(out, "w", encoding="utf-8") as fh:
        for rec in sorted(records, key=lambda r: r.user_id):
            posts = [p.text for p in rec.posts]
            try:
                gender, conf = backend.predict_gender(rec.description)
                age = backend.predict_age(posts) if posts else None
                occ = backend.predict_occupation(rec.description, posts)
            except BackendError as exc:
                log.error("demographics failed for %s: %s", rec.user_id, exc)
                failed += 1
                continue
            row = {"user_id": rec.user_id, "age": age, "gender": gender.value,
                   "occupation": occ.value, "confidence": conf}
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    if failed:
        print(f"{failed} users could not be characterised", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def read_demographics(path: Path) -> dict[str, Demographics]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        out[row["user_id"]] = Demographics(row.get("age"), Gender(row.get("gender", "Unknown")),
                                           Occupation(row.get("occupation", "Unknown")))
    return out


def cmd_simulate(args) -> int:
    cfg = _config(args)
    t0 = time.perf_counter()
    graph_dir = Path(args.graph)
    records, graph = _load_ingested(graph_dir)
    demo = {}
    if args.demographics:
        dpath = Path(args.demographics)
        if not dpath.exists():
            raise FatalInput(f"demographics file not found: {dpath}")
        demo = read_demographics(dpath)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log_path = out / "events.jsonl"
    with open(log_path, "w", encoding="utf-8") as sink:
        world = build_world(records, graph, cfg.make_backend(), cfg.event, cfg.engine_config(),
                            demo, cfg.categories, log_sink=sink)
        try:
            inject_event(world)
        except KeyError as exc:
            raise FatalInput(str(exc)) from exc
        series = run(world)
    series.write(out / "metrics.csv")
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    data_hash = hashlib.sha256()
    for p in (graph_dir / "users.jsonl", graph_dir / "edges.tsv", args.demographics):
        if p:
            data_hash.update(Path(p).read_bytes())
    artifacts = {name: {"path": name, "sha256": sha256_file(out / name)}
                 for name in ("metrics.csv", "events.jsonl", "config.json")}
    manifest = {
        "config_hash": cfg.digest(),
        "dataset_hash": data_hash.hexdigest(),
        "seed": cfg.seed,
        "backend": world.backend.identity(),
        "artifacts": artifacts,
        "steps": world.clock,
        "duration_s": round(time.perf_counter() - t0, 3),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{world.clock} steps, final aware {series.records[-1].aware} -> {out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    path = Path(args.input)
    if not path.exists():
        raise FatalInput(f"input not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix == ".jsonl":
            records = [json.loads(ln) for ln in text.splitlines() if ln.strip()]
            es = build_interaction_eval_set(records, args.negative_ratio, args.seed or 0)
        else:
            es = EvalSet.from_csv(text, args.task)
    except ValueError as exc:
        raise FatalInput(f"cannot evaluate {path}: {exc}") from exc
    positive = args.positive
    if positive is not None and positive.lstrip("-").isdigit():
        positive = int(positive)
    report = evaluate(es, 1 if positive is None else positive)
    blob = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(blob + "\n", encoding="utf-8")
    print(blob)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="s3sim", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, backend=True):
        p.add_argument("--config", help="run config (YAML or JSON)")
        p.add_argument("--seed", type=int)
        if backend:
            p.add_argument("--backend", choices=["rule", "http"])

    p = sub.add_parser("ingest", help="extract the event subgraph from a JSON-lines dataset")
    p.add_argument("dataset")
    p.add_argument("--keywords", default="", help="comma-separated; empty keeps every user")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("demographics", help="infer age, gender and occupation for every user")
    p.add_argument("--graph", required=True, help="directory written by ingest")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_demographics)

    p = sub.add_parser("simulate", help="run the propagation simulation")
    p.add_argument("--graph", required=True)
    p.add_argument("--demographics")
    p.add_argument("--out", required=True)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--workers", type=int)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", help="score an event log or a labeled CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--task", default="action", choices=["emotion", "attitude", "action", "gender", "age"])
    p.add_argument("--negative-ratio", type=float, default=1.0)
    p.add_argument("--positive", help="positive label for binary tasks (default 1)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FatalInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
