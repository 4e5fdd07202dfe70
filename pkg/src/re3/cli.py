"""Command-line entry point: reproducible runs over every pipeline stage.

Subcommands mirror the pipeline: ``gen`` builds a benchmark dataset,
``embed`` turns JSONL texts into vectors, ``index`` packs vectors into the
binary store format, ``train`` fits re-ranker parameters, ``search`` answers
a single query, ``eval`` scores a dataset under one ablation mode, and
``extract-time`` pulls dates out of raw text.

Every run writes a JSON run manifest (subcommand, effective config, seeds,
input checksums, artifact versions, wall-clock duration). Config precedence
everywhere: command-line flags beat ``--config`` file values, which beat
built-in defaults; the ``RE3_SEED`` environment variable fills in when no
seed is given anywhere. The duration field is the only place any subcommand
reads the wall clock.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from re3 import __version__
from re3.bench import (
    GenConfig,
    generate,
    load_dataset,
    run_ablation,
    validate_files,
    write_dataset,
)
from re3.data import Query, read_dataset, read_documents
from re3.dates import PartialDate
from re3.embed import (
    EmbeddingStore,
    append_timestamp_tag,
    embed_texts,
    load_store,
    save_store_binary,
    save_store_text,
    toy_embed,
)
from re3.encode import EncodingConfig
from re3.extract import extract_dates, primary_date
from re3.index import retrieve_pools, top_k
from re3.pipeline import ABLATION_MODES, PipelineConfig, policy_for
from re3.scorer import RefTimePolicy, init_params, load_params, rerank, save_params
from re3.train import TrainConfig, compile_dataset, fit, write_trace_csv

ERROR_PREFIX = "re3: error:"

FORMAT_VERSIONS = {
    "bench": "re3-bench-v1",
    "params": "re3-params-v1",
    "vectors-binary": "re3-vectors-v1",
}


# --- run manifests ----------------------------------------------------------


def _sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _versions() -> dict:
    return {
        "re3": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "formats": dict(FORMAT_VERSIONS),
    }


@dataclasses.dataclass
class RunManifest:
    """Reproducibility record written by every subcommand.

    ``duration_s`` is informational only; two runs that agree on every other
    field produce byte-identical outputs.
    """

    subcommand: str
    config: dict
    seeds: dict
    inputs: dict
    versions: dict = dataclasses.field(default_factory=_versions)
    duration_s: float = 0.0


def write_run_manifest(manifest: RunManifest, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dataclasses.asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest_path(args: argparse.Namespace, default: str | Path) -> Path:
    return Path(args.manifest) if args.manifest else Path(default)


# --- config precedence ------------------------------------------------------


def _load_config_file(path: str | None, allowed: set[str]) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        values = json.load(fh)
    if not isinstance(values, dict):
        raise ValueError(f"{path}: config file must hold a JSON object")
    unknown = set(values) - allowed
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {sorted(unknown)}")
    return values


def merged_config(
    args: argparse.Namespace, defaults: dict[str, object]
) -> dict[str, object]:
    """Resolve one value per key: flag if given, else config file, else default.

    Flags use ``None`` as the "not given" sentinel, so every flag that feeds
    this merge must be declared with ``default=None``.
    """
    file_cfg = _load_config_file(getattr(args, "config", None), set(defaults))
    merged = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
        elif key in file_cfg:
            merged[key] = file_cfg[key]
        else:
            merged[key] = default
    return merged


def resolve_seed(value: object, fallback: int = 0) -> int:
    """Seed precedence tail: explicit value, then RE3_SEED, then fallback."""
    if value is not None:
        return int(value)  # type: ignore[arg-type]
    env = os.environ.get("RE3_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"RE3_SEED must be an integer, got {env!r}") from None
    return fallback


def _config_checksums(args: argparse.Namespace) -> dict:
    path = getattr(args, "config", None)
    return {path: _sha256(path)} if path else {}


# --- subcommands ------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    defaults = {
        "scenario": None,
        "queries": 100,
        "cdr": 5,
        "seed": None,
        "today": "2025-01-01",
        "year_lo": 2010,
        "year_hi": 2024,
        "n_entities": 64,
        "rec_min_extra": 2,
        "rec_max_extra": 4,
    }
    cfg = merged_config(args, defaults)
    if cfg["scenario"] is None:
        raise ValueError("gen needs --scenario (or a scenario in --config)")
    cfg["seed"] = resolve_seed(cfg["seed"])
    gen_cfg = GenConfig(
        scenario=cfg["scenario"],
        num_queries=cfg["queries"],
        cdr=cfg["cdr"],
        seed=cfg["seed"],
        year_lo=cfg["year_lo"],
        year_hi=cfg["year_hi"],
        n_entities=cfg["n_entities"],
        rec_min_extra=cfg["rec_min_extra"],
        rec_max_extra=cfg["rec_max_extra"],
        today=cfg["today"],
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_dataset(generate(gen_cfg), out)
    problems = validate_files(out)
    if problems:
        raise RuntimeError(f"generated dataset failed validation: {problems[0]}")
    manifest = RunManifest(
        subcommand="gen",
        config=dataclasses.asdict(gen_cfg),
        seeds={"seed": gen_cfg.seed},
        inputs=_config_checksums(args),
        duration_s=time.perf_counter() - started,
    )
    write_run_manifest(manifest, _manifest_path(args, out / "run.json"))
    print(f"wrote dataset to {out}")
    return 0


def _read_id_text_pairs(path: str, tag_timestamps: bool) -> list[tuple[str, str]]:
    """Read (id, text) pairs from a JSONL file of document or query records."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if "id" not in record or "text" not in record:
                raise ValueError(f"{path}:{lineno}: record needs 'id' and 'text'")
            text = record["text"]
            if tag_timestamps:
                stamp = record.get("t_d")
                t_d = PartialDate.parse(stamp) if stamp else None
                text = append_timestamp_tag(text, t_d)
            pairs.append((record["id"], text))
    return pairs


def cmd_embed(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    defaults = {"dim": 64, "seed": None, "tag_timestamps": False, "format": "text"}
    cfg = merged_config(args, defaults)
    cfg["seed"] = resolve_seed(cfg["seed"])
    pairs = _read_id_text_pairs(args.input, cfg["tag_timestamps"])
    store = embed_texts(pairs, cfg["dim"], cfg["seed"])
    writer = save_store_binary if cfg["format"] == "binary" else save_store_text
    writer(store, args.out)
    manifest = RunManifest(
        subcommand="embed",
        config={**cfg, "input": args.input, "out": args.out},
        seeds={"seed": cfg["seed"]},
        inputs={args.input: _sha256(args.input), **_config_checksums(args)},
        duration_s=time.perf_counter() - started,
    )
    write_run_manifest(manifest, _manifest_path(args, f"{args.out}.run.json"))
    print(f"embedded {len(store)} texts at dim {cfg['dim']} -> {args.out}")
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    store = load_store(args.vectors)
    save_store_binary(store, args.out)
    manifest = RunManifest(
        subcommand="index",
        config={"vectors": args.vectors, "out": args.out},
        seeds={},
        inputs={args.vectors: _sha256(args.vectors)},
        duration_s=time.perf_counter() - started,
    )
    write_run_manifest(manifest, _manifest_path(args, f"{args.out}.run.json"))
    print(f"indexed {len(store)} vectors -> {args.out}")
    return 0


def _dataset_today(directory: Path) -> str | None:
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        return None
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    return manifest.get("config", {}).get("today")


def _split_stores(
    merged: EmbeddingStore, documents, queries
) -> tuple[EmbeddingStore, EmbeddingStore]:
    doc_store, query_store = EmbeddingStore(), EmbeddingStore()
    for doc in documents:
        doc_store.add(doc.doc_id, merged.get(doc.doc_id))
    for query in queries:
        query_store.add(query.query_id, merged.get(query.query_id))
    return doc_store, query_store


def cmd_train(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    defaults = {
        "k": 50,
        "seed": None,
        "learning_rate": 1e-3,
        "epochs": 30,
        "batch_size": 32,
        "temperature": 0.05,
        "weight_decay": 0.0,
        "alpha_frozen": None,
        "time_dim": 64,
        "feature_mode": "fourier",
        "missing_aware": True,
        "today": None,
    }
    cfg = merged_config(args, defaults)
    cfg["seed"] = resolve_seed(cfg["seed"])

    dataset_dir = Path(args.dataset)
    documents, queries = read_dataset(dataset_dir)
    if not queries:
        raise ValueError(f"{dataset_dir}: no queries to train on")
    today = cfg["today"] or _dataset_today(dataset_dir)
    policy = policy_for(
        queries[0].scenario, PartialDate.parse(today) if today else None
    )

    merged = EmbeddingStore()
    for path in args.vectors:
        loaded = load_store(path)
        for text_id in loaded.ids():
            merged.add(text_id, loaded.get(text_id))
    doc_store, query_store = _split_stores(merged, documents, queries)

    pools = retrieve_pools(query_store, doc_store, cfg["k"])
    ecfg = EncodingConfig(
        dim=cfg["time_dim"],
        mode=cfg["feature_mode"],
        missing_aware=cfg["missing_aware"],
        embed_seed=cfg["seed"],
    )
    examples, skipped = compile_dataset(
        queries, pools, {d.doc_id: d for d in documents},
        query_store, doc_store, ecfg, policy,
    )
    tcfg = TrainConfig(
        learning_rate=cfg["learning_rate"],
        epochs=cfg["epochs"],
        batch_size=cfg["batch_size"],
        temperature=cfg["temperature"],
        seed=cfg["seed"],
        weight_decay=cfg["weight_decay"],
        alpha_frozen=cfg["alpha_frozen"],
    )
    initial = init_params(d_sem=doc_store.dim, d_time=cfg["time_dim"], seed=cfg["seed"])
    params, trace = fit(examples, tcfg, initial)

    hyper = {**cfg, "scenario": queries[0].scenario, "skipped_queries": skipped}
    save_params(params, args.out, manifest=hyper)
    trace_path = args.trace or f"{args.out}.trace.csv"
    write_trace_csv(trace_path, trace)

    inputs = {str(dataset_dir / name): _sha256(dataset_dir / name)
              for name in ("docs.jsonl", "queries.jsonl")}
    for path in args.vectors:
        inputs[path] = _sha256(path)
    manifest = RunManifest(
        subcommand="train",
        config={**hyper, "dataset": str(dataset_dir), "out": args.out},
        seeds={"seed": cfg["seed"]},
        inputs={**inputs, **_config_checksums(args)},
        duration_s=time.perf_counter() - started,
    )
    write_run_manifest(manifest, _manifest_path(args, f"{args.out}.run.json"))
    final = trace[-1] if trace else None
    tail = f", final loss {final.mean_loss:.4f}" if final else ""
    print(f"trained on {len(examples)} pools ({skipped} skipped){tail} -> {args.out}")
    return 0


def parse_policy(text: str) -> RefTimePolicy | None:
    """Parse ``query-time``, ``fixed:YYYY-MM-DD``, or ``none``."""
    if text == "query-time":
        return RefTimePolicy.query_time()
    if text == "none":
        return None
    if text.startswith("fixed:"):
        return RefTimePolicy.fixed(PartialDate.parse(text[len("fixed:"):]))
    raise ValueError(
        f"bad policy {text!r}: expected query-time, none, or fixed:YYYY-MM-DD"
    )


def cmd_search(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    defaults = {"k": 50, "dim": None, "seed": None, "policy": "query-time"}
    cfg = merged_config(args, defaults)
    cfg["seed"] = resolve_seed(cfg["seed"])

    store = load_store(args.index)
    if len(store) == 0:
        raise ValueError(f"{args.index}: empty index")
    dim = cfg["dim"] or store.dim
    if dim != store.dim:
        raise ValueError(f"--dim {dim} does not match index dim {store.dim}")
    query_vec = toy_embed(args.query, dim, cfg["seed"])
    hits = top_k(query_vec, store, cfg["k"])

    if args.params:
        if not args.docs:
            raise ValueError("--params needs --docs for document timestamps")
        params = load_params(args.params)
        sidecar_path = Path(f"{args.params}.json")
        sidecar = {}
        if sidecar_path.exists():
            with open(sidecar_path, encoding="utf-8") as fh:
                sidecar = json.load(fh)
        ecfg = EncodingConfig(
            dim=params.d_time,
            mode=sidecar.get("feature_mode", "fourier"),
            missing_aware=sidecar.get("missing_aware", True),
            embed_seed=cfg["seed"],
        )
        policy = parse_policy(cfg["policy"])
        t_q = primary_date(extract_dates(args.query))
        query = Query(
            query_id="cli-query", text=args.query, gold="", scenario="hyb", t_q=t_q
        )
        docs = {d.doc_id: d for d in read_documents(args.docs)}
        scored = rerank(
            [h.doc_id for h in hits], query, docs, query_vec, store,
            ecfg, params, policy,
        )
        results = [
            {
                "doc_id": c.doc_id,
                "rank": rank,
                "score": c.score_final,
                "score_sem": c.score_sem,
                "score_time": c.score_time,
            }
            for rank, c in enumerate(scored, start=1)
        ]
    else:
        results = [
            {"doc_id": h.doc_id, "rank": rank, "score": h.score}
            for rank, h in enumerate(hits, start=1)
        ]

    payload = {
        "query": args.query,
        "k": cfg["k"],
        "policy": cfg["policy"] if args.params else None,
        "results": results,
    }
    rendered = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    else:
        sys.stdout.write(rendered)

    inputs = {args.index: _sha256(args.index), **_config_checksums(args)}
    for optional in (args.params, args.docs):
        if optional:
            inputs[optional] = _sha256(optional)
    manifest = RunManifest(
        subcommand="search",
        config={**cfg, "dim": dim, "query": args.query, "params": args.params,
                "docs": args.docs},
        seeds={"seed": cfg["seed"]},
        inputs=inputs,
        duration_s=time.perf_counter() - started,
    )
    default_manifest = f"{args.out}.run.json" if args.out else "re3-search.run.json"
    write_run_manifest(manifest, _manifest_path(args, default_manifest))
    return 0


def _report_table(report_dict: dict) -> str:
    rows = [(key, report_dict[key]) for key in sorted(report_dict)]
    width = max(len(key) for key, _ in rows)
    lines = [f"{'metric':<{width}}  value", f"{'-' * width}  -----"]
    for key, value in rows:
        if isinstance(value, float):
            rendered = f"{value:.4f}"
        elif value is None:
            rendered = "-"
        else:
            rendered = str(value)
        lines.append(f"{key:<{width}}  {rendered}")
    return "\n".join(lines) + "\n"


def cmd_eval(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    defaults = {
        "dim": 64, "time_dim": 64, "k": 50, "seed": None, "epochs": 40,
        "learning_rate": 1e-3, "batch_size": 8, "temperature": 0.05,
        "weight_decay": 0.0, "eval_k": 5,
    }
    cfg = merged_config(args, defaults)
    cfg["seed"] = resolve_seed(cfg["seed"])
    pipeline_cfg = PipelineConfig(mode=args.mode, **cfg)

    dataset = load_dataset(args.dataset)
    report = run_ablation(args.mode, dataset, cfg=pipeline_cfg)
    report_dict = report.to_dict()

    rendered = json.dumps(report_dict, indent=2, sort_keys=True) + "\n"
    Path(args.out).write_text(rendered, encoding="utf-8")
    sys.stdout.write(_report_table(report_dict))

    dataset_dir = Path(args.dataset)
    inputs = {
        str(dataset_dir / name): _sha256(dataset_dir / name)
        for name in ("docs.jsonl", "queries.jsonl", "manifest.json")
    }
    manifest = RunManifest(
        subcommand="eval",
        config={**dataclasses.asdict(pipeline_cfg), "dataset": str(dataset_dir),
                "out": args.out},
        seeds={"seed": cfg["seed"]},
        inputs={**inputs, **_config_checksums(args)},
        duration_s=time.perf_counter() - started,
    )
    write_run_manifest(manifest, _manifest_path(args, f"{args.out}.run.json"))
    return 0


def cmd_extract_time(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    if args.text is not None:
        lines = [args.text]
    else:
        with open(args.input, encoding="utf-8") as fh:
            lines = [line.rstrip("\n") for line in fh]
    records = []
    for line in lines:
        found = extract_dates(line)
        records.append(
            {"dates": [d.isoformat() for d in found.dates], "has_year": found.has_year}
        )
    rendered = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    else:
        sys.stdout.write(rendered)

    inputs = {args.input: _sha256(args.input)} if args.input else {}
    manifest = RunManifest(
        subcommand="extract-time",
        config={"text": args.text, "input": args.input, "out": args.out},
        seeds={},
        inputs=inputs,
        duration_s=time.perf_counter() - started,
    )
    default_manifest = (
        f"{args.out}.run.json" if args.out else "re3-extract-time.run.json"
    )
    write_run_manifest(manifest, _manifest_path(args, default_manifest))
    return 0


# --- parser -----------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file (flags override it)")
    sub.add_argument("--manifest", help="run-manifest path (default: next to output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="re3",
        description="Temporal re-ranking pipeline: generate, embed, index, "
        "train, search, evaluate, extract.",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    gen = subparsers.add_parser("gen", help="generate a synthetic benchmark dataset")
    gen.add_argument("--scenario", choices=("rel", "rec", "hyb"))
    gen.add_argument("--queries", type=int)
    gen.add_argument("--cdr", type=int, help="confuser-to-document ratio")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--today", help="fixed evaluation date (YYYY-MM-DD)")
    gen.add_argument("--out", required=True, help="output directory")
    _add_common(gen)
    gen.set_defaults(func=cmd_gen)

    embed = subparsers.add_parser("embed", help="embed JSONL texts into vectors")
    embed.add_argument("--input", required=True, help="docs.jsonl or queries.jsonl")
    embed.add_argument("--dim", type=int)
    embed.add_argument("--seed", type=int)
    embed.add_argument(
        "--tag-timestamps", action=argparse.BooleanOptionalAction, default=None,
        dest="tag_timestamps",
        help="append each record's publication date to its text before embedding",
    )
    embed.add_argument("--format", choices=("text", "binary"))
    embed.add_argument("--out", required=True, help="vectors file to write")
    _add_common(embed)
    embed.set_defaults(func=cmd_embed)

    index = subparsers.add_parser("index", help="pack vectors into the binary format")
    index.add_argument("--vectors", required=True)
    index.add_argument("--out", required=True)
    _add_common(index)
    index.set_defaults(func=cmd_index)

    train = subparsers.add_parser("train", help="fit re-ranker parameters")
    train.add_argument("--dataset", required=True, help="directory with docs.jsonl + queries.jsonl")
    train.add_argument(
        "--vectors", required=True, action="append",
        help="vectors file covering documents and queries (repeatable)",
    )
    train.add_argument("--k", type=int)
    train.add_argument("--seed", type=int)
    train.add_argument("--trace", help="loss-trace CSV path (default <out>.trace.csv)")
    train.add_argument("--out", required=True, help="parameter file to write")
    _add_common(train)
    train.set_defaults(func=cmd_train)

    search = subparsers.add_parser("search", help="answer one query against an index")
    search.add_argument("--index", required=True)
    search.add_argument("--query", required=True)
    search.add_argument("--k", type=int)
    search.add_argument("--dim", type=int)
    search.add_argument("--seed", type=int)
    search.add_argument("--params", help="re-rank with this parameter file")
    search.add_argument("--docs", help="docs.jsonl with timestamps (needed by --params)")
    search.add_argument(
        "--policy", help="reference-time policy: query-time, fixed:YYYY-MM-DD, or none"
    )
    search.add_argument("--out", help="write results JSON here instead of stdout")
    _add_common(search)
    search.set_defaults(func=cmd_search)

    evaluate = subparsers.add_parser("eval", help="score a dataset under one ablation mode")
    evaluate.add_argument("--dataset", required=True)
    evaluate.add_argument("--mode", required=True, choices=ABLATION_MODES)
    evaluate.add_argument("--k", type=int)
    evaluate.add_argument("--seed", type=int)
    evaluate.add_argument("--epochs", type=int)
    evaluate.add_argument("--out", required=True, help="metrics JSON to write")
    _add_common(evaluate)
    evaluate.set_defaults(func=cmd_eval)

    extract = subparsers.add_parser(
        "extract-time", help="extract dates from text, one JSON record per line"
    )
    source = extract.add_mutually_exclusive_group(required=True)
    source.add_argument("--text", help="extract from this string")
    source.add_argument("--input", help="extract from each line of this file")
    extract.add_argument("--out", help="write records here instead of stdout")
    _add_common(extract)
    extract.set_defaults(func=cmd_extract_time)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, KeyError, OSError) as exc:
        message = " ".join(str(exc).split()) or exc.__class__.__name__
        print(f"{ERROR_PREFIX} {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
