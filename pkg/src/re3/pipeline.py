"""End-to-end runs: embed, retrieve, train the re-ranker, evaluate.

``run_pipeline`` wires the stages together for one dataset and one ablation
mode. Modes either change how temporal features are built (``scalar-repeat``,
``bge-diff``, ``missing-aware-off``) or pin the fusion gate (``no-gate-fixed``
holds it at an even blend, ``no-gate-semantic`` saturates it so ranking
reduces to pure semantic order). ``full`` is the unablated system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from re3.data import Document, Query
from re3.dates import PartialDate
from re3.embed import EmbeddingStore, embed_texts
from re3.encode import EncodingConfig
from re3.index import SearchHit, retrieve_pools
from re3.metrics import MetricsReport, build_report
from re3.scorer import RefTimePolicy, ScorerParams, init_params, rerank
from re3.train import EpochStats, TrainConfig, compile_dataset, fit

ABLATION_MODES = (
    "full",
    "no-gate-fixed",
    "no-gate-semantic",
    "scalar-repeat",
    "bge-diff",
    "missing-aware-off",
)

# Gate saturation point: sigmoid(20) is within 1e-8 of 1, so the temporal
# channel contributes nothing detectable to the fused score.
GATE_SATURATION = 20.0


@dataclass(frozen=True)
class PipelineConfig:
    """One knob set for an end-to-end run; identical configs give identical runs."""

    dim: int = 64
    time_dim: int = 64
    k: int = 50
    seed: int = 0
    epochs: int = 40
    learning_rate: float = 1e-3
    # Smaller batches than the optimizer default: the fusion gate is a single
    # scalar whose update size is step-count bound, so at benchmark scale it
    # needs many steps per epoch to move anywhere before the loss flattens.
    batch_size: int = 8
    temperature: float = 0.05
    weight_decay: float = 0.0
    eval_k: int = 5
    mode: str = "full"

    def __post_init__(self) -> None:
        if self.mode not in ABLATION_MODES:
            raise ValueError(f"unknown ablation mode: {self.mode!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.eval_k < 1:
            raise ValueError("eval_k must be >= 1")


@dataclass
class PipelineResult:
    params: ScorerParams
    trace: list[EpochStats]
    pools: dict[str, list[SearchHit]]
    rankings: dict[str, list[str]]
    report: MetricsReport
    pre_recall: float
    skipped: int


def encoding_for(cfg: PipelineConfig) -> EncodingConfig:
    """Temporal-feature settings implied by the ablation mode."""
    mode = {"scalar-repeat": "scalar", "bge-diff": "bge-diff"}.get(cfg.mode, "fourier")
    return EncodingConfig(
        dim=cfg.time_dim,
        mode=mode,
        missing_aware=cfg.mode != "missing-aware-off",
        embed_seed=cfg.seed,
    )


def alpha_frozen_for(cfg: PipelineConfig) -> float | None:
    """Fixed gate value for the gate ablations; None lets the gate train."""
    if cfg.mode == "no-gate-fixed":
        return 0.0
    if cfg.mode == "no-gate-semantic":
        return GATE_SATURATION
    return None


def policy_for(scenario: str, today: PartialDate | None) -> RefTimePolicy | None:
    """Reference-time policy per scenario.

    Alignment-only queries get no reference time (the freshness channel sees
    every candidate as undated); freshness queries measure staleness against
    a fixed evaluation date; hybrid queries use their own anchor time.
    """
    if scenario == "rel":
        return None
    if scenario == "rec":
        if today is None:
            raise ValueError("rec scenario needs a fixed reference date")
        return RefTimePolicy.fixed(today)
    return RefTimePolicy.query_time()


def embed_corpus(
    documents: list[Document], queries: list[Query], cfg: PipelineConfig
) -> tuple[EmbeddingStore, EmbeddingStore]:
    doc_store = embed_texts([(d.doc_id, d.text) for d in documents], cfg.dim, cfg.seed)
    query_store = embed_texts([(q.query_id, q.text) for q in queries], cfg.dim, cfg.seed)
    return doc_store, query_store


def pre_retrieval_recall(
    pools: dict[str, list[SearchHit]], queries: list[Query]
) -> float:
    """Fraction of queries whose gold survived first-stage retrieval."""
    if not queries:
        return 0.0
    hits = sum(
        any(h.doc_id == q.gold for h in pools[q.query_id]) for q in queries
    )
    return hits / len(queries)


def run_pipeline(
    documents: list[Document],
    queries: list[Query],
    cfg: PipelineConfig,
    today: PartialDate | None = None,
    train: tuple[list[Document], list[Query]] | None = None,
) -> PipelineResult:
    """Embed, retrieve, train the re-ranker, rerank, and score one dataset.

    ``train`` supplies a separate (documents, queries) corpus to fit on; the
    passed dataset is then evaluated held-out. Without it, training runs on
    the evaluation pools themselves.
    """
    if not queries:
        raise ValueError("run_pipeline needs at least one query")
    scenario = queries[0].scenario
    policy = policy_for(scenario, today)
    ecfg = encoding_for(cfg)

    docs = {d.doc_id: d for d in documents}
    doc_store, query_store = embed_corpus(documents, queries, cfg)
    pools = retrieve_pools(query_store, doc_store, cfg.k)
    by_query = {q.query_id: q for q in queries}

    if train is None:
        train_documents, train_queries = documents, queries
        train_doc_store, train_query_store = doc_store, query_store
        train_pools = pools
    else:
        train_documents, train_queries = train
        train_doc_store, train_query_store = embed_corpus(
            train_documents, train_queries, cfg
        )
        train_pools = retrieve_pools(train_query_store, train_doc_store, cfg.k)
    examples, skipped = compile_dataset(
        train_queries, train_pools, {d.doc_id: d for d in train_documents},
        train_query_store, train_doc_store, ecfg, policy,
    )
    tcfg = TrainConfig(
        learning_rate=cfg.learning_rate,
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        temperature=cfg.temperature,
        seed=cfg.seed,
        weight_decay=cfg.weight_decay,
        alpha_frozen=alpha_frozen_for(cfg),
    )
    initial = init_params(d_sem=cfg.dim, d_time=ecfg.dim, seed=cfg.seed)
    params, trace = fit(examples, tcfg, initial)

    rankings = {}
    for query_id in sorted(pools):
        query = by_query[query_id]
        pool = [hit.doc_id for hit in pools[query_id]]
        scored = rerank(
            pool, query, docs, query_store.get(query_id), doc_store,
            ecfg, params, policy,
        )
        rankings[query_id] = [c.doc_id for c in scored]

    report = build_report(rankings, queries, documents, k=cfg.eval_k)
    return PipelineResult(
        params=params,
        trace=trace,
        pools=pools,
        rankings=rankings,
        report=report,
        pre_recall=pre_retrieval_recall(pools, queries),
        skipped=skipped,
    )
