"""re3: temporal re-ranking for dense retrieval.

A two-step retrieval pipeline: exact top-K semantic pre-retrieval followed
by re-ranking with a trainable fusion of semantic similarity and
multi-frequency sinusoidal encodings of day gaps (query-time alignment and
publication freshness). Ships with deterministic synthetic benchmark
generators, ranking metrics, and an ablation harness.
"""

from re3.bench import (
    BenchDataset,
    BenchError,
    GenConfig,
    blank_timestamps,
    generate,
    load_dataset,
    run_ablation,
    training_sibling,
    validate_dataset,
    validate_files,
    write_dataset,
)
from re3.data import (
    SCENARIOS,
    DataError,
    Document,
    Query,
    read_dataset,
    read_documents,
    read_queries,
    write_documents,
    write_queries,
)
from re3.dates import DateError, PartialDate, day_number, interval_gap, interval_of
from re3.embed import (
    EmbeddingStore,
    StoreError,
    append_timestamp_tag,
    cosine,
    embed_texts,
    load_store,
    save_store_binary,
    save_store_text,
    toy_embed,
)
from re3.encode import (
    EncodingConfig,
    TemporalFeatures,
    build_features,
    features_for,
    fourier_encode,
    recency_gap,
    relevance_gap,
)
from re3.extract import ExtractionResult, extract_dates, primary_date, render_date
from re3.index import SearchHit, retrieve_pools, top_k
from re3.metrics import (
    MetricsReport,
    build_report,
    mfg_at_k,
    mrr,
    recall_at_k,
    timevar_at_k,
)
from re3.pipeline import (
    ABLATION_MODES,
    GATE_SATURATION,
    PipelineConfig,
    PipelineResult,
    pre_retrieval_recall,
    run_pipeline,
)
from re3.scorer import (
    PolicyError,
    RefTimePolicy,
    ScoredCandidate,
    ScorerParams,
    fuse,
    init_params,
    load_params,
    rerank,
    save_params,
)
from re3.train import (
    EpochStats,
    TrainConfig,
    TrainingError,
    compile_dataset,
    fit,
    loss,
    loss_and_gradient,
    write_trace_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ABLATION_MODES",
    "BenchDataset",
    "BenchError",
    "DataError",
    "DateError",
    "Document",
    "EmbeddingStore",
    "EncodingConfig",
    "EpochStats",
    "ExtractionResult",
    "GATE_SATURATION",
    "GenConfig",
    "MetricsReport",
    "PartialDate",
    "PipelineConfig",
    "PipelineResult",
    "PolicyError",
    "Query",
    "RefTimePolicy",
    "SCENARIOS",
    "ScoredCandidate",
    "ScorerParams",
    "SearchHit",
    "StoreError",
    "TemporalFeatures",
    "TrainConfig",
    "TrainingError",
    "append_timestamp_tag",
    "blank_timestamps",
    "build_features",
    "build_report",
    "compile_dataset",
    "cosine",
    "day_number",
    "embed_texts",
    "extract_dates",
    "features_for",
    "fit",
    "fourier_encode",
    "fuse",
    "generate",
    "init_params",
    "interval_gap",
    "interval_of",
    "load_dataset",
    "load_params",
    "load_store",
    "loss",
    "loss_and_gradient",
    "mfg_at_k",
    "mrr",
    "pre_retrieval_recall",
    "primary_date",
    "read_dataset",
    "read_documents",
    "read_queries",
    "recall_at_k",
    "recency_gap",
    "relevance_gap",
    "render_date",
    "rerank",
    "retrieve_pools",
    "run_ablation",
    "run_pipeline",
    "save_params",
    "save_store_binary",
    "save_store_text",
    "timevar_at_k",
    "top_k",
    "toy_embed",
    "training_sibling",
    "validate_dataset",
    "validate_files",
    "write_dataset",
    "write_documents",
    "write_queries",
    "write_trace_csv",
    "__version__",
]
