"""Training for the time-aware scorer.

The objective is listwise softmax cross-entropy over each query's candidate
pool: fused scores are divided by a temperature, softmaxed, and the loss is
the negative log-probability of the gold document. The backward pass is
hand-derived for the fixed architecture (two affine layers + tanh, cosine
similarity, scalar gate) and verified against finite differences in tests.

Optimization is mini-batch Adam-style: per-parameter first and second
moments with bias correction. Shuffling is driven by the config seed, and
batch gradients are summed in a fixed order, so training is bit-for-bit
reproducible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from re3.data import Document, Query
from re3.embed import EmbeddingStore, _NORM_GUARD, cosine
from re3.encode import EncodingConfig, features_for
from re3.index import SearchHit
from re3.scorer import RefTimePolicy, ScorerParams, mlp_forward, sigmoid


class TrainingError(RuntimeError):
    """Raised when training encounters non-finite state."""


@dataclass
class _ZeroMiss:
    phi_miss_rel: np.ndarray
    phi_miss_rec: np.ndarray


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 30
    batch_size: int = 32
    temperature: float = 0.05
    seed: int = 0
    weight_decay: float = 0.0
    # When set, alpha starts at this value and is never updated (gate
    # ablations: 0.0 pins an even blend, +20 pins semantic-only).
    alpha_frozen: float | None = None

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.batch_size <= 0:
            raise ValueError("batch_size must be positive")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")


@dataclass
class TrainExample:
    """One query's pool, compiled to arrays for the forward/backward pass.

    ``phi_rel`` / ``phi_rec`` hold the sinusoidal encodings with zero rows
    where the gap is missing; the float masks ``m_rel`` / ``m_rec`` mark
    those rows, and the learnable missing embeddings are added at forward
    time so their gradients stay exact.
    """

    query_id: str
    doc_ids: list[str]
    e_q: np.ndarray  # (d_sem,)
    E_d: np.ndarray  # (n, d_sem)
    phi_rel: np.ndarray  # (n, d_time)
    phi_rec: np.ndarray  # (n, d_time)
    m_rel: np.ndarray  # (n,) floats in {0, 1}
    m_rec: np.ndarray  # (n,)
    s_sem: np.ndarray  # (n,) fixed semantic cosines
    gold_index: int


@dataclass
class ParamGradients:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    phi_miss_rel: np.ndarray
    phi_miss_rec: np.ndarray
    alpha: float

    @classmethod
    def zeros_like(cls, params: ScorerParams) -> ParamGradients:
        return cls(
            W1=np.zeros_like(params.W1),
            b1=np.zeros_like(params.b1),
            W2=np.zeros_like(params.W2),
            b2=np.zeros_like(params.b2),
            phi_miss_rel=np.zeros_like(params.phi_miss_rel),
            phi_miss_rec=np.zeros_like(params.phi_miss_rec),
            alpha=0.0,
        )

    def add_(self, other: ParamGradients) -> None:
        self.W1 += other.W1
        self.b1 += other.b1
        self.W2 += other.W2
        self.b2 += other.b2
        self.phi_miss_rel += other.phi_miss_rel
        self.phi_miss_rec += other.phi_miss_rec
        self.alpha += other.alpha

    def scale_(self, factor: float) -> None:
        self.W1 *= factor
        self.b1 *= factor
        self.W2 *= factor
        self.b2 *= factor
        self.phi_miss_rel *= factor
        self.phi_miss_rec *= factor
        self.alpha *= factor


def compile_pool(
    query: Query,
    pool: list[str],
    docs: dict[str, Document],
    query_vec: np.ndarray,
    doc_store: EmbeddingStore,
    cfg: EncodingConfig,
    policy: RefTimePolicy | None,
) -> TrainExample | None:
    """Precompute everything about one pool that does not depend on params.

    Returns None when the gold document is not in the pool (the example is
    untrainable and the caller counts it).
    """
    if query.gold not in pool:
        return None
    n = len(pool)
    E_d = doc_store.matrix(pool)
    phi_rel = np.zeros((n, cfg.dim))
    phi_rec = np.zeros((n, cfg.dim))
    m_rel = np.zeros(n)
    m_rec = np.zeros(n)
    s_sem = np.zeros(n)
    t_ref = policy.resolve(query) if policy is not None else None
    # Zero missing embeddings here: the real ones are added at forward time
    # via the m masks, keeping compiled features independent of params.
    stub = _ZeroMiss(np.zeros(cfg.dim), np.zeros(cfg.dim))
    for j, doc_id in enumerate(pool):
        doc = docs[doc_id]
        clue_times = [doc.t_c] if doc.t_c is not None else None
        _, _, feats = features_for(query.t_q, clue_times, t_ref, doc.t_d, cfg, stub)
        phi_rel[j] = feats.phi_rel
        phi_rec[j] = feats.phi_rec
        m_rel[j] = float(feats.m_rel)
        m_rec[j] = float(feats.m_rec)
        s_sem[j] = cosine(query_vec, E_d[j])
    return TrainExample(
        query_id=query.query_id,
        doc_ids=list(pool),
        e_q=np.asarray(query_vec, dtype=float),
        E_d=E_d,
        phi_rel=phi_rel,
        phi_rec=phi_rec,
        m_rel=m_rel,
        m_rec=m_rec,
        s_sem=s_sem,
        gold_index=pool.index(query.gold),
    )


def compile_dataset(
    queries: list[Query],
    pools: dict[str, list[SearchHit]],
    docs: dict[str, Document],
    query_store: EmbeddingStore,
    doc_store: EmbeddingStore,
    cfg: EncodingConfig,
    policy: RefTimePolicy | None,
) -> tuple[list[TrainExample], int]:
    """Compile every query whose pool contains its gold; count the misses."""
    examples = []
    skipped = 0
    for query in queries:
        pool = [hit.doc_id for hit in pools[query.query_id]]
        example = compile_pool(
            query, pool, docs, query_store.get(query.query_id), doc_store, cfg, policy
        )
        if example is None:
            skipped += 1
        else:
            examples.append(example)
    return examples, skipped


@dataclass
class _Forward:
    """Intermediate state shared between the loss and the backward pass."""

    X: np.ndarray
    H: np.ndarray
    Y: np.ndarray
    y_norms: np.ndarray
    q_norm: float
    s_time: np.ndarray
    s_final: np.ndarray
    probs: np.ndarray
    loss: float


def _forward(example: TrainExample, params: ScorerParams, temperature: float) -> _Forward:
    phi_rel = example.phi_rel + np.outer(example.m_rel, params.phi_miss_rel)
    phi_rec = example.phi_rec + np.outer(example.m_rec, params.phi_miss_rec)
    X = np.concatenate(
        [example.E_d, phi_rel, phi_rec, example.m_rel[:, None], example.m_rec[:, None]],
        axis=1,
    )
    Y, H = mlp_forward(X, params)
    q_norm = float(np.linalg.norm(example.e_q))
    y_norms = np.linalg.norm(Y, axis=1)
    safe = np.where(y_norms < _NORM_GUARD, 1.0, y_norms)
    if q_norm < _NORM_GUARD:
        s_time = np.zeros(len(example.doc_ids))
    else:
        s_time = (Y @ example.e_q) / (q_norm * safe)
        s_time[y_norms < _NORM_GUARD] = 0.0
    gate = sigmoid(params.alpha)
    s_final = gate * example.s_sem + (1.0 - gate) * s_time
    z = s_final / temperature
    z_shift = z - np.max(z)
    expz = np.exp(z_shift)
    total = float(np.sum(expz))
    probs = expz / total
    loss = float(np.log(total) - z_shift[example.gold_index])
    return _Forward(X, H, Y, y_norms, q_norm, s_time, s_final, probs, loss)


def loss(example: TrainExample, params: ScorerParams, temperature: float) -> float:
    """Negative log-probability of the gold under the pool softmax."""
    return _forward(example, params, temperature).loss


def loss_and_gradient(
    example: TrainExample, params: ScorerParams, temperature: float
) -> tuple[float, ParamGradients]:
    """Loss plus its exact analytic gradient for one example."""
    fwd = _forward(example, params, temperature)
    n, d_sem = example.E_d.shape

    dscore = fwd.probs.copy()
    dscore[example.gold_index] -= 1.0
    dscore /= temperature

    gate = sigmoid(params.alpha)
    d_alpha = float(
        np.dot(dscore, example.s_sem - fwd.s_time) * gate * (1.0 - gate)
    )

    ds_time = dscore * (1.0 - gate)
    # Cosine backward wrt the projected vector y: u fixed at e_q.
    # dc/dy = u/(|u||y|) - c*y/|y|^2; guarded rows have zero gradient.
    dY = np.zeros_like(fwd.Y)
    if fwd.q_norm >= _NORM_GUARD:
        live = fwd.y_norms >= _NORM_GUARD
        inv = np.zeros(n)
        inv[live] = 1.0 / (fwd.q_norm * fwd.y_norms[live])
        dY = ds_time[:, None] * (
            inv[:, None] * example.e_q[None, :]
            - np.where(
                live[:, None],
                (fwd.s_time / np.where(live, fwd.y_norms**2, 1.0))[:, None] * fwd.Y,
                0.0,
            )
        )
        dY[~live] = 0.0

    dW2 = fwd.H.T @ dY
    db2 = dY.sum(axis=0)
    dH = dY @ params.W2.T
    dZ = dH * (1.0 - fwd.H**2)
    dW1 = fwd.X.T @ dZ
    db1 = dZ.sum(axis=0)
    dX = dZ @ params.W1.T

    d_time = params.d_time
    dphi_rel = dX[:, d_sem : d_sem + d_time]
    dphi_rec = dX[:, d_sem + d_time : d_sem + 2 * d_time]
    grads = ParamGradients(
        W1=dW1,
        b1=db1,
        W2=dW2,
        b2=db2,
        phi_miss_rel=example.m_rel @ dphi_rel,
        phi_miss_rec=example.m_rec @ dphi_rec,
        alpha=d_alpha,
    )
    return fwd.loss, grads


def rank_of_gold(example: TrainExample, params: ScorerParams, temperature: float = 1.0) -> int:
    """0-based rank of the gold document under the current params."""
    fwd = _forward(example, params, temperature)
    order = sorted(
        range(len(example.doc_ids)),
        key=lambda j: (-fwd.s_final[j], -example.s_sem[j], example.doc_ids[j]),
    )
    return order.index(example.gold_index)


@dataclass
class EpochStats:
    epoch: int
    mean_loss: float
    train_r_at_1: float


@dataclass
class _AdamState:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: ParamGradients | None = None
    v: ParamGradients | None = None


def _adam_update(
    params: ScorerParams,
    grads: ParamGradients,
    state: _AdamState,
    cfg: TrainConfig,
) -> None:
    if state.m is None:
        state.m = ParamGradients.zeros_like(params)
        state.v = ParamGradients.zeros_like(params)
    if cfg.weight_decay > 0.0:
        grads.W1 = grads.W1 + cfg.weight_decay * params.W1
        grads.W2 = grads.W2 + cfg.weight_decay * params.W2
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1**state.step
    corr2 = 1.0 - b2**state.step
    fields = ["W1", "b1", "W2", "b2", "phi_miss_rel", "phi_miss_rec", "alpha"]
    if cfg.alpha_frozen is not None:
        fields.remove("alpha")
    for name in fields:
        g = getattr(grads, name)
        m = b1 * getattr(state.m, name) + (1.0 - b1) * g
        v = b2 * getattr(state.v, name) + (1.0 - b2) * g * g
        setattr(state.m, name, m)
        setattr(state.v, name, v)
        step = cfg.learning_rate * (m / corr1) / (np.sqrt(v / corr2) + state.eps)
        setattr(params, name, getattr(params, name) - step)
    params.alpha = float(params.alpha)


def fit(
    dataset: list[TrainExample],
    cfg: TrainConfig,
    initial: ScorerParams,
) -> tuple[ScorerParams, list[EpochStats]]:
    """Mini-batch training; returns new params and a per-epoch trace.

    The trace reports the full-dataset mean loss and training R@1 measured
    after each epoch's updates. The input params are not mutated.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    params = initial.copy()
    if cfg.alpha_frozen is not None:
        params.alpha = float(cfg.alpha_frozen)
    if cfg.epochs == 0:
        return params, []
    rng = np.random.default_rng(cfg.seed)
    state = _AdamState()
    trace = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(dataset))
        for start in range(0, len(dataset), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            total = ParamGradients.zeros_like(params)
            for idx in batch:
                value, grads = loss_and_gradient(dataset[idx], params, cfg.temperature)
                if not np.isfinite(value):
                    raise TrainingError(
                        f"non-finite loss at epoch {epoch}, batch starting {start} "
                        f"(query {dataset[idx].query_id!r})"
                    )
                total.add_(grads)
            total.scale_(1.0 / len(batch))
            _adam_update(params, total, state, cfg)
        for name, arr in params.arrays():
            if not np.all(np.isfinite(arr)):
                raise TrainingError(f"non-finite {name} after epoch {epoch}")
        if not np.isfinite(params.alpha):
            raise TrainingError(f"non-finite alpha after epoch {epoch}")
        losses = [loss(ex, params, cfg.temperature) for ex in dataset]
        hits = sum(1 for ex in dataset if rank_of_gold(ex, params) == 0)
        trace.append(
            EpochStats(
                epoch=epoch,
                mean_loss=float(np.mean(losses)),
                train_r_at_1=hits / len(dataset),
            )
        )
    return params, trace


def write_trace_csv(path: str | Path, trace: list[EpochStats]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss", "train_R@1"])
        for row in trace:
            writer.writerow([row.epoch, repr(row.mean_loss), repr(row.train_r_at_1)])
