"""Time-aware scoring: projection MLP, gated score fusion, and re-ranking.

Each candidate document keeps its semantic embedding and additionally gets a
time-aware projection: a one-hidden-layer MLP maps the concatenation of the
document embedding, the two temporal encodings, and the two missing flags
back into embedding space. The final score blends the plain semantic cosine
with the time-aware cosine through a learnable scalar gate::

    score_final = sigmoid(alpha) * score_sem + (1 - sigmoid(alpha)) * score_time

With alpha pushed to +20 the ranker degenerates to pure semantic search; at
-20 it ranks purely by the time-aware channel.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from re3.data import Document, Query
from re3.dates import PartialDate
from re3.embed import EmbeddingStore, cosine
from re3.encode import EncodingConfig, TemporalFeatures, features_for

PARAMS_MAGIC = b"RE3P"


class PolicyError(ValueError):
    """Raised when a reference-time policy cannot be resolved for a query."""


def sigmoid(x: float) -> float:
    # Split on sign so large |x| never overflows exp.
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    z = np.exp(x)
    return float(z / (1.0 + z))


@dataclass
class ScorerParams:
    """All trainable state: MLP weights, missing-time embeddings, gate."""

    W1: np.ndarray  # (d_sem + 2*d_time + 2, hidden)
    b1: np.ndarray  # (hidden,)
    W2: np.ndarray  # (hidden, d_sem)
    b2: np.ndarray  # (d_sem,)
    phi_miss_rel: np.ndarray  # (d_time,)
    phi_miss_rec: np.ndarray  # (d_time,)
    alpha: float

    @property
    def d_time(self) -> int:
        return int(self.phi_miss_rel.shape[0])

    @property
    def d_sem(self) -> int:
        return int(self.W2.shape[1])

    @property
    def hidden(self) -> int:
        return int(self.W1.shape[1])

    @property
    def input_dim(self) -> int:
        return int(self.W1.shape[0])

    def validate(self) -> None:
        if self.input_dim != self.d_sem + 2 * self.d_time + 2:
            raise ValueError(
                f"input dim {self.input_dim} != d_sem {self.d_sem} "
                f"+ 2*d_time {self.d_time} + 2"
            )
        if self.b1.shape != (self.hidden,) or self.W2.shape[0] != self.hidden:
            raise ValueError("hidden-layer shapes inconsistent")
        if self.b2.shape != (self.d_sem,):
            raise ValueError("output bias shape inconsistent")
        if self.phi_miss_rec.shape != (self.d_time,):
            raise ValueError("missing-embedding shapes inconsistent")
        for name, arr in self.arrays():
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite values in {name}")
        if not np.isfinite(self.alpha):
            raise ValueError("non-finite alpha")

    def arrays(self) -> list[tuple[str, np.ndarray]]:
        return [
            ("W1", self.W1),
            ("b1", self.b1),
            ("W2", self.W2),
            ("b2", self.b2),
            ("phi_miss_rel", self.phi_miss_rel),
            ("phi_miss_rec", self.phi_miss_rec),
        ]

    def copy(self) -> ScorerParams:
        return ScorerParams(
            W1=self.W1.copy(),
            b1=self.b1.copy(),
            W2=self.W2.copy(),
            b2=self.b2.copy(),
            phi_miss_rel=self.phi_miss_rel.copy(),
            phi_miss_rec=self.phi_miss_rec.copy(),
            alpha=self.alpha,
        )


def init_params(
    d_sem: int, d_time: int, hidden: int | None = None, seed: int = 0
) -> ScorerParams:
    """Fresh parameters: Glorot-uniform weights, zero biases, neutral gate.

    alpha starts at 0 so the gate opens at an even 50/50 blend, and the
    missing embeddings start at zero so absent timestamps begin inert.
    """
    if hidden is None:
        hidden = d_sem
    input_dim = d_sem + 2 * d_time + 2
    rng = np.random.default_rng(seed)

    def glorot(fan_in: int, fan_out: int) -> np.ndarray:
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_in, fan_out))

    params = ScorerParams(
        W1=glorot(input_dim, hidden),
        b1=np.zeros(hidden),
        W2=glorot(hidden, d_sem),
        b2=np.zeros(d_sem),
        phi_miss_rel=np.zeros(d_time),
        phi_miss_rec=np.zeros(d_time),
        alpha=0.0,
    )
    params.validate()
    return params


def mlp_forward(X: np.ndarray, params: ScorerParams) -> tuple[np.ndarray, np.ndarray]:
    """Batched MLP: X is (n, input_dim); returns (output, hidden activations)."""
    if X.ndim != 2 or X.shape[1] != params.input_dim:
        raise ValueError(f"expected (n, {params.input_dim}) input, got {X.shape}")
    H = np.tanh(X @ params.W1 + params.b1)
    return H @ params.W2 + params.b2, H


def project_time_aware(
    e_d: np.ndarray, feats: TemporalFeatures, params: ScorerParams
) -> np.ndarray:
    """Map a document embedding plus temporal features into embedding space."""
    if e_d.shape != (params.d_sem,):
        raise ValueError(f"embedding dim {e_d.shape} != ({params.d_sem},)")
    x = np.concatenate(
        [e_d, feats.phi_rel, feats.phi_rec, [float(feats.m_rel), float(feats.m_rec)]]
    )
    out, _ = mlp_forward(x[None, :], params)
    return out[0]


@dataclass(frozen=True)
class ScoredCandidate:
    doc_id: str
    score_sem: float
    score_time: float
    score_final: float
    delta_rel: int | None
    delta_rec: int | None
    m_rel: int
    m_rec: int


def fuse(score_sem: float, score_time: float, alpha: float) -> float:
    gate = sigmoid(alpha)
    return gate * score_sem + (1.0 - gate) * score_time


def score_pair(
    e_q: np.ndarray,
    e_d: np.ndarray,
    feats: TemporalFeatures,
    params: ScorerParams,
) -> tuple[float, float, float]:
    """Return (score_sem, score_time, score_final) for one query/doc pair."""
    score_sem = cosine(e_q, e_d)
    score_time = cosine(e_q, project_time_aware(e_d, feats, params))
    return score_sem, score_time, fuse(score_sem, score_time, params.alpha)


@dataclass(frozen=True)
class RefTimePolicy:
    """How the freshness reference time t_ref is chosen per query.

    ``fixed`` anchors every query to one date (a corpus-wide "today");
    ``query-time`` reuses each query's own t_q as its reference.
    """

    mode: str
    date: PartialDate | None = None

    @classmethod
    def fixed(cls, date: PartialDate) -> RefTimePolicy:
        return cls(mode="fixed", date=date)

    @classmethod
    def query_time(cls) -> RefTimePolicy:
        return cls(mode="query-time")

    def __post_init__(self) -> None:
        if self.mode not in ("fixed", "query-time"):
            raise PolicyError(f"unknown policy mode: {self.mode!r}")
        if self.mode == "fixed" and self.date is None:
            raise PolicyError("fixed policy needs a date")

    def resolve(self, query: Query) -> PartialDate:
        if self.mode == "fixed":
            assert self.date is not None
            return self.date
        if query.t_q is None:
            raise PolicyError(
                f"query {query.query_id!r} has no t_q for query-time policy"
            )
        return query.t_q


def candidate_features(
    query: Query,
    doc: Document,
    cfg: EncodingConfig,
    params: ScorerParams,
    policy: RefTimePolicy | None,
) -> tuple[int | None, int | None, TemporalFeatures]:
    """Compute both day gaps and the stacked temporal features for one pair."""
    clue_times = [doc.t_c] if doc.t_c is not None else None
    t_ref = policy.resolve(query) if policy is not None else None
    return features_for(query.t_q, clue_times, t_ref, doc.t_d, cfg, params)


def _rank_key(cand: ScoredCandidate) -> tuple[float, float, str]:
    return (-cand.score_final, -cand.score_sem, cand.doc_id)


def rerank(
    pool: list[str],
    query: Query,
    docs: dict[str, Document],
    query_vec: np.ndarray,
    doc_store: EmbeddingStore,
    cfg: EncodingConfig,
    params: ScorerParams,
    policy: RefTimePolicy | None,
) -> list[ScoredCandidate]:
    """Score every pool member and sort by fused score.

    Ties break by semantic score, then ascending doc id. ``policy=None``
    disables the freshness channel entirely (no t_ref, so delta_rec is
    treated as missing for every candidate).
    """
    scored = []
    for doc_id in pool:
        if doc_id not in docs:
            raise KeyError(f"pool references unknown document {doc_id!r}")
        doc = docs[doc_id]
        gap_rel, gap_rec, feats = candidate_features(query, doc, cfg, params, policy)
        score_sem, score_time, score_final = score_pair(
            query_vec, doc_store.get(doc_id), feats, params
        )
        scored.append(
            ScoredCandidate(
                doc_id=doc_id,
                score_sem=score_sem,
                score_time=score_time,
                score_final=score_final,
                delta_rel=gap_rel,
                delta_rec=gap_rec,
                m_rel=feats.m_rel,
                m_rec=feats.m_rec,
            )
        )
    scored.sort(key=_rank_key)
    return scored


# --- parameter files -------------------------------------------------------
#
# Binary blob: magic "RE3P", u32 version, u32 d_sem, u32 d_time, u32 hidden,
# then row-major little-endian float64 for W1, b1, W2, b2, phi_miss_rel,
# phi_miss_rec, alpha. A JSON manifest with dims and any training
# hyperparameters is written alongside as <path>.json.


def save_params(
    params: ScorerParams, path: str | Path, manifest: dict | None = None
) -> None:
    params.validate()
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(PARAMS_MAGIC)
        fh.write(struct.pack("<IIII", 1, params.d_sem, params.d_time, params.hidden))
        for _, arr in params.arrays():
            fh.write(arr.astype("<f8").tobytes())
        fh.write(struct.pack("<d", params.alpha))
    meta = {
        "format": "re3-params-v1",
        "d_sem": params.d_sem,
        "d_time": params.d_time,
        "hidden": params.hidden,
        "alpha": params.alpha,
    }
    if manifest:
        meta.update(manifest)
    with open(path.with_name(path.name + ".json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_params(path: str | Path) -> ScorerParams:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != PARAMS_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        version, d_sem, d_time, hidden = struct.unpack("<IIII", fh.read(16))
        if version != 1:
            raise ValueError(f"{path}: unsupported version {version}")
        input_dim = d_sem + 2 * d_time + 2

        def read_array(shape: tuple[int, ...]) -> np.ndarray:
            count = int(np.prod(shape))
            raw = fh.read(8 * count)
            if len(raw) != 8 * count:
                raise ValueError(f"{path}: truncated parameter file")
            return np.frombuffer(raw, dtype="<f8").reshape(shape).copy()

        params = ScorerParams(
            W1=read_array((input_dim, hidden)),
            b1=read_array((hidden,)),
            W2=read_array((hidden, d_sem)),
            b2=read_array((d_sem,)),
            phi_miss_rel=read_array((d_time,)),
            phi_miss_rec=read_array((d_time,)),
            alpha=struct.unpack("<d", fh.read(8))[0],
        )
    params.validate()
    return params
