"""Exact top-k retrieval over an embedding store.

Desk-scale corpora are scanned exhaustively; scores are cosine
similarities and ties break on ascending document id so results are
reproducible regardless of insertion order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from re3.embed import EmbeddingStore, _NORM_GUARD


@dataclass(frozen=True)
class SearchHit:
    doc_id: str
    score: float


def top_k(query_vec: np.ndarray, store: EmbeddingStore, k: int) -> list[SearchHit]:
    """Return the k highest-cosine documents (fewer if the store is smaller)."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k == 0 or len(store) == 0:
        return []
    # Sorted ids fix the matmul summation layout, so scores do not depend
    # on store insertion order.
    ids = sorted(store.ids())
    mat = store.matrix(ids)
    norms = np.linalg.norm(mat, axis=1)
    qnorm = float(np.linalg.norm(query_vec))
    if qnorm < _NORM_GUARD:
        scores = np.zeros(len(ids))
    else:
        safe = np.where(norms < _NORM_GUARD, 1.0, norms)
        scores = (mat @ query_vec) / (safe * qnorm)
        scores[norms < _NORM_GUARD] = 0.0
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return [SearchHit(ids[i], float(scores[i])) for i in order[:k]]


def retrieve_pools(
    query_store: EmbeddingStore, doc_store: EmbeddingStore, k: int
) -> dict[str, list[SearchHit]]:
    """Run top-k retrieval for every query; queries are processed in id order."""
    return {qid: top_k(query_store.get(qid), doc_store, k) for qid in sorted(query_store.ids())}
