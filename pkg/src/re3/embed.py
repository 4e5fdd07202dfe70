"""Semantic embeddings: a deterministic hashing embedder plus vector stores.

The built-in embedder hashes character 3-grams of lowercased text into
signed buckets and L2-normalizes, so desk-scale experiments need no
pretrained model. Real encoder output can be swapped in through the same
store via the text or binary vector file formats.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from re3.dates import PartialDate

BINARY_MAGIC = b"RE3V"
_NORM_GUARD = 1e-12


class StoreError(ValueError):
    """Raised for malformed or inconsistent embedding stores."""


def toy_embed(text: str, dim: int, seed: int) -> np.ndarray:
    """Hash character 3-grams of lowercased text into a unit vector.

    Fully deterministic in (text, dim, seed). Texts with no 3-grams, or
    whose signed counts cancel exactly, map to the first basis vector.
    """
    if dim < 8:
        raise ValueError(f"dim must be >= 8, got {dim}")
    lowered = text.lower()
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    vec = np.zeros(dim)
    for i in range(len(lowered) - 2):
        gram = lowered[i : i + 3].encode("utf-8")
        h = int.from_bytes(
            hashlib.blake2b(gram, key=key, digest_size=8).digest(), "little"
        )
        sign = 1.0 if h & (1 << 63) == 0 else -1.0
        vec[h % dim] += sign
    norm = float(np.linalg.norm(vec))
    if norm < _NORM_GUARD:
        vec = np.zeros(dim)
        vec[0] = 1.0
        return vec
    return vec / norm


def append_timestamp_tag(text: str, t_d: PartialDate | None) -> str:
    """Append a publication-time tag so a text-only ranker can see it."""
    if t_d is None:
        return text
    return f"{text} (proposed on {t_d.isoformat()})"


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity with a zero-norm guard returning 0."""
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu < _NORM_GUARD or nv < _NORM_GUARD:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


@dataclass
class EmbeddingStore:
    """Immutable-after-build map from text id to a fixed-dimension vector."""

    dim: int | None = None
    _vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, text_id: str) -> bool:
        return text_id in self._vectors

    def ids(self) -> list[str]:
        return list(self._vectors)

    def get(self, text_id: str) -> np.ndarray:
        try:
            return self._vectors[text_id]
        except KeyError:
            raise StoreError(f"unknown id: {text_id!r}") from None

    def add(self, text_id: str, vector: np.ndarray) -> None:
        if text_id in self._vectors:
            raise StoreError(f"duplicate id: {text_id!r}")
        vector = np.asarray(vector, dtype=float)
        if not np.all(np.isfinite(vector)):
            raise StoreError(f"non-finite vector for id {text_id!r}")
        if self.dim is None:
            self.dim = int(vector.shape[0])
        elif vector.shape != (self.dim,):
            raise StoreError(
                f"id {text_id!r} has dimension {vector.shape[0]}, expected {self.dim}"
            )
        self._vectors[text_id] = vector

    def matrix(self, ids: list[str]) -> np.ndarray:
        return np.stack([self.get(i) for i in ids])


def embed_texts(
    items: list[tuple[str, str]], dim: int, seed: int
) -> EmbeddingStore:
    """Embed (id, text) pairs with the hashing embedder."""
    store = EmbeddingStore()
    for text_id, text in items:
        store.add(text_id, toy_embed(text, dim, seed))
    return store


# --- file formats ---------------------------------------------------------
#
# Text:   one record per line, "<id>\t<v1> <v2> ... <vd>", decimal floats.
# Binary: magic "RE3V", u32 version, u32 dim, u64 count, then per record
#         u16 id byte-length, utf-8 id, dim little-endian float32 values.


def save_store_text(store: EmbeddingStore, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for text_id in store.ids():
            values = " ".join(repr(float(x)) for x in store.get(text_id))
            fh.write(f"{text_id}\t{values}\n")


def save_store_binary(store: EmbeddingStore, path: str | Path) -> None:
    dim = store.dim or 0
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<IIQ", 1, dim, len(store)))
        for text_id in store.ids():
            raw = text_id.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(store.get(text_id).astype("<f4").tobytes())


def load_store(path: str | Path) -> EmbeddingStore:
    """Load a store from either file format (sniffed by magic bytes)."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == BINARY_MAGIC:
        return _load_binary(path)
    return _load_text(path)


def _load_text(path: Path) -> EmbeddingStore:
    store = EmbeddingStore()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                text_id, values = line.split("\t", 1)
                vector = np.array([float(x) for x in values.split()])
            except ValueError as exc:
                raise StoreError(f"{path}:{lineno}: malformed record: {exc}") from None
            try:
                store.add(text_id, vector)
            except StoreError as exc:
                raise StoreError(f"{path}:{lineno}: {exc}") from None
    return store


def _load_binary(path: Path) -> EmbeddingStore:
    store = EmbeddingStore()
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != BINARY_MAGIC:
            raise StoreError(f"{path}: bad magic {magic!r}")
        version, dim, count = struct.unpack("<IIQ", fh.read(16))
        if version != 1:
            raise StoreError(f"{path}: unsupported version {version}")
        for _ in range(count):
            (id_len,) = struct.unpack("<H", fh.read(2))
            text_id = fh.read(id_len).decode("utf-8")
            raw = fh.read(4 * dim)
            if len(raw) != 4 * dim:
                raise StoreError(f"{path}: truncated record for id {text_id!r}")
            store.add(text_id, np.frombuffer(raw, dtype="<f4").astype(float))
    return store
