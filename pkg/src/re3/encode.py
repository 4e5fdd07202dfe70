"""Day-gap computation and multi-frequency sinusoidal gap encoding.

A scalar day gap Δ is mapped to a d-dimensional feature vector over a
geometric ladder of periods f_i = base^(2i/d), i = 0..d/2-1:

    values[2i]   = sin(Δ / f_i)
    values[2i+1] = cos(Δ / f_i)

so a zero gap encodes as [0, 1, 0, 1, ...]. Two gaps feed the scorer:
the alignment gap between the query time and a document's clue times,
and the freshness gap between the reference time and the publication
time. When a gap is unavailable the encoding is replaced by a learnable
missing embedding and the matching missing flag is set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from re3.dates import PartialDate, interval_gap

# Gaps beyond 10,000 years are data errors; clamp to bound sinusoid arguments.
GAP_CLAMP_DAYS = 3_652_500


# Feature modes: "fourier" is the real encoding; "scalar" repeats the raw
# day gap (ablation strawman); "bge-diff" subtracts text embeddings of the
# two rendered timestamps (ablation strawman).
MODES = ("fourier", "scalar", "bge-diff")


@dataclass(frozen=True)
class EncodingConfig:
    """Sinusoidal encoding shape: even dimension and period-ladder base.

    ``missing_aware=False`` is an ablation switch: absent gaps then encode
    as plain zeros with both flags forced to 0, instead of the learnable
    missing embeddings. ``mode`` picks the feature family; the non-default
    modes exist only to quantify how much the sinusoidal design matters.
    """

    dim: int
    base: float = 3.0
    missing_aware: bool = True
    mode: str = "fourier"
    embed_seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 2 or self.dim % 2 != 0:
            raise ValueError(f"dim must be even and >= 2, got {self.dim}")
        if not self.base > 1.0:
            raise ValueError(f"base must be > 1, got {self.base}")
        if self.mode not in MODES:
            raise ValueError(f"unknown feature mode: {self.mode!r}")
        if self.mode == "bge-diff" and self.dim < 8:
            raise ValueError("bge-diff mode needs dim >= 8 for the text embedder")

    def periods(self) -> np.ndarray:
        """Geometric period ladder f_i = base^(2i/dim), length dim/2."""
        i = np.arange(self.dim // 2)
        return self.base ** (2.0 * i / self.dim)


@dataclass
class TemporalFeatures:
    """Encoded alignment/freshness features with their missing flags."""

    phi_rel: np.ndarray
    phi_rec: np.ndarray
    m_rel: int
    m_rec: int


def relevance_gap(
    t_q: PartialDate | None, t_c: list[PartialDate] | None
) -> int | None:
    """Minimum day gap between the query time and any clue time.

    None (meaning: missing) when the query has no time constraint or the
    document has no clue times.
    """
    if t_q is None or not t_c:
        return None
    return min(interval_gap(t_q, tau) for tau in t_c)


def recency_gap(t_ref: PartialDate, t_d: PartialDate | None) -> int | None:
    """Day gap between the reference time and the publication time.

    None when the publication time is missing.
    """
    if t_d is None:
        return None
    return interval_gap(t_ref, t_d)


def fourier_encode(delta: int, cfg: EncodingConfig) -> np.ndarray:
    """Encode a non-negative day gap as interleaved sin/cos features."""
    d = min(max(int(delta), 0), GAP_CLAMP_DAYS)
    args = d / cfg.periods()
    out = np.empty(cfg.dim)
    out[0::2] = np.sin(args)
    out[1::2] = np.cos(args)
    return out


def encode_gap(delta: int, cfg: EncodingConfig) -> np.ndarray:
    """Encode one present gap under the configured feature mode."""
    if cfg.mode == "scalar":
        return np.full(cfg.dim, float(min(max(int(delta), 0), GAP_CLAMP_DAYS)))
    return fourier_encode(delta, cfg)


def _timestamp_diff(a: PartialDate, b: PartialDate, cfg: EncodingConfig) -> np.ndarray:
    from re3.embed import toy_embed

    return toy_embed(a.isoformat(), cfg.dim, cfg.embed_seed) - toy_embed(
        b.isoformat(), cfg.dim, cfg.embed_seed
    )


def _check_phi_miss(cfg: EncodingConfig, params) -> None:
    for name in ("phi_miss_rel", "phi_miss_rec"):
        vec = getattr(params, name)
        if vec.shape != (cfg.dim,):
            raise ValueError(f"{name} has shape {vec.shape}, expected ({cfg.dim},)")


def _missing(cfg: EncodingConfig, phi_miss: np.ndarray) -> tuple[np.ndarray, int]:
    if cfg.missing_aware:
        return phi_miss, 1
    return np.zeros(cfg.dim), 0


def build_features(
    gap_rel: int | None, gap_rec: int | None, cfg: EncodingConfig, params
) -> TemporalFeatures:
    """Encode both gaps, substituting the learnable missing embeddings.

    ``params`` supplies ``phi_miss_rel`` / ``phi_miss_rec`` vectors of
    length ``cfg.dim``. A present gap goes through the configured encoding
    with flag 0; an absent gap takes the missing embedding with flag 1.
    """
    _check_phi_miss(cfg, params)
    if cfg.mode == "bge-diff":
        raise ValueError("bge-diff features require dates; use features_for")

    def one(gap: int | None, phi_miss: np.ndarray) -> tuple[np.ndarray, int]:
        if gap is not None:
            return encode_gap(gap, cfg), 0
        return _missing(cfg, phi_miss)

    phi_rel, m_rel = one(gap_rel, params.phi_miss_rel)
    phi_rec, m_rec = one(gap_rec, params.phi_miss_rec)
    return TemporalFeatures(phi_rel=phi_rel, phi_rec=phi_rec, m_rel=m_rel, m_rec=m_rec)


def features_for(
    t_q: PartialDate | None,
    t_c: list[PartialDate] | None,
    t_ref: PartialDate | None,
    t_d: PartialDate | None,
    cfg: EncodingConfig,
    params,
) -> tuple[int | None, int | None, TemporalFeatures]:
    """Gaps plus features straight from the timestamps of a query/doc pair.

    This is the general entry point: it also serves the embedder-difference
    mode, which needs the dates themselves rather than their gap. ``t_ref``
    None disables the freshness channel (treated as a missing gap).
    """
    gap_rel = relevance_gap(t_q, t_c)
    gap_rec = recency_gap(t_ref, t_d) if t_ref is not None else None
    if cfg.mode != "bge-diff":
        return gap_rel, gap_rec, build_features(gap_rel, gap_rec, cfg, params)

    _check_phi_miss(cfg, params)
    if gap_rel is None:
        phi_rel, m_rel = _missing(cfg, params.phi_miss_rel)
    else:
        # Encode against the clue time nearest the query time.
        tau = min(t_c, key=lambda t: (interval_gap(t_q, t), t))
        phi_rel, m_rel = _timestamp_diff(t_q, tau, cfg), 0
    if gap_rec is None:
        phi_rec, m_rec = _missing(cfg, params.phi_miss_rec)
    else:
        phi_rec, m_rec = _timestamp_diff(t_ref, t_d, cfg), 0
    return gap_rel, gap_rec, TemporalFeatures(
        phi_rel=phi_rel, phi_rec=phi_rec, m_rel=m_rel, m_rec=m_rec
    )
