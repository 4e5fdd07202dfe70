"""Sinusoidal gap encoding against an extended-precision oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pytest
from mpmath import mp, mpf
import mpmath

from re3.dates import PartialDate
from re3.encode import (
    GAP_CLAMP_DAYS,
    EncodingConfig,
    build_features,
    fourier_encode,
    recency_gap,
    relevance_gap,
)


def oracle_fourier(delta: int, dim: int, base: float) -> np.ndarray:
    """Evaluate the interleaved sin/cos features at 30 significant digits."""
    mp.dps = 30
    out = np.empty(dim)
    for i in range(dim // 2):
        f = mpmath.power(mpf(base), mpf(2 * i) / dim)
        arg = mpf(int(delta)) / f
        out[2 * i] = float(mpmath.sin(arg))
        out[2 * i + 1] = float(mpmath.cos(arg))
    return out


@dataclass
class _MissStub:
    phi_miss_rel: np.ndarray = field(default_factory=lambda: np.full(4, 7.0))
    phi_miss_rec: np.ndarray = field(default_factory=lambda: np.full(4, -7.0))


class TestConfig:
    @pytest.mark.parametrize("dim", [0, 1, 3, -2])
    def test_rejects_bad_dim(self, dim):
        with pytest.raises(ValueError):
            EncodingConfig(dim=dim)

    @pytest.mark.parametrize("base", [1.0, 0.5, -3.0])
    def test_rejects_bad_base(self, base):
        with pytest.raises(ValueError):
            EncodingConfig(dim=4, base=base)

    def test_periods_geometric_and_increasing(self):
        cfg = EncodingConfig(dim=16, base=3.0)
        f = cfg.periods()
        ratio = 3.0 ** (2.0 / 16)
        assert np.all(np.diff(f) > 0)
        np.testing.assert_allclose(f[1:] / f[:-1], ratio, rtol=1e-12)
        assert ratio > 1.0


class TestFourierEncode:
    def test_zero_gap_pattern_exact(self):
        out = fourier_encode(0, EncodingConfig(dim=8))
        assert np.array_equal(out, np.array([0.0, 1.0] * 4))

    def test_unit_gap_dim4_base3(self):
        out = fourier_encode(1, EncodingConfig(dim=4, base=3.0))
        expected = oracle_fourier(1, 4, 3.0)
        # expected == [sin 1, cos 1, sin 3^(-1/2), cos 3^(-1/2)]
        np.testing.assert_allclose(out, expected, atol=1e-12, rtol=0)

    def test_year_gap_single_frequency(self):
        out = fourier_encode(365, EncodingConfig(dim=2, base=3.0))
        np.testing.assert_allclose(
            out, oracle_fourier(365, 2, 3.0), atol=1e-12, rtol=0
        )

    def test_random_triples_match_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            delta = int(rng.integers(0, 3651))
            dim = int(rng.choice([2, 4, 8, 16, 32, 64]))
            base = float(rng.uniform(1.5, 10.0))
            cfg = EncodingConfig(dim=dim, base=base)
            np.testing.assert_allclose(
                fourier_encode(delta, cfg),
                oracle_fourier(delta, dim, base),
                atol=1e-12,
                rtol=0,
            )

    def test_unit_circle_identity(self):
        cfg = EncodingConfig(dim=32)
        for delta in [0, 1, 17, 365, 10_000, 999_983, 10**6]:
            out = fourier_encode(delta, cfg)
            pairs = out.reshape(-1, 2)
            np.testing.assert_allclose(
                pairs[:, 0] ** 2 + pairs[:, 1] ** 2, 1.0, atol=1e-12, rtol=0
            )
            assert np.all(np.abs(out) <= 1.0 + 1e-15)

    def test_fine_scale_injectivity(self):
        cfg = EncodingConfig(dim=8)
        seen = {fourier_encode(g, cfg).tobytes() for g in range(1001)}
        assert len(seen) == 1001

    def test_clamp_bounds_huge_gaps(self):
        cfg = EncodingConfig(dim=4)
        huge = fourier_encode(GAP_CLAMP_DAYS + 10**9, cfg)
        np.testing.assert_array_equal(huge, fourier_encode(GAP_CLAMP_DAYS, cfg))


class TestGaps:
    def test_relevance_gap_takes_min_over_clue_times(self):
        got = relevance_gap(
            PartialDate(2020, 3, 10),
            [PartialDate(2020, 3, 1), PartialDate(2020, 4, 1)],
        )
        assert got == 9

    def test_relevance_gap_year_containment(self):
        assert relevance_gap(PartialDate(2019), [PartialDate(2019, 6, 15)]) == 0

    def test_relevance_gap_missing(self):
        assert relevance_gap(PartialDate(2019), None) is None
        assert relevance_gap(PartialDate(2019), []) is None
        assert relevance_gap(None, [PartialDate(2019)]) is None

    def test_recency_gap(self):
        t_ref = PartialDate(2025, 1, 1)
        assert recency_gap(t_ref, PartialDate(2024, 12, 31)) == 1
        assert recency_gap(t_ref, PartialDate(2025, 1, 1)) == 0
        assert recency_gap(t_ref, None) is None


class TestBuildFeatures:
    def test_both_present(self):
        cfg = EncodingConfig(dim=4)
        f = build_features(0, 0, cfg, _MissStub())
        assert f.m_rel == f.m_rec == 0
        np.testing.assert_array_equal(f.phi_rel, [0.0, 1.0, 0.0, 1.0])
        np.testing.assert_array_equal(f.phi_rec, [0.0, 1.0, 0.0, 1.0])

    def test_missing_substitution_skips_sinusoid(self):
        # Stub embeddings sit outside [-1, 1], so any sinusoid output would differ.
        cfg = EncodingConfig(dim=4)
        f = build_features(None, 5, cfg, _MissStub())
        assert (f.m_rel, f.m_rec) == (1, 0)
        np.testing.assert_array_equal(f.phi_rel, np.full(4, 7.0))
        assert np.all(np.abs(f.phi_rec) <= 1.0)

    def test_both_missing(self):
        f = build_features(None, None, EncodingConfig(dim=4), _MissStub())
        assert (f.m_rel, f.m_rec) == (1, 1)
        np.testing.assert_array_equal(f.phi_rel, np.full(4, 7.0))
        np.testing.assert_array_equal(f.phi_rec, np.full(4, -7.0))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="phi_miss_rel"):
            build_features(1, 1, EncodingConfig(dim=8), _MissStub())


class TestMissingAwareOff:
    def test_absent_gaps_become_zeros_with_flags_off(self):
        cfg = EncodingConfig(dim=8, missing_aware=False)
        stub = _MissStub(phi_miss_rel=np.full(8, 7.0), phi_miss_rec=np.full(8, -7.0))
        feats = build_features(None, None, cfg, stub)
        assert np.array_equal(feats.phi_rel, np.zeros(8))
        assert np.array_equal(feats.phi_rec, np.zeros(8))
        assert feats.m_rel == 0
        assert feats.m_rec == 0

    def test_present_gaps_unaffected(self):
        stub = _MissStub(phi_miss_rel=np.full(8, 7.0), phi_miss_rec=np.full(8, -7.0))
        on = build_features(12, 3, EncodingConfig(dim=8), stub)
        off = build_features(12, 3, EncodingConfig(dim=8, missing_aware=False), stub)
        assert np.array_equal(on.phi_rel, off.phi_rel)
        assert np.array_equal(on.phi_rec, off.phi_rec)
