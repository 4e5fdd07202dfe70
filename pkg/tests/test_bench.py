"""Tests for the synthetic benchmark generators."""

import numpy as np
import pytest

from re3.bench import (
    BenchError,
    CITIES,
    GenConfig,
    HYB_DISTRACTOR_LAG,
    HYB_DOC_TEMPLATES,
    HYB_GOLD_LAG,
    HYB_QUERY_TEMPLATES,
    REC_DOC_TEMPLATES,
    REC_QUERY_TEMPLATES,
    REL_DOC_TEMPLATES,
    REL_QUERY_TEMPLATES,
    blank_timestamps,
    gen_hyb,
    gen_rec,
    gen_rel,
    generate,
    load_dataset,
    validate_dataset,
    validate_files,
    write_dataset,
)
from re3.data import read_documents, read_queries
from re3.dates import PartialDate, day_number, interval_gap
from re3.extract import extract_dates, primary_date


def small(scenario, **kwargs):
    defaults = dict(scenario=scenario, num_queries=25, cdr=5, seed=11)
    defaults.update(kwargs)
    return generate(GenConfig(**defaults))


class TestConfig:
    def test_rejects_unknown_scenario(self):
        with pytest.raises(BenchError, match="scenario"):
            GenConfig(scenario="nope", num_queries=5)

    def test_rejects_bad_counts(self):
        with pytest.raises(BenchError):
            GenConfig(scenario="rel", num_queries=0)
        with pytest.raises(BenchError):
            GenConfig(scenario="rel", num_queries=5, cdr=0)

    def test_rejects_narrow_year_window(self):
        with pytest.raises(BenchError, match="window"):
            GenConfig(scenario="rel", num_queries=5, year_lo=2020, year_hi=2024)

    def test_rejects_bad_version_range(self):
        with pytest.raises(BenchError, match="extras"):
            GenConfig(scenario="rec", num_queries=5, rec_min_extra=0)
        with pytest.raises(BenchError, match="extras"):
            GenConfig(scenario="rec", num_queries=5, rec_min_extra=4, rec_max_extra=2)

    def test_rejects_unknown_template_pool(self):
        with pytest.raises(BenchError, match="template pool"):
            GenConfig(scenario="rel", num_queries=5, template_pool="alt")

    def test_capacity_error_names_the_shortfall(self):
        cfg = GenConfig(scenario="rel", num_queries=500, n_entities=2,
                        year_lo=2010, year_hi=2016)
        with pytest.raises(BenchError, match="pool too small"):
            gen_rel(cfg)

    def test_scenario_dispatch_guard(self):
        with pytest.raises(BenchError, match="gen_rec"):
            gen_rec(GenConfig(scenario="rel", num_queries=5))


class TestTemplatePools:
    def test_each_role_has_at_least_eight_templates(self):
        for pool in (REL_DOC_TEMPLATES, REL_QUERY_TEMPLATES, REC_DOC_TEMPLATES,
                     REC_QUERY_TEMPLATES, HYB_DOC_TEMPLATES, HYB_QUERY_TEMPLATES):
            assert len(pool) >= 8
            assert len(set(pool)) == len(pool)

    def test_city_names_are_not_substrings_of_each_other(self):
        for a in CITIES:
            for b in CITIES:
                if a != b:
                    assert a not in b


class TestRel:
    def test_counts_and_validation(self):
        ds = small("rel")
        assert len(ds.queries) == 25
        assert len(ds.documents) == 25 * 6
        assert validate_dataset(ds) == []

    def test_gold_matches_year_confusers_do_not(self):
        ds = small("rel")
        docs = {d.doc_id: d for d in ds.documents}
        for q in ds.queries:
            assert interval_gap(q.t_q, docs[q.gold].t_c) == 0
            group = [d for d in ds.documents
                     if d.doc_id.startswith(q.query_id) and d.doc_id != q.gold]
            assert len(group) == 5
            # Year intervals measure endpoint to endpoint: adjacent years gap
            # to one day, a three-year shift to a bit over two years.
            for doc in group:
                gap = interval_gap(q.t_q, doc.t_c)
                assert 1 <= gap <= 2 * 366 + 1

    def test_texts_embed_their_year(self):
        ds = small("rel")
        for d in ds.documents:
            assert primary_date(extract_dates(d.text)) == d.t_c
        for q in ds.queries:
            assert primary_date(extract_dates(q.text)) == q.t_q

    def test_docs_carry_no_publication_date(self):
        assert all(d.t_d is None for d in small("rel").documents)


class TestRec:
    def test_versions_share_meaning_differ_in_date(self):
        ds = small("rec")
        assert validate_dataset(ds) == []
        for q in ds.queries:
            group = sorted(
                (d for d in ds.documents if d.doc_id.startswith(q.query_id)),
                key=lambda d: day_number(d.t_d),
            )
            assert 3 <= len(group) <= 5
            assert group[-1].doc_id == q.gold
            stamps = [day_number(d.t_d) for d in group]
            assert len(set(stamps)) == len(stamps)

    def test_queries_have_no_anchor_time(self):
        assert all(q.t_q is None for q in small("rec").queries)

    def test_texts_mention_no_dates(self):
        ds = small("rec")
        for d in ds.documents:
            assert extract_dates(d.text).dates == []
        for q in ds.queries:
            assert extract_dates(q.text).dates == []

    def test_frozen_regression(self):
        ds = generate(GenConfig(scenario="rec", num_queries=100, seed=20240915))
        assert len(ds.documents) == 395
        assert ds.manifest["checksum"] == (
            "716990361b6bb385c08bb6b65633722c2d7cc06e64c10c34bff51d44f9619098"
        )


class TestHyb:
    def test_counts_and_validation(self):
        ds = small("hyb")
        assert len(ds.documents) == 25 * 6
        assert validate_dataset(ds) == []

    def test_gold_is_freshest_among_its_city_and_date_twins(self):
        ds = small("hyb")
        docs = {d.doc_id: d for d in ds.documents}
        for q in ds.queries:
            gold = docs[q.gold]
            assert gold.t_c == q.t_q
            lag = day_number(q.t_q) - day_number(gold.t_d)
            assert HYB_GOLD_LAG[0] <= lag <= HYB_GOLD_LAG[1]
            same_city = next(c for c in CITIES if c in gold.text)
            for rival in ds.documents:
                if rival.doc_id != q.gold and rival.t_c == q.t_q \
                        and same_city in rival.text:
                    assert day_number(rival.t_d) < day_number(gold.t_d)

    def test_distractors_are_fresh_but_misaligned(self):
        ds = small("hyb")
        for q in ds.queries:
            for d in ds.documents:
                if not d.doc_id.startswith(q.query_id + "-"):
                    continue
                kind = d.doc_id.rsplit("-", 1)[1]
                lag = day_number(d.t_c) - day_number(d.t_d)
                if kind.startswith(("near", "city")):
                    assert HYB_DISTRACTOR_LAG[0] <= lag <= HYB_DISTRACTOR_LAG[1]
                if kind.startswith("near"):
                    assert 1 <= abs(day_number(d.t_c) - day_number(q.t_q)) <= 3
                if kind.startswith("city"):
                    assert d.t_c == q.t_q

    def test_texts_embed_target_date_only(self):
        ds = small("hyb")
        for d in ds.documents:
            found = extract_dates(d.text)
            assert primary_date(found) == d.t_c
            assert all(date == d.t_c for date in found.dates)
        for q in ds.queries:
            assert primary_date(extract_dates(q.text)) == q.t_q

    def test_frozen_regression(self):
        ds = generate(GenConfig(scenario="hyb", num_queries=100, seed=20240915))
        assert len(ds.documents) == 600
        assert ds.manifest["checksum"] == (
            "183acbe3a8e0583b514e8248a31cd6ffa3ed65f9128493b73accfde5b8643156"
        )


class TestSerialization:
    def test_round_trip(self, tmp_path):
        ds = small("hyb", num_queries=10)
        write_dataset(ds, tmp_path)
        docs = read_documents(tmp_path / "docs.jsonl")
        queries = read_queries(tmp_path / "queries.jsonl")
        assert docs == ds.documents
        assert queries == ds.queries
        loaded = load_dataset(tmp_path)
        assert loaded.manifest == ds.manifest
        assert validate_files(tmp_path) == []

    def test_same_config_same_bytes(self, tmp_path):
        cfg = GenConfig(scenario="rel", num_queries=15, seed=4)
        a, b = tmp_path / "a", tmp_path / "b"
        write_dataset(generate(cfg), a)
        write_dataset(generate(cfg), b)
        for name in ("docs.jsonl", "queries.jsonl", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_different_seed_different_checksum(self):
        a = generate(GenConfig(scenario="rec", num_queries=10, seed=1))
        b = generate(GenConfig(scenario="rec", num_queries=10, seed=2))
        assert a.manifest["checksum"] != b.manifest["checksum"]

    def test_manifest_echoes_config(self):
        cfg = GenConfig(scenario="rec", num_queries=10, seed=9, cdr=4)
        ds = generate(cfg)
        assert ds.manifest["config"]["seed"] == 9
        assert ds.manifest["config"]["scenario"] == "rec"
        assert ds.manifest["counts"]["queries"] == 10


class TestValidator:
    def test_flags_tampered_gold(self):
        ds = small("rel", num_queries=5)
        bad = ds.queries[0]
        ds.queries[0] = type(bad)(bad.query_id, bad.text, gold=ds.queries[1].gold,
                                  scenario="rel", t_q=bad.t_q)
        problems = validate_dataset(ds)
        assert any("not unique" in p for p in problems)

    def test_flags_checksum_drift(self):
        ds = small("rec", num_queries=5)
        ds.manifest["checksum"] = "0" * 64
        assert any("checksum" in p for p in validate_dataset(ds))

    def test_flags_stale_newer_than_gold(self):
        ds = small("hyb", num_queries=5)
        docs = {d.doc_id: d for d in ds.documents}
        gold = docs[ds.queries[0].gold]
        stale_id = next(d.doc_id for d in ds.documents
                        if d.doc_id.startswith(ds.queries[0].query_id + "-stale"))
        idx = next(i for i, d in enumerate(ds.documents) if d.doc_id == stale_id)
        fresh = PartialDate(gold.t_d.year + 1, 1, 15)
        ds.documents[idx] = type(gold)(stale_id, ds.documents[idx].text,
                                       t_c=ds.documents[idx].t_c, t_d=fresh)
        problems = validate_dataset(ds)
        assert any("freshness" in p or "checksum" in p for p in problems)
        assert any("freshness" in p for p in problems)


class TestBlankTimestamps:
    def test_blanks_requested_fraction(self):
        ds = small("rec", num_queries=30)
        dated = sum(d.t_d is not None for d in ds.documents)
        blanked = blank_timestamps(ds.documents, 0.3, seed=5)
        remaining = sum(d.t_d is not None for d in blanked)
        assert dated - remaining == round(0.3 * dated)

    def test_only_t_d_is_touched(self):
        ds = small("hyb", num_queries=10)
        blanked = blank_timestamps(ds.documents, 0.5, seed=5)
        for before, after in zip(ds.documents, blanked):
            assert after.doc_id == before.doc_id
            assert after.text == before.text
            assert after.t_c == before.t_c

    def test_deterministic_and_bounded(self):
        ds = small("rec", num_queries=10)
        a = blank_timestamps(ds.documents, 0.3, seed=5)
        b = blank_timestamps(ds.documents, 0.3, seed=5)
        assert a == b
        assert blank_timestamps(ds.documents, 0.0, seed=5) == ds.documents
        with pytest.raises(ValueError, match="fraction"):
            blank_timestamps(ds.documents, 1.5, seed=5)

    def test_full_blanking(self):
        ds = small("rec", num_queries=10)
        assert all(d.t_d is None for d in blank_timestamps(ds.documents, 1.0, seed=5))


class TestExtractionFuzz:
    def test_extraction_never_crashes_on_generated_text(self):
        rng = np.random.default_rng(0)
        corpus = []
        for scen in ("rel", "rec", "hyb"):
            ds = small(scen, num_queries=10)
            corpus.extend(d.text for d in ds.documents)
            corpus.extend(q.text for q in ds.queries)
        for text in corpus:
            chars = list(text)
            k = int(rng.integers(0, 3))
            for _ in range(k):
                pos = int(rng.integers(0, len(chars)))
                chars[pos] = chr(int(rng.integers(32, 127)))
            extract_dates("".join(chars))
