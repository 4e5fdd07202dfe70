from __future__ import annotations

import numpy as np
import pytest

from re3.dates import PartialDate
from re3.extract import ExtractionResult, extract_dates, primary_date, render_date


class TestGrammar:
    def test_day_month_year(self):
        r = extract_dates("She moved there on 12 March 2019.")
        assert r.dates == [PartialDate(2019, 3, 12)]
        assert r.has_year

    def test_no_dates(self):
        r = extract_dates("no dates here")
        assert r.dates == [] and not r.has_year

    def test_document_order(self):
        r = extract_dates("Forecast issued March 2024 for 2024-03-15.")
        assert r.dates == [PartialDate(2024, 3), PartialDate(2024, 3, 15)]

    def test_month_day_year(self):
        assert extract_dates("Due March 15, 2024.").dates == [PartialDate(2024, 3, 15)]
        assert extract_dates("Due March 15 2024.").dates == [PartialDate(2024, 3, 15)]

    def test_in_year(self):
        assert extract_dates("It happened in 2019.").dates == [PartialDate(2019)]

    def test_bare_year_range_limits(self):
        assert extract_dates("year 1000 ok").dates == [PartialDate(1000)]
        assert extract_dates("year 2999 ok").dates == [PartialDate(2999)]
        assert extract_dates("year 0999 out").dates == []
        assert extract_dates("year 3000 out").dates == []

    def test_bare_year_needs_non_numeric_context(self):
        assert extract_dates("ID 20190301").dates == []
        assert extract_dates("12345").dates == []
        assert extract_dates("range 2023-2024").dates == [
            PartialDate(2023),
            PartialDate(2024),
        ]

    def test_case_insensitive_months_and_abbreviations(self):
        assert extract_dates("MARCH 2019").dates == [PartialDate(2019, 3)]
        assert extract_dates("mar 2019").dates == [PartialDate(2019, 3)]
        assert extract_dates("3 sep 2021").dates == [PartialDate(2021, 9, 3)]

    def test_duplicates_preserved(self):
        assert extract_dates("2019 and again 2019").dates == [
            PartialDate(2019),
            PartialDate(2019),
        ]

    def test_invalid_component_skips_match(self):
        assert extract_dates("logged 2024-13-01 by bot").dates == []
        assert extract_dates("on 30 February 2019 maybe").dates == []
        assert extract_dates("2024-02-30").dates == []

    def test_multiple_forms_in_one_text(self):
        r = extract_dates("From 2019-01-02 to 3 April 2020, then May 2021 and 1999.")
        assert r.dates == [
            PartialDate(2019, 1, 2),
            PartialDate(2020, 4, 3),
            PartialDate(2021, 5),
            PartialDate(1999),
        ]


class TestPrimaryDate:
    def test_first_in_document_order(self):
        r = ExtractionResult(
            dates=[PartialDate(2024, 3), PartialDate(2024, 3, 15)], has_year=True
        )
        assert primary_date(r) == PartialDate(2024, 3)

    def test_empty(self):
        assert primary_date(ExtractionResult()) is None

    def test_years_only(self):
        r = ExtractionResult(dates=[PartialDate(1998), PartialDate(2003)], has_year=True)
        assert primary_date(r) == PartialDate(1998)


class TestRenderRoundTrip:
    @pytest.mark.parametrize("style", ["dmy", "mdy", "iso"])
    def test_random_dates_round_trip(self, style):
        rng = np.random.default_rng(314)
        for _ in range(150):
            y = int(rng.integers(1000, 3000))
            gran = int(rng.integers(0, 3))
            if gran == 0:
                d = PartialDate(y)
            elif gran == 1:
                d = PartialDate(y, int(rng.integers(1, 13)))
            else:
                d = PartialDate(y, int(rng.integers(1, 13)), int(rng.integers(1, 29)))
            text = render_date(d, style=style)
            r = extract_dates(text)
            assert r.dates == [d], f"{text!r} -> {r.dates}"

    def test_render_embedded_in_sentence(self):
        d = PartialDate(2019, 3, 12)
        r = extract_dates(f"She moved there on {render_date(d)}.")
        assert r.dates == [d]


class TestFuzz:
    def test_never_crashes_on_arbitrary_unicode(self):
        rng = np.random.default_rng(999)
        for _ in range(1000):
            n = int(rng.integers(0, 80))
            cps = rng.integers(1, 0x10000, size=n)
            text = "".join(chr(int(c)) for c in cps if not (0xD800 <= c < 0xE000))
            r = extract_dates(text)
            assert r.has_year == bool(r.dates)

    def test_empty_string(self):
        assert extract_dates("").dates == []
