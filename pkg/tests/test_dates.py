"""Day arithmetic checked against a calendar-stepping oracle.

The oracle advances one calendar day at a time using its own month-length
tables, so it shares no code with the implementation under test.
"""

from __future__ import annotations

import numpy as np
import pytest

from re3.dates import DateError, PartialDate, day_number, interval_gap, interval_of

# --- independent oracle -------------------------------------------------


def _oracle_leap(year: int) -> bool:
    if year % 400 == 0:
        return True
    if year % 100 == 0:
        return False
    return year % 4 == 0


_MONTH_LEN = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]


def _oracle_month_len(year: int, month: int) -> int:
    if month == 2 and _oracle_leap(year):
        return 29
    return _MONTH_LEN[month - 1]


def _oracle_next_day(ymd: tuple[int, int, int]) -> tuple[int, int, int]:
    y, m, d = ymd
    if d < _oracle_month_len(y, m):
        return y, m, d + 1
    if m < 12:
        return y, m + 1, 1
    return y + 1, 1, 1


def _oracle_steps_between(a: tuple[int, int, int], b: tuple[int, int, int]) -> int:
    """Count single-day steps from a up to b (requires a <= b)."""
    steps = 0
    cur = a
    while cur != b:
        cur = _oracle_next_day(cur)
        steps += 1
        assert steps < 10_000, "oracle runaway"
    return steps


def _oracle_interval_gap(a: PartialDate, b: PartialDate) -> int:
    """Brute-force min |x - y| over the interval endpoints of a and b."""
    a_lo, a_hi = interval_of(a)
    b_lo, b_hi = interval_of(b)
    if a_hi >= b_lo and b_hi >= a_lo:
        return 0
    return min(abs(x - y) for x in (a_lo, a_hi) for y in (b_lo, b_hi))


# --- day_number ---------------------------------------------------------


class TestDayNumber:
    def test_epoch_is_day_one(self):
        assert day_number(PartialDate(1, 1, 1)) == 1

    def test_non_leap_february(self):
        d = day_number(PartialDate(2019, 3, 1)) - day_number(PartialDate(2019, 2, 28))
        assert d == 1

    def test_leap_february(self):
        d = day_number(PartialDate(2020, 3, 1)) - day_number(PartialDate(2020, 2, 28))
        assert d == 2

    def test_plain_year_span(self):
        d = day_number(PartialDate(2020, 1, 1)) - day_number(PartialDate(2019, 1, 1))
        assert d == 365

    def test_rejects_partial_input(self):
        with pytest.raises(DateError):
            day_number(PartialDate(2019, 3))

    def test_matches_iteration_oracle_on_random_spans(self):
        """day_number differences equal calendar-step counts (spans <= 5 years)."""
        rng = np.random.default_rng(20240301)
        for _ in range(25):
            y = int(rng.integers(1, 9995))
            m = int(rng.integers(1, 13))
            d = int(rng.integers(1, _oracle_month_len(y, m) + 1))
            span = int(rng.integers(0, 5 * 366))
            a = PartialDate(y, m, d)
            cur = (y, m, d)
            for _ in range(span):
                cur = _oracle_next_day(cur)
            b = PartialDate(*cur)
            assert day_number(b) - day_number(a) == span
            assert _oracle_steps_between((y, m, d), cur) == span


# --- PartialDate validation and serialization ----------------------------


class TestPartialDate:
    def test_rejects_feb_30(self):
        with pytest.raises(DateError, match="day"):
            PartialDate(2019, 2, 30)

    def test_rejects_month_13(self):
        with pytest.raises(DateError, match="month"):
            PartialDate(2019, 13)

    def test_rejects_year_zero(self):
        with pytest.raises(DateError, match="year"):
            PartialDate(0)

    def test_rejects_day_without_month(self):
        with pytest.raises(DateError):
            PartialDate(2019, None, 5)

    def test_accepts_leap_day(self):
        assert PartialDate(2020, 2, 29).is_full

    @pytest.mark.parametrize(
        "text", ["2019", "2019-05", "2019-05-10", "0001-01-01", "9999-12"]
    )
    def test_parse_isoformat_round_trip(self, text):
        assert PartialDate.parse(text).isoformat() == text

    @pytest.mark.parametrize("text", ["19", "2019-5", "2019/05/10", "2019-02-30", ""])
    def test_parse_rejects_malformed(self, text):
        with pytest.raises(DateError):
            PartialDate.parse(text)


# --- interval_of ---------------------------------------------------------


class TestIntervalOf:
    def test_year_only(self):
        lo, hi = interval_of(PartialDate(2019))
        assert lo == day_number(PartialDate(2019, 1, 1))
        assert hi == day_number(PartialDate(2019, 12, 31))

    def test_leap_month(self):
        lo, hi = interval_of(PartialDate(2020, 2))
        assert lo == day_number(PartialDate(2020, 2, 1))
        assert hi == day_number(PartialDate(2020, 2, 29))
        assert hi - lo == 28

    def test_full_date_degenerate(self):
        lo, hi = interval_of(PartialDate(2019, 5, 10))
        assert lo == hi == day_number(PartialDate(2019, 5, 10))


# --- interval_gap --------------------------------------------------------


class TestIntervalGap:
    def test_containment_is_zero(self):
        assert interval_gap(PartialDate(2019), PartialDate(2019, 6, 15)) == 0

    def test_same_month_arithmetic(self):
        assert interval_gap(PartialDate(2020, 3, 10), PartialDate(2020, 3, 1)) == 9

    def test_year_to_next_january(self):
        # 2019-12-31 -> 2020-01-10
        assert interval_gap(PartialDate(2019), PartialDate(2020, 1, 10)) == 10

    def test_year_across_leap_year(self):
        # Oracle: 2019-12-31 -> 2021-01-10 crosses all of leap-year 2020.
        a, b = PartialDate(2019), PartialDate(2021, 1, 10)
        expected = _oracle_interval_gap(a, b)
        assert expected == 376
        assert interval_gap(a, b) == expected

    def test_matches_oracle_on_random_partials(self):
        rng = np.random.default_rng(7)
        dates = []
        for _ in range(60):
            y = int(rng.integers(1900, 2100))
            gran = rng.integers(0, 3)
            if gran == 0:
                dates.append(PartialDate(y))
            elif gran == 1:
                dates.append(PartialDate(y, int(rng.integers(1, 13))))
            else:
                m = int(rng.integers(1, 13))
                dates.append(PartialDate(y, m, int(rng.integers(1, 29))))
        for a in dates[:20]:
            for b in dates[20:40]:
                assert interval_gap(a, b) == _oracle_interval_gap(a, b)

    def test_symmetric(self):
        a, b = PartialDate(1999, 7), PartialDate(2004, 2, 14)
        assert interval_gap(a, b) == interval_gap(b, a)

    def test_self_gap_zero(self):
        for d in (PartialDate(2019), PartialDate(2019, 5), PartialDate(2019, 5, 10)):
            assert interval_gap(d, d) == 0

    def test_triangle_bound_on_full_dates(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            ds = [
                PartialDate(int(rng.integers(1950, 2050)), int(rng.integers(1, 13)), int(rng.integers(1, 29)))
                for _ in range(3)
            ]
            a, b, c = ds
            assert interval_gap(a, c) <= interval_gap(a, b) + interval_gap(b, c)
