"""Calendar dates at year/month/day granularity and exact day arithmetic.

A partial date denotes a closed interval of days: a bare year covers
Jan 1 through Dec 31, a year-month covers the whole month, and a full
date is a single day. Gaps between two partial dates are measured as the
minimum absolute day difference between their intervals, so a date that
falls inside a coarser one has gap 0.

All arithmetic is proleptic Gregorian with day numbers counted from
0001-01-01 = day 1. No time zones, no sub-day resolution.
"""

from __future__ import annotations

import datetime as _dt
import re
from dataclasses import dataclass

_ISO_RE = re.compile(r"^(\d{4})(?:-(\d{2})(?:-(\d{2}))?)?$")


class DateError(ValueError):
    """Raised for structurally or calendar-invalid dates."""


def is_leap_year(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def days_in_month(year: int, month: int) -> int:
    if month == 2:
        return 29 if is_leap_year(year) else 28
    return 31 if month in (1, 3, 5, 7, 8, 10, 12) else 30


@dataclass(frozen=True, order=True)
class PartialDate:
    """A calendar date known down to year, month, or day granularity.

    ``day`` requires ``month``; fully specified dates must be valid
    proleptic-Gregorian calendar dates (Feb 30 is rejected).
    """

    year: int
    month: int | None = None
    day: int | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.year <= 9999:
            raise DateError(f"year {self.year} outside [1, 9999]")
        if self.month is None:
            if self.day is not None:
                raise DateError("day given without month")
            return
        if not 1 <= self.month <= 12:
            raise DateError(f"month {self.month} outside [1, 12]")
        if self.day is None:
            return
        if not 1 <= self.day <= days_in_month(self.year, self.month):
            raise DateError(
                f"day {self.day} invalid for {self.year:04d}-{self.month:02d}"
            )

    @property
    def is_full(self) -> bool:
        return self.day is not None

    def isoformat(self) -> str:
        """Render as an ISO-8601 prefix: YYYY, YYYY-MM, or YYYY-MM-DD."""
        if self.month is None:
            return f"{self.year:04d}"
        if self.day is None:
            return f"{self.year:04d}-{self.month:02d}"
        return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"

    @classmethod
    def parse(cls, text: str) -> "PartialDate":
        """Parse an ISO-8601 prefix string back into a PartialDate."""
        m = _ISO_RE.match(text.strip())
        if m is None:
            raise DateError(f"not an ISO date prefix: {text!r}")
        year, month, day = m.groups()
        return cls(
            int(year),
            int(month) if month is not None else None,
            int(day) if day is not None else None,
        )

    def __str__(self) -> str:
        return self.isoformat()


def day_number(date: PartialDate) -> int:
    """Days since the epoch for a fully specified date (0001-01-01 = 1).

    Bijective over valid full dates; consecutive dates differ by exactly 1.
    """
    if not date.is_full:
        raise DateError(f"day_number requires a full date, got {date}")
    return _dt.date(date.year, date.month, date.day).toordinal()


def interval_of(date: PartialDate) -> tuple[int, int]:
    """Closed day-number interval [start, end] covered by a partial date."""
    if date.month is None:
        first = _dt.date(date.year, 1, 1)
        last = _dt.date(date.year, 12, 31)
    elif date.day is None:
        first = _dt.date(date.year, date.month, 1)
        last = _dt.date(date.year, date.month, days_in_month(date.year, date.month))
    else:
        first = last = _dt.date(date.year, date.month, date.day)
    return first.toordinal(), last.toordinal()


def interval_gap(a: PartialDate, b: PartialDate) -> int:
    """Minimum absolute day difference between the intervals of two dates.

    0 iff the intervals overlap (e.g. a day inside its own year).
    Symmetric in its arguments.
    """
    a_lo, a_hi = interval_of(a)
    b_lo, b_hi = interval_of(b)
    if a_lo > b_hi:
        return a_lo - b_hi
    if b_lo > a_hi:
        return b_lo - a_hi
    return 0
