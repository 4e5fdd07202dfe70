"""Rule-based extraction of calendar dates from free text.

Recognized forms, scanned left to right with earlier/more specific forms
consuming their span:

* ``2019-03-12``            (ISO full date)
* ``12 March 2019``         (day month year)
* ``March 12, 2019``        (month day year; comma optional)
* ``March 2019``            (month year)
* ``2019``                  (bare year 1000-2999 with non-digit neighbours,
                             which also covers "in 2019")

Month names are matched case-insensitively, full or 3-letter abbreviated.
A match with an out-of-range component (month 13, Feb 30) is dropped
without yielding a date; nothing is ever clamped or guessed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from re3.dates import DateError, PartialDate

_MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5,
    "june": 6, "july": 7, "august": 8, "september": 9, "october": 10,
    "november": 11, "december": 12,
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7,
    "aug": 8, "sep": 9, "oct": 10, "nov": 11, "dec": 12,
}

_MONTH_NAMES = [
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
]

# Longer names first so "march" wins over "mar".
_MONTH_ALT = "|".join(sorted(_MONTHS, key=len, reverse=True))

_DATE_RE = re.compile(
    rf"""
    (?P<iso>\b(?P<iso_y>\d{{4}})-(?P<iso_m>\d{{2}})-(?P<iso_d>\d{{2}})\b)
    | (?P<dmy>\b(?P<dmy_d>\d{{1,2}})\s+(?P<dmy_mon>{_MONTH_ALT})\s+(?P<dmy_y>\d{{4}})\b)
    | (?P<mdy>\b(?P<mdy_mon>{_MONTH_ALT})\s+(?P<mdy_d>\d{{1,2}})(?:,\s*|\s+)(?P<mdy_y>\d{{4}})\b)
    | (?P<my>\b(?P<my_mon>{_MONTH_ALT})\s+(?P<my_y>\d{{4}})\b)
    | (?P<year>(?<!\d)(?P<year_y>[12]\d{{3}})(?!\d))
    """,
    re.IGNORECASE | re.VERBOSE,
)


@dataclass
class ExtractionResult:
    """Dates found in one text, in document order; has_year iff any found."""

    dates: list[PartialDate] = field(default_factory=list)
    has_year: bool = False


def _date_of_match(m: re.Match) -> PartialDate | None:
    kind = None
    for branch in ("iso", "dmy", "mdy", "my", "year"):
        if m.group(branch) is not None:
            kind = branch
            break
    try:
        if kind == "iso":
            return PartialDate(int(m["iso_y"]), int(m["iso_m"]), int(m["iso_d"]))
        if kind == "dmy":
            month = _MONTHS[m["dmy_mon"].lower()]
            return PartialDate(int(m["dmy_y"]), month, int(m["dmy_d"]))
        if kind == "mdy":
            month = _MONTHS[m["mdy_mon"].lower()]
            return PartialDate(int(m["mdy_y"]), month, int(m["mdy_d"]))
        if kind == "my":
            return PartialDate(int(m["my_y"]), _MONTHS[m["my_mon"].lower()])
        if kind == "year":
            return PartialDate(int(m["year_y"]))
    except DateError:
        return None
    return None


def extract_dates(text: str) -> ExtractionResult:
    """Extract all recognized dates from text, preserving order and duplicates.

    Never raises on arbitrary input; unparseable text yields an empty result.
    """
    dates = [d for m in _DATE_RE.finditer(text) if (d := _date_of_match(m)) is not None]
    return ExtractionResult(dates=dates, has_year=bool(dates))


def primary_date(result: ExtractionResult) -> PartialDate | None:
    """Single timestamp for a text: the first extracted date, if any."""
    return result.dates[0] if result.dates else None


def render_date(date: PartialDate, style: str = "dmy") -> str:
    """Render a date in one of the extractable surface forms.

    Full dates honour ``style`` ("dmy", "mdy", or "iso"); coarser dates fall
    back to the only extractable form of their granularity.
    """
    if date.month is None:
        return f"{date.year}"
    name = _MONTH_NAMES[date.month - 1]
    if date.day is None:
        return f"{name} {date.year}"
    if style == "mdy":
        return f"{name} {date.day}, {date.year}"
    if style == "iso":
        return date.isoformat()
    return f"{date.day} {name} {date.year}"
