"""
Calendar day arithmetic with partial dates
==========================================

Timestamps in retrieval corpora arrive at mixed granularity: a full date
("2021-03-12"), a month ("March 2021"), or a bare year ("2021"). The dates
module represents all three with one type and measures gaps between them
conservatively, as the smallest day distance between the intervals the two
stamps could denote.
"""

from re3 import PartialDate, day_number, interval_gap, interval_of

# A PartialDate is year, optional month, optional day.
full = PartialDate(2021, 3, 12)
month = PartialDate(2021, 3)
year = PartialDate(2021)
print("granularities:", full.isoformat(), month.isoformat(), year.isoformat())

# day_number maps a full date onto the proleptic Gregorian day count, the
# integer axis every gap computation lives on.
print("day number of 2021-03-12:", day_number(full))
print("one day apart:", day_number(PartialDate(2021, 3, 13)) - day_number(full))

# Coarse stamps denote an interval of days, not a point.
lo, hi = interval_of(month)
print("March 2021 spans", hi - lo + 1, "days")
lo, hi = interval_of(year)
print("2021 spans", hi - lo + 1, "days")

# interval_gap is the conservative distance: zero when the intervals
# overlap, otherwise the gap between the nearest endpoints. A specific day
# inside a year is therefore at distance zero from that year.
print("gap(2021, 2021-03-12):", interval_gap(year, full))
print("gap(2020, 2021-03-12):", interval_gap(PartialDate(2020), full))
print("gap(2021-03, 2021-07-01):", interval_gap(month, PartialDate(2021, 7, 1)))

# Leap years are handled by the underlying calendar, not approximated.
feb28 = PartialDate(2020, 2, 28)
mar01 = PartialDate(2020, 3, 1)
print("2020-02-28 to 2020-03-01:", interval_gap(feb28, mar01), "days (leap year)")

# Parsing accepts the same three granularities.
for text in ("2019-11-30", "2019-11", "2019"):
    parsed = PartialDate.parse(text)
    print(f"parse({text!r}) ->", parsed)
