"""
Pulling timestamps out of raw text
==================================

Queries and documents carry their time constraints inside the text itself.
extract_dates finds every recognizable date expression, normalizes each to
a PartialDate at its native granularity, and never raises on arbitrary
input; primary_date picks the first hit as the text's timestamp.

The same capability is exposed on the command line:

    re3 extract-time --text "Launched 12 March 2021."
"""

from re3 import extract_dates, primary_date, render_date

samples = [
    "The policy was approved on 12 March 2021 and amended May 5, 2022.",
    "Weather for Ostrava 2020-07-14: clear, 24C.",
    "Quarterly review, April 2019.",
    "Who chaired the committee in 2015?",
    "No dates in this sentence at all.",
    "Versions: 2021-01-01, 2021-01, 2021.",
]

for text in samples:
    found = extract_dates(text)
    stamps = [d.isoformat() for d in found.dates]
    print(f"{text!r}")
    print("   dates:", stamps or "-", "| has_year:", found.has_year)
    print("   primary:", primary_date(found))

# Extraction is the inverse of rendering: every surface style the benchmark
# generators emit is recognized back at full fidelity.
eight_march = primary_date(extract_dates("8 March 2021"))
for style in ("dmy", "mdy", "iso"):
    surface = render_date(eight_march, style)
    back = primary_date(extract_dates(f"noted {surface}, allegedly"))
    print(f"{style}: {surface!r} -> {back} (round trip: {back == eight_march})")

# Garbage in, empty result out -- the extractor is fuzz-hardened.
for nasty in ("9999-99-99", "31 February 2001", "", "\x00\x01"):
    print(f"extract_dates({nasty!r}).dates ->", extract_dates(nasty).dates)
