"""Deterministic synthetic benchmark generation for the three scenarios.

Each generator builds query/document groups from template pools and word
lists, fully determined by the config seed:

* ``rel`` — year-anchored facts (who held a post in which year); the gold
  shares the query's year, confusers shift it by one to three years.
* ``rec`` — versioned statements that are semantically equivalent; only the
  publication date separates the freshest version from stale ones.
* ``hyb`` — weather forecasts per (city, target date); the gold matches the
  target date with the newest generation date, confusers are stale
  re-issues, nearby dates, and other cities.

Texts never leak what only metadata should know: ``rel`` documents carry no
publication date, ``rec`` documents mention no dates at all, and ``hyb``
documents mention the forecast target date but not their generation date.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from re3.data import (
    Document,
    Query,
    SCENARIOS,
    document_to_record,
    query_to_record,
    read_documents,
    read_queries,
)
from re3.dates import PartialDate, day_number, interval_gap
from re3.extract import render_date


class BenchError(ValueError):
    """Raised for invalid generation configs or corpus capacity problems."""


# --- word pools -------------------------------------------------------------

ORG_ADJECTIVES = [
    "Northern", "Harborview", "Crescent", "Lakeside", "Summit", "Heritage",
    "Pioneer", "Meridian", "Beacon", "Cedarline", "Willowbrook", "Eastgate",
]
ORG_NOUNS = [
    "Institute", "Conservatory", "Observatory", "Atheneum", "Foundation",
    "Society", "Museum", "Gallery", "Archive", "Academy",
]
ROLES = [
    "director", "curator", "registrar", "treasurer",
    "bursar", "archivist", "librarian", "provost",
]
FIRST_NAMES = [
    "Alden", "Briar", "Cassia", "Doran", "Elowen", "Fenwick", "Greer",
    "Halcyon", "Isolde", "Jorah", "Kestrel", "Linden", "Maren", "Nolan",
    "Ottoline", "Perrin", "Quilla", "Rowan", "Saoirse", "Tobias",
    "Una", "Vester", "Wren", "Yardley",
]
LAST_NAMES = [
    "Ashdown", "Blackwood", "Caulfield", "Dunmore", "Everhart", "Fairbairn",
    "Garrick", "Hollis", "Ingles", "Jephson", "Kirkwall", "Lockridge",
    "Marlowe", "Netherby", "Oakhurst", "Pemberton", "Quennell", "Ravenel",
    "Standish", "Thornbury", "Underhill", "Vance", "Whitlock", "Yates",
]
POLICIES = [
    "travel policy", "expense guideline", "security directive",
    "submission standard", "retention schedule", "onboarding checklist",
    "access protocol", "maintenance charter", "procurement rule",
    "escalation procedure",
]
APPROVERS = [
    "operations office", "records office", "steering committee",
    "site supervisor", "compliance desk", "duty manager",
    "facilities board", "programme lead",
]
CITIES = [
    "Arlenby", "Bexford", "Calermouth", "Dunhollow", "Eastmere", "Fenwick Vale",
    "Garsdale", "Hartcliffe", "Ivoryn", "Jademoor", "Kelsport", "Larkstead",
    "Mirefield", "Nordwick", "Ostenholm", "Pellbrook", "Quarrower", "Rillford",
    "Saltmarsh", "Tarnley", "Umberton", "Veldmoor", "Wynslow", "Yarrowgate",
    "Ashpool", "Briarcombe", "Coldwater", "Dovestone", "Elmsworth", "Foxglove Hill",
    "Gullwing", "Hazelmere", "Ironbridge", "Juniper Flats", "Kilnhurst", "Longbarrow",
    "Mosswood", "Netherfen", "Ottersby", "Pinemarch",
]
CONDITIONS = [
    "rain", "showers", "clear", "overcast", "fog",
    "wind", "drizzle", "sun", "storms", "sleet",
]

# "{role} of {org} in {year}" stays one contiguous span in every template,
# for the same retrieval reason as the forecast templates below.
REL_DOC_TEMPLATES = [
    "The {role} of {org} in {year} was {person}.",
    "{person} served as {role} of {org} in {year}.",
    "{person} held the post of {role} of {org} in {year}.",
    "Records list {person} as {role} of {org} in {year}.",
    "{person} was the {role} of {org} in {year}.",
    "The {role} of {org} in {year}: {person}.",
    "Appointment note: {person}, {role} of {org} in {year}.",
    "Archives name {person} as {role} of {org} in {year}.",
]
REL_QUERY_TEMPLATES = [
    "Who was the {role} of {org} in {year}?",
    "Who served as {role} of {org} in {year}?",
    "Name the {role} of {org} in {year}.",
    "Who held the post of {role} of {org} in {year}?",
    "Which person was {role} of {org} in {year}?",
    "Who was {role} of {org} in {year}, exactly?",
    "Identify the {role} of {org} in {year}.",
    "Who acted as {role} of {org} in {year}?",
]
REC_DOC_TEMPLATES = [
    "{subject} requires sign-off from the {approver}.",
    "Under {subject}, sign-off from the {approver} is required.",
    "{subject} states that the {approver} must sign off.",
    "Sign-off from the {approver} is mandatory under {subject}.",
    "According to {subject}, approval rests with the {approver}.",
    "{subject} assigns final approval to the {approver}.",
    "Approval authority under {subject} lies with the {approver}.",
    "Per {subject}, the {approver} holds sign-off duty.",
    "{subject} places sign-off responsibility with the {approver}.",
]
REC_QUERY_TEMPLATES = [
    "Who must sign off under {subject}?",
    "Which office holds approval under {subject}?",
    "Where does sign-off authority sit in {subject}?",
    "Who gives final approval according to {subject}?",
    "Which body approves requests under {subject}?",
    "Who currently holds sign-off duty for {subject}?",
    "Under {subject}, who grants approval?",
    "Whose approval does {subject} require?",
]
# Every template keeps "{city} {date}" as one contiguous span so the query
# and its own documents share a long run of identical character n-grams;
# at small embedding dims that shared span has to outweigh hashing noise.
HYB_DOC_TEMPLATES = [
    "{city} {date}: {condition}, {temp}C.",
    "{city} {date} outlook: {condition}, near {temp}C.",
    "Forecast {city} {date}: {condition} at {temp}C.",
    "{city} {date}: {condition}, highs {temp}C.",
    "{city} {date} update: {condition}, about {temp}C.",
    "Outlook {city} {date}: {condition}, {temp}C.",
    "{city} {date} guidance: {condition}, {temp}C peak.",
    "Bulletin {city} {date}: {condition}, {temp}C.",
    "{city} {date} briefing: {condition}, around {temp}C.",
]
HYB_QUERY_TEMPLATES = [
    "{city} {date} weather?",
    "How will {city} {date} turn out?",
    "Conditions {city} {date}?",
    "What's the outlook, {city} {date}?",
    "How warm is {city} {date}?",
    "What to expect, {city} {date}?",
    "Any forecast, {city} {date}?",
    "What does {city} {date} bring?",
]
# Half the stale re-issues quote the query verbatim before their outdated
# answer, making them semantically *closer* to the query than the gold is.
# Beating them requires downweighting the semantic channel, not just adding
# a temporal bonus on top of it.
HYB_ECHO_SUFFIXES = [
    "Last guidance: {condition}, {temp}C.",
    "Earlier call: {condition}, near {temp}C.",
    "Prior update: {condition}, {temp}C.",
    "Previous outlook: {condition}, about {temp}C.",
]
_DATE_STYLES = ("dmy", "mdy", "iso")


@dataclass(frozen=True)
class GenConfig:
    """Everything a generator needs; two identical configs give identical data."""

    scenario: str
    num_queries: int
    cdr: int = 5
    seed: int = 0
    year_lo: int = 2010
    year_hi: int = 2024
    n_entities: int = 64
    rec_min_extra: int = 2
    rec_max_extra: int = 4
    today: str = "2025-01-01"
    template_pool: str = "default"

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise BenchError(f"unknown scenario: {self.scenario!r}")
        if self.num_queries < 1:
            raise BenchError("num_queries must be >= 1")
        if self.cdr < 1:
            raise BenchError("cdr must be >= 1")
        if self.year_hi - self.year_lo < 6:
            raise BenchError("date window must span at least 7 years")
        if not 1 <= self.rec_min_extra <= self.rec_max_extra:
            raise BenchError("rec extras must satisfy 1 <= min <= max")
        if self.n_entities < 1:
            raise BenchError("n_entities must be >= 1")
        if self.template_pool != "default":
            raise BenchError(f"unknown template pool: {self.template_pool!r}")
        PartialDate.parse(self.today)


@dataclass
class BenchDataset:
    documents: list[Document]
    queries: list[Query]
    manifest: dict


def _pick(rng: np.random.Generator, pool: list) -> object:
    return pool[int(rng.integers(0, len(pool)))]


def _date_from_day(day: int) -> PartialDate:
    d = datetime.date.fromordinal(day)
    return PartialDate(d.year, d.month, d.day)


def _person(rng: np.random.Generator, taken: set[str]) -> str:
    while True:
        name = f"{_pick(rng, FIRST_NAMES)} {_pick(rng, LAST_NAMES)}"
        if name not in taken:
            taken.add(name)
            return name


def _distinct_pairs(rng, count, capacity, draw):
    """Sample ``count`` distinct keys via ``draw(rng)`` with a capacity check."""
    if count > capacity:
        raise BenchError(
            f"entity pool too small: need {count} distinct groups, capacity {capacity}"
        )
    seen = set()
    out = []
    while len(out) < count:
        key = draw(rng)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def _checksum(documents: list[Document], queries: list[Query]) -> str:
    digest = hashlib.sha256()
    digest.update(_jsonl(documents, document_to_record).encode("utf-8"))
    digest.update(_jsonl(queries, query_to_record).encode("utf-8"))
    return digest.hexdigest()


def _jsonl(items, to_record) -> str:
    return "".join(
        json.dumps(to_record(item), ensure_ascii=False, sort_keys=True) + "\n"
        for item in items
    )


def _manifest(cfg: GenConfig, documents, queries, notes: dict) -> dict:
    return {
        "format": "re3-bench-v1",
        "config": asdict(cfg),
        "counts": {"documents": len(documents), "queries": len(queries)},
        "checksum": _checksum(documents, queries),
        "notes": notes,
    }


# --- generators ---------------------------------------------------------------


def gen_rel(cfg: GenConfig) -> BenchDataset:
    """Year-alignment scenario: gold shares the query year, confusers shift it."""
    if cfg.scenario != "rel":
        raise BenchError(f"gen_rel got scenario {cfg.scenario!r}")
    rng = np.random.default_rng(cfg.seed)
    entities = _distinct_pairs(
        rng,
        min(cfg.n_entities, cfg.num_queries),
        len(ORG_ADJECTIVES) * len(ORG_NOUNS) * len(ROLES),
        lambda r: (
            int(r.integers(0, len(ORG_ADJECTIVES))),
            int(r.integers(0, len(ORG_NOUNS))),
            int(r.integers(0, len(ROLES))),
        ),
    )
    lo, hi = cfg.year_lo + 3, cfg.year_hi - 3
    groups = _distinct_pairs(
        rng,
        cfg.num_queries,
        len(entities) * (hi - lo + 1),
        lambda r: (int(r.integers(0, len(entities))), int(r.integers(lo, hi + 1))),
    )
    documents: list[Document] = []
    queries: list[Query] = []
    for i, (entity_idx, year) in enumerate(groups):
        adj, noun, role_idx = entities[entity_idx]
        org = f"the {ORG_ADJECTIVES[adj]} {ORG_NOUNS[noun]}"
        role = ROLES[role_idx]
        query_id = f"rel-q{i:04d}"
        taken: set[str] = set()

        gold_id = f"{query_id}-gold"
        gold_text = str(_pick(rng, REL_DOC_TEMPLATES)).format(
            year=year, person=_person(rng, taken), role=role, org=org
        )
        documents.append(Document(gold_id, gold_text, t_c=PartialDate(year)))

        offsets = [-3, -2, -1, 1, 2, 3]
        rng.shuffle(offsets)
        for j in range(cfg.cdr):
            offset = offsets[j % len(offsets)]
            text = str(_pick(rng, REL_DOC_TEMPLATES)).format(
                year=year + offset, person=_person(rng, taken), role=role, org=org
            )
            documents.append(
                Document(f"{query_id}-c{j}", text, t_c=PartialDate(year + offset))
            )

        query_text = str(_pick(rng, REL_QUERY_TEMPLATES)).format(
            year=year, role=role, org=org
        )
        queries.append(
            Query(query_id, query_text, gold=gold_id, scenario="rel",
                  t_q=PartialDate(year))
        )
    notes = {"confuser_offsets": "uniform without replacement from +/-{1,2,3} years"}
    return BenchDataset(documents, queries, _manifest(cfg, documents, queries, notes))


# Freshness bands for the rec scenario, in days. The gold version sits in a
# narrow recency band behind the evaluation date; older versions trail it by
# one month to one year. See the hybrid bands for why: band membership is
# what a gap encoding can learn from a few hundred examples, while a global
# "newest of any age wins" rule over decades of gap values is not.
REC_GOLD_LAG = (30, 59)
REC_STALE_EXTRA = (30, 120)


def gen_rec(cfg: GenConfig) -> BenchDataset:
    """Freshness scenario: equivalent versions, only publication dates differ."""
    if cfg.scenario != "rec":
        raise BenchError(f"gen_rec got scenario {cfg.scenario!r}")
    rng = np.random.default_rng(cfg.seed)
    subjects = _distinct_pairs(
        rng,
        cfg.num_queries,
        len(ORG_ADJECTIVES) * len(ORG_NOUNS) * len(POLICIES),
        lambda r: (
            int(r.integers(0, len(ORG_ADJECTIVES))),
            int(r.integers(0, len(ORG_NOUNS))),
            int(r.integers(0, len(POLICIES))),
        ),
    )
    today_day = day_number(PartialDate.parse(cfg.today))
    documents: list[Document] = []
    queries: list[Query] = []
    for i, (adj, noun, policy_idx) in enumerate(subjects):
        subject = (
            f"the {ORG_ADJECTIVES[adj]} {ORG_NOUNS[noun]} {POLICIES[policy_idx]}"
        )
        approver = str(_pick(rng, APPROVERS))
        query_id = f"rec-q{i:04d}"
        n_extra = int(rng.integers(cfg.rec_min_extra, cfg.rec_max_extra + 1))
        gold_day = today_day - int(rng.integers(REC_GOLD_LAG[0], REC_GOLD_LAG[1] + 1))
        extras = rng.choice(
            np.arange(REC_STALE_EXTRA[0], REC_STALE_EXTRA[1] + 1),
            size=n_extra, replace=False,
        )
        days = sorted(gold_day - int(e) for e in extras) + [gold_day]
        template_order = rng.permutation(len(REC_DOC_TEMPLATES))
        for v, day in enumerate(days):
            text = REC_DOC_TEMPLATES[template_order[v]].format(
                subject=subject, approver=approver
            )
            text = text[0].upper() + text[1:]
            documents.append(
                Document(f"{query_id}-v{v}", text, t_d=_date_from_day(day))
            )
        query_text = str(_pick(rng, REC_QUERY_TEMPLATES)).format(subject=subject)
        queries.append(
            Query(query_id, query_text, gold=f"{query_id}-v{len(days) - 1}",
                  scenario="rec")
        )
    notes = {
        "versions": f"1 gold + uniform {cfg.rec_min_extra}..{cfg.rec_max_extra} older",
        "t_ref": cfg.today,
        "freshness_bands": {
            "gold_lag_days": list(REC_GOLD_LAG),
            "stale_extra_days": list(REC_STALE_EXTRA),
        },
    }
    return BenchDataset(documents, queries, _manifest(cfg, documents, queries, notes))


# Hybrid freshness bands, in days before the forecast's own target date.
# Gold issues sit in a narrow band; stale re-issues are one to three months
# older; near-date and other-city distractors are deceptively *fresh*, so
# neither "newest wins" nor "oldest wins" alone solves the scenario and the
# gap encoding must discriminate between large, nearby gap values.
HYB_GOLD_LAG = (270, 299)
HYB_STALE_EXTRA = (31, 90)
HYB_DISTRACTOR_LAG = (1, 30)


def gen_hyb(cfg: GenConfig) -> BenchDataset:
    """Forecast scenario: align the target date, then prefer the gold issue."""
    if cfg.scenario != "hyb":
        raise BenchError(f"gen_hyb got scenario {cfg.scenario!r}")
    rng = np.random.default_rng(cfg.seed)
    margin = HYB_GOLD_LAG[1] + HYB_STALE_EXTRA[1] + 1
    day_lo = day_number(PartialDate(cfg.year_lo, 1, 1)) + margin
    day_hi = day_number(PartialDate(cfg.year_hi, 12, 31)) - 3
    capacity = len(CITIES) * (day_hi - day_lo + 1) // 8
    if cfg.num_queries > capacity:
        raise BenchError(
            f"entity pool too small: need {cfg.num_queries} distinct groups, "
            f"capacity {capacity}"
        )
    # Target days are globally unique and same-city targets sit at least four
    # days apart, so no distractor can share a (city, clue time) pair with
    # another query's gold and freshness stays locally decidable.
    used_days: set[int] = set()
    by_city: dict[int, list[int]] = {}
    groups: list[tuple[int, int]] = []
    while len(groups) < cfg.num_queries:
        city_idx = int(rng.integers(0, len(CITIES)))
        day = int(rng.integers(day_lo, day_hi + 1))
        if day in used_days:
            continue
        if any(abs(day - other) <= 3 for other in by_city.get(city_idx, [])):
            continue
        used_days.add(day)
        by_city.setdefault(city_idx, []).append(day)
        groups.append((city_idx, day))

    def forecast_text(city, target, temp, condition, style):
        template = str(_pick(rng, HYB_DOC_TEMPLATES))
        date = render_date(target, style)
        text = template.format(date=date, city=city, condition=condition, temp=temp)
        return text[0].upper() + text[1:]

    documents: list[Document] = []
    queries: list[Query] = []
    for i, (city_idx, target_day) in enumerate(groups):
        city = CITIES[city_idx]
        target = _date_from_day(target_day)
        query_id = f"hyb-q{i:04d}"
        temp = int(rng.integers(-5, 35))
        condition = str(_pick(rng, CONDITIONS))
        # One rendering style per group keeps the query textually close to
        # its own documents while styles still vary across the corpus.
        style = str(_pick(rng, _DATE_STYLES))

        query_text = str(_pick(rng, HYB_QUERY_TEMPLATES)).format(
            city=city, date=render_date(target, style)
        )

        gold_day = target_day - int(rng.integers(HYB_GOLD_LAG[0], HYB_GOLD_LAG[1] + 1))
        gold_id = f"{query_id}-gold"
        documents.append(
            Document(gold_id, forecast_text(city, target, temp, condition, style),
                     t_c=target, t_d=_date_from_day(gold_day))
        )

        n_stale = int(rng.integers(1, cfg.cdr)) if cfg.cdr > 1 else 0
        extras = rng.choice(
            np.arange(HYB_STALE_EXTRA[0], HYB_STALE_EXTRA[1] + 1),
            size=n_stale, replace=False,
        )
        for j, extra in enumerate(sorted(int(e) for e in extras)):
            stale_temp = temp + int(rng.integers(-4, 5))
            stale_cond = str(_pick(rng, CONDITIONS))
            if rng.random() < 0.5:
                suffix = str(_pick(rng, HYB_ECHO_SUFFIXES)).format(
                    condition=stale_cond, temp=stale_temp
                )
                text = f"{query_text} {suffix}"
            else:
                text = forecast_text(city, target, stale_temp, stale_cond, style)
            documents.append(
                Document(f"{query_id}-stale{j}", text,
                         t_c=target, t_d=_date_from_day(gold_day - extra))
            )

        for j in range(cfg.cdr - n_stale):
            lag = int(rng.integers(HYB_DISTRACTOR_LAG[0], HYB_DISTRACTOR_LAG[1] + 1))
            if rng.random() < 0.5:
                offset = int(_pick(rng, [-3, -2, -1, 1, 2, 3]))
                near = _date_from_day(target_day + offset)
                documents.append(
                    Document(f"{query_id}-near{j}",
                             forecast_text(city, near, int(rng.integers(-5, 35)),
                                           str(_pick(rng, CONDITIONS)), style),
                             t_c=near, t_d=_date_from_day(target_day + offset - lag))
                )
            else:
                other = CITIES[(city_idx + 1 + int(rng.integers(0, len(CITIES) - 1)))
                               % len(CITIES)]
                documents.append(
                    Document(f"{query_id}-city{j}",
                             forecast_text(other, target, int(rng.integers(-5, 35)),
                                           str(_pick(rng, CONDITIONS)), style),
                             t_c=target, t_d=_date_from_day(target_day - lag))
                )

        queries.append(
            Query(query_id, query_text, gold=gold_id, scenario="hyb", t_q=target)
        )
    notes = {
        "confuser_split": "stale ~ uniform 1..cdr-1 (half echo the query); "
                          "rest 50/50 near-date vs other-city",
        "freshness_bands": {
            "gold_lag_days": list(HYB_GOLD_LAG),
            "stale_extra_days": list(HYB_STALE_EXTRA),
            "distractor_lag_days": list(HYB_DISTRACTOR_LAG),
        },
    }
    return BenchDataset(documents, queries, _manifest(cfg, documents, queries, notes))


def generate(cfg: GenConfig) -> BenchDataset:
    return {"rel": gen_rel, "rec": gen_rec, "hyb": gen_hyb}[cfg.scenario](cfg)


# --- serialization and validation --------------------------------------------


def write_dataset(dataset: BenchDataset, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "docs.jsonl").write_text(
        _jsonl(dataset.documents, document_to_record), encoding="utf-8"
    )
    (directory / "queries.jsonl").write_text(
        _jsonl(dataset.queries, query_to_record), encoding="utf-8"
    )
    with open(directory / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(dataset.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_dataset(directory: str | Path) -> BenchDataset:
    directory = Path(directory)
    documents = read_documents(directory / "docs.jsonl")
    queries = read_queries(directory / "queries.jsonl")
    manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
    return BenchDataset(documents, queries, manifest)


def _city_of(text: str) -> str | None:
    hits = [c for c in CITIES if c in text]
    return max(hits, key=len) if hits else None


def validate_dataset(dataset: BenchDataset) -> list[str]:
    """Independent invariant pass; returns human-readable violations."""
    problems: list[str] = []
    docs = {d.doc_id: d for d in dataset.documents}
    if len(docs) != len(dataset.documents):
        problems.append("duplicate document ids")
    golds = [q.gold for q in dataset.queries]
    if len(set(golds)) != len(golds):
        problems.append("gold ids are not unique across queries")

    counts = dataset.manifest.get("counts", {})
    if counts.get("documents") != len(dataset.documents):
        problems.append("manifest document count mismatch")
    if counts.get("queries") != len(dataset.queries):
        problems.append("manifest query count mismatch")
    checksum = _checksum(dataset.documents, dataset.queries)
    if dataset.manifest.get("checksum") != checksum:
        problems.append("manifest checksum mismatch")

    by_group: dict[str, list[Document]] = {}
    for doc in dataset.documents:
        group = doc.doc_id.rsplit("-", 1)[0]
        by_group.setdefault(group, []).append(doc)

    today = dataset.manifest.get("config", {}).get("today")
    today_day = None if today is None else day_number(PartialDate.parse(today))

    for query in dataset.queries:
        if query.gold not in docs:
            problems.append(f"{query.query_id}: gold {query.gold} missing")
            continue
        gold = docs[query.gold]
        group = by_group.get(query.query_id, [])
        scenario = query.scenario

        if scenario == "rel":
            for doc in group:
                if doc.t_c is None or doc.t_d is not None:
                    problems.append(f"{doc.doc_id}: rel docs must carry t_c only")
            if query.t_q is None or gold.t_c is None:
                problems.append(f"{query.query_id}: gold clue time misses t_q")
                continue
            if interval_gap(query.t_q, gold.t_c) != 0:
                problems.append(f"{query.query_id}: gold clue time misses t_q")
            for doc in group:
                if doc.doc_id == query.gold or doc.t_c is None:
                    continue
                if interval_gap(query.t_q, doc.t_c) == 0:
                    problems.append(f"{doc.doc_id}: confuser matches t_q")

        elif scenario == "rec":
            if query.t_q is not None:
                problems.append(f"{query.query_id}: rec queries carry no t_q")
            stamps = []
            for doc in group:
                if doc.t_d is None or doc.t_c is not None:
                    problems.append(f"{doc.doc_id}: rec docs must carry t_d only")
                else:
                    stamps.append(day_number(doc.t_d))
            if len(set(stamps)) != len(stamps):
                problems.append(f"{query.query_id}: version t_d values not unique")
            if gold.t_d is None or (stamps and day_number(gold.t_d) != max(stamps)):
                problems.append(f"{query.query_id}: gold is not the freshest version")
            elif today_day is not None:
                lag = today_day - day_number(gold.t_d)
                if not REC_GOLD_LAG[0] <= lag <= REC_GOLD_LAG[1]:
                    problems.append(f"{query.query_id}: gold lag {lag} outside band")

        elif scenario == "hyb":
            for doc in group:
                if doc.t_c is None or doc.t_d is None:
                    problems.append(f"{doc.doc_id}: hyb docs must carry t_c and t_d")
            if query.t_q is None or gold.t_c != query.t_q or gold.t_d is None:
                problems.append(f"{query.query_id}: gold target date misses t_q")
                continue
            lag = day_number(query.t_q) - day_number(gold.t_d)
            if not HYB_GOLD_LAG[0] <= lag <= HYB_GOLD_LAG[1]:
                problems.append(f"{query.query_id}: gold lag {lag} outside band")
            query_city = _city_of(query.text)
            if query_city is None or query_city != _city_of(gold.text):
                problems.append(f"{query.query_id}: gold city mismatch")
                continue
            # Gold maximality across the whole corpus, not just the group.
            for doc in dataset.documents:
                if doc.doc_id == query.gold or doc.t_c != query.t_q:
                    continue
                if _city_of(doc.text) == query_city and (
                    doc.t_d is None or day_number(doc.t_d) >= day_number(gold.t_d)
                ):
                    problems.append(
                        f"{query.query_id}: {doc.doc_id} challenges gold freshness"
                    )
            for doc in group:
                if doc.t_c is None or doc.t_d is None:
                    continue
                kind = doc.doc_id.rsplit("-", 1)[1]
                if kind.startswith("stale") and not (
                    doc.t_c == gold.t_c and day_number(doc.t_d) < day_number(gold.t_d)
                ):
                    problems.append(f"{doc.doc_id}: stale confuser not older same-date")
                if kind.startswith("near") and doc.t_c == query.t_q:
                    problems.append(f"{doc.doc_id}: near-date confuser matches t_q")
    return problems


def validate_files(directory: str | Path) -> list[str]:
    """Re-read the serialized dataset and re-check every invariant."""
    return validate_dataset(load_dataset(directory))


# Seed offset between an evaluation dataset and the sibling it trains on.
# Keeping them disjoint makes every reported metric a held-out number: a
# scorer cannot look good by memorizing the pools it is scored on.
TRAIN_SEED_OFFSET = 7919


def training_sibling(dataset: BenchDataset) -> BenchDataset:
    """Regenerate a same-distribution training dataset from the manifest."""
    conf = dict(dataset.manifest["config"])
    conf["seed"] = int(conf["seed"]) + TRAIN_SEED_OFFSET
    return generate(GenConfig(**conf))


def run_ablation(mode, dataset: BenchDataset, cfg=None, train: BenchDataset | None = None):
    """Train one ablation variant and evaluate it held-out on ``dataset``.

    ``cfg`` is a pipeline config whose mode is overridden; ``train`` defaults
    to the dataset's regenerated sibling. Returns the metrics report.
    """
    from dataclasses import replace

    from re3.pipeline import PipelineConfig, run_pipeline

    cfg = PipelineConfig(mode=mode) if cfg is None else replace(cfg, mode=mode)
    if train is None:
        train = training_sibling(dataset)
    today = PartialDate.parse(dataset.manifest["config"]["today"])
    result = run_pipeline(
        dataset.documents, dataset.queries, cfg, today=today,
        train=(train.documents, train.queries),
    )
    return result.report


def blank_timestamps(
    documents: list[Document], fraction: float, seed: int
) -> list[Document]:
    """Return a copy with ``fraction`` of the publication dates removed."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    rng = np.random.default_rng(seed)
    dated = [i for i, d in enumerate(documents) if d.t_d is not None]
    n_blank = int(round(fraction * len(dated)))
    chosen = set(
        int(i) for i in rng.choice(np.array(dated), size=n_blank, replace=False)
    ) if n_blank else set()
    out = []
    for i, doc in enumerate(documents):
        if i in chosen:
            out.append(Document(doc.doc_id, doc.text, t_c=doc.t_c, t_d=None))
        else:
            out.append(doc)
    return out
