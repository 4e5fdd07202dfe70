"""Ranking metrics: recall, MRR, and the two temporal diagnostics.

TimeVar@K measures how far the top-K documents' clue times scatter around
the query time (mean squared gap); MFG@K measures how stale the top-K are
relative to the freshest valid document (mean publication lag). Both carry
an explicit unit because their magnitudes are meaningless without one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from re3.data import Document, Query
from re3.dates import interval_gap, interval_of

logger = logging.getLogger(__name__)

DAYS_PER_YEAR = 365.25
# Fallback gap (days) charged to undated documents inside the top-k; callers
# normally pass their dataset's date-window width instead.
DEFAULT_MISSING_PENALTY_DAYS = 3650.0

Rankings = dict[str, list[str]]


@dataclass(frozen=True)
class MetricsReport:
    r_at_1: float
    r_at_5: float
    mrr: float
    k: int
    n_queries: int
    timevar_at_k: float | None = None
    timevar_unit: str | None = None
    mfg_at_k: float | None = None
    mfg_unit: str | None = None

    def to_dict(self) -> dict:
        return {
            "r_at_1": self.r_at_1,
            "r_at_5": self.r_at_5,
            "mrr": self.mrr,
            "k": self.k,
            "n_queries": self.n_queries,
            "timevar_at_k": self.timevar_at_k,
            "timevar_unit": self.timevar_unit,
            "mfg_at_k": self.mfg_at_k,
            "mfg_unit": self.mfg_unit,
        }


def _check_golds(rankings: Rankings, golds: dict[str, str]) -> None:
    if not rankings:
        raise ValueError("no rankings given")
    for query_id in rankings:
        if query_id not in golds:
            raise ValueError(f"query {query_id!r} has no gold mapping")


def recall_at_k(rankings: Rankings, golds: dict[str, str], k: int) -> float:
    """Fraction of queries whose gold document appears in the top k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_golds(rankings, golds)
    hits = sum(1 for qid, ranked in rankings.items() if golds[qid] in ranked[:k])
    return hits / len(rankings)


def mrr(rankings: Rankings, golds: dict[str, str]) -> float:
    """Mean reciprocal rank of the gold; absent golds contribute 0."""
    _check_golds(rankings, golds)
    total = 0.0
    absent = 0
    for query_id, ranked in rankings.items():
        try:
            total += 1.0 / (ranked.index(golds[query_id]) + 1)
        except ValueError:
            absent += 1
    if absent:
        logger.info("mrr: gold absent from %d of %d rankings", absent, len(rankings))
    return total / len(rankings)


def _to_unit(days: float, unit: str) -> float:
    if unit == "days":
        return days
    if unit == "years":
        return days / DAYS_PER_YEAR
    raise ValueError(f"unknown unit: {unit!r}")


def timevar_at_k(
    rankings: Rankings,
    queries: dict[str, Query],
    docs: dict[str, Document],
    k: int,
    unit: str = "years",
    missing_penalty_days: float = DEFAULT_MISSING_PENALTY_DAYS,
) -> float:
    """Mean over queries of the mean squared query-to-clue-time gap in top-k.

    Documents without a clue time are charged ``missing_penalty_days``
    (and the substitution is logged) so retrieving undated documents is
    never rewarded.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    penalized = 0
    per_query = []
    for query_id, ranked in rankings.items():
        query = queries[query_id]
        if query.t_q is None:
            raise ValueError(f"query {query_id!r} has no t_q; TimeVar undefined")
        head = ranked[:k]
        if not head:
            raise ValueError(f"query {query_id!r} has an empty ranking")
        total = 0.0
        for doc_id in head:
            doc = docs[doc_id]
            if doc.t_c is None:
                penalized += 1
                gap_days = float(missing_penalty_days)
            else:
                gap_days = float(interval_gap(query.t_q, doc.t_c))
            gap = _to_unit(gap_days, unit)
            total += gap * gap
        per_query.append(total / len(head))
    if penalized:
        logger.warning(
            "timevar_at_k: %d top-k documents had no clue time; charged %.1f days each",
            penalized,
            missing_penalty_days,
        )
    return sum(per_query) / len(per_query)


def signed_lag_days(t_star, t_d) -> tuple[int, bool]:
    """Days document time t_d lags the freshest time t_star.

    Returns (lag, clamped): documents published at or after t_star lag 0;
    clamped marks the strictly-later case (possible only across version
    groups, where the freshest-valid definition does not bound t_d).
    """
    star_lo, _ = interval_of(t_star)
    _, d_hi = interval_of(t_d)
    if d_hi >= star_lo:
        _, star_hi = interval_of(t_star)
        d_lo, _ = interval_of(t_d)
        return 0, d_lo > star_hi
    return star_lo - d_hi, False


def mfg_at_k(
    rankings: Rankings,
    queries: dict[str, Query],
    docs: dict[str, Document],
    golds: dict[str, str],
    k: int,
    unit: str = "days",
    missing_penalty_days: float = DEFAULT_MISSING_PENALTY_DAYS,
) -> float:
    """Mean over queries of the mean publication lag of top-k vs the gold.

    The reference per query is the gold's publication time. Documents
    published later than it (possible across version groups) are clamped to
    lag 0 and counted; undated documents are charged the penalty.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    penalized = 0
    clamped = 0
    per_query = []
    for query_id, ranked in rankings.items():
        gold = docs[golds[query_id]]
        if gold.t_d is None:
            raise ValueError(
                f"gold {gold.doc_id!r} for query {query_id!r} has no t_d; MFG undefined"
            )
        head = ranked[:k]
        if not head:
            raise ValueError(f"query {query_id!r} has an empty ranking")
        total = 0.0
        for doc_id in head:
            doc = docs[doc_id]
            if doc.t_d is None:
                penalized += 1
                lag_days = float(missing_penalty_days)
            else:
                lag, was_clamped = signed_lag_days(gold.t_d, doc.t_d)
                clamped += was_clamped
                lag_days = float(lag)
            total += _to_unit(lag_days, unit)
        per_query.append(total / len(head))
    if penalized:
        logger.warning(
            "mfg_at_k: %d top-k documents had no publication time; charged %.1f days each",
            penalized,
            missing_penalty_days,
        )
    if clamped:
        logger.info("mfg_at_k: %d lags clamped at 0 (published after the gold)", clamped)
    return sum(per_query) / len(per_query)


def build_report(
    rankings: Rankings,
    queries: list[Query],
    docs: list[Document],
    k: int = 5,
    missing_penalty_days: float = DEFAULT_MISSING_PENALTY_DAYS,
) -> MetricsReport:
    """Assemble the full report, picking time metrics by scenario.

    Alignment scatter (TimeVar, in years) applies when queries carry t_q
    (rel/hyb); freshness lag (MFG, in days) applies when golds carry t_d
    (rec/hyb).
    """
    query_map = {q.query_id: q for q in queries}
    doc_map = {d.doc_id: d for d in docs}
    golds = {q.query_id: q.gold for q in queries}
    scenarios = {q.scenario for q in query_map.values() if q.query_id in rankings}
    if len(scenarios) != 1:
        raise ValueError(f"rankings span scenarios {sorted(scenarios)}; expected one")
    scenario = scenarios.pop()

    report = {
        "r_at_1": recall_at_k(rankings, golds, 1),
        "r_at_5": recall_at_k(rankings, golds, 5),
        "mrr": mrr(rankings, golds),
        "k": k,
        "n_queries": len(rankings),
    }
    if scenario in ("rel", "hyb"):
        report["timevar_at_k"] = timevar_at_k(
            rankings, query_map, doc_map, k, "years", missing_penalty_days
        )
        report["timevar_unit"] = "years"
    if scenario in ("rec", "hyb"):
        # Freshness lag needs every gold dated; on corpora where some are not
        # (e.g. after timestamp blanking) the metric is undefined, so it is
        # omitted rather than charged a made-up value.
        undated = [
            qid for qid in rankings if doc_map[golds[qid]].t_d is None
        ]
        if undated:
            logger.warning(
                "MFG omitted: %d gold document(s) lack t_d (first: %s)",
                len(undated), undated[0],
            )
        else:
            report["mfg_at_k"] = mfg_at_k(
                rankings, query_map, doc_map, golds, k, "days", missing_penalty_days
            )
            report["mfg_unit"] = "days"
    return MetricsReport(**report)
