"""Aggregate drift reports into per-group summary rows."""

from __future__ import annotations

import csv
import logging
import statistics
from collections import defaultdict
from dataclasses import dataclass
from typing import IO, Dict, Iterable, List, Optional, Sequence, Tuple

log = logging.getLogger(__name__)

GROUP_KEYS = ("year", "supplement_kind", "subject", "provenance")
METRIC_COLUMNS = (
    "n_couples",
    "mean_size_p",
    "median_size_p",
    "mean_size_d",
    "median_size_d",
    "mean_jaccard",
    "median_jaccard",
    "share_symdiff_zero",
    "share_first_author_preserved",
    "mean_tau",
    "n_tau",
)


@dataclass(frozen=True)
class AggregateRow:
    key: Tuple[Tuple[str, object], ...]
    n_couples: int
    mean_size_p: float
    median_size_p: float
    mean_size_d: float
    median_size_d: float
    mean_jaccard: float
    median_jaccard: float
    share_symdiff_zero: float
    share_first_author_preserved: float
    mean_tau: Optional[float]
    n_tau: int

    def cells(self) -> list:
        out = ["" if v is None else v for _, v in self.key]
        for col in METRIC_COLUMNS:
            v = getattr(self, col)
            out.append("" if v is None else (round(v, 6) if isinstance(v, float) else v))
        return out


def _group_value(report: dict, key: str):
    if key == "subject":
        subjects = report.get("subjects") or []
        return subjects[0] if subjects else None
    return report.get(key)


def effective_group_by(reports: Sequence[dict], group_by: Sequence[str]) -> Tuple[str, ...]:
    """Drop subject grouping when no report carries subjects."""
    for key in group_by:
        if key not in GROUP_KEYS:
            raise ValueError(f"unknown group key {key!r}; choose from {GROUP_KEYS}")
    if "subject" in group_by and not any(r.get("subjects") for r in reports):
        log.info("no subject metadata present; grouping without subject")
        return tuple(k for k in group_by if k != "subject")
    return tuple(group_by)


def _sort_key(key: Tuple[Tuple[str, object], ...]) -> tuple:
    return tuple((v is None, v if v is not None else 0) if k == "year" else (v is None, v or "")
                 for k, v in key)


def aggregate(reports: Sequence[dict], group_by: Sequence[str] = ("year", "supplement_kind")) -> List[AggregateRow]:
    """One row per non-empty group, ordered by group key (unknown values last)."""
    group_by = effective_group_by(reports, group_by)
    groups: Dict[tuple, List[dict]] = defaultdict(list)
    for r in reports:
        groups[tuple((k, _group_value(r, k)) for k in group_by)].append(r)
    rows = []
    for key in sorted(groups, key=_sort_key):
        members = groups[key]
        size_p = [r["overlap"]["size_p"] for r in members]
        size_d = [r["overlap"]["size_d"] for r in members]
        jac = [r["overlap"]["jaccard"] for r in members]
        taus = [r["order"]["kendall_tau"] for r in members if r["order"]["kendall_tau"] is not None]
        n = len(members)
        rows.append(
            AggregateRow(
                key=key,
                n_couples=n,
                mean_size_p=statistics.fmean(size_p),
                median_size_p=float(statistics.median(size_p)),
                mean_size_d=statistics.fmean(size_d),
                median_size_d=float(statistics.median(size_d)),
                mean_jaccard=statistics.fmean(jac),
                median_jaccard=float(statistics.median(jac)),
                share_symdiff_zero=sum(r["overlap"]["symdiff"] == 0 for r in members) / n,
                share_first_author_preserved=sum(
                    bool(r["order"]["first_author_preserved"]) for r in members
                ) / n,
                mean_tau=statistics.fmean(taus) if taus else None,
                n_tau=len(taus),
            )
        )
    return rows


def write_aggregate_csv(rows: Iterable[AggregateRow], group_by: Sequence[str], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(list(group_by) + list(METRIC_COLUMNS))
    for row in rows:
        writer.writerow(row.cells())
