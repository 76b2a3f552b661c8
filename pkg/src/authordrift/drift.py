"""Per-couple authorship comparison: cardinality, composition and order."""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, List, Optional, Sequence, Tuple

from authordrift.couples import LinkedCouple
from authordrift.errors import AuthorlessEndpoint, UnresolvableEndpoint
from authordrift.ingest import GraphIndex
from authordrift.model import AuthorName, ProductKind
from authordrift.namematch import AuthorAlignment, MatcherConfig

CSV_COLUMNS = (
    "publication",
    "supplement",
    "provenance",
    "score",
    "supplement_kind",
    "year",
    "subject",
    "size_p",
    "size_d",
    "intersection",
    "symdiff",
    "jaccard",
    "kendall_tau",
    "first_author_preserved",
    "last_author_preserved",
    "max_displacement",
)


@dataclass(frozen=True)
class OverlapStats:
    size_p: int
    size_d: int
    intersection: int
    symdiff: int
    jaccard: float


@dataclass(frozen=True)
class OrderStats:
    kendall_tau: Optional[float]  # None with fewer than two matched authors
    first_author_preserved: bool
    last_author_preserved: bool
    max_displacement: Optional[float]  # None with no matched authors


@dataclass(frozen=True)
class DriftReport:
    couple: LinkedCouple
    overlap: OverlapStats
    order: OrderStats
    year: Optional[int]
    supplement_kind: ProductKind
    alignment: AuthorAlignment
    subjects: Tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "publication": self.couple.publication.value,
            "supplement": self.couple.supplement.value,
            "provenance": self.couple.provenance.value,
            "score": _num(self.couple.score),
            "supplement_kind": self.supplement_kind.value,
            "year": self.year,
            "subjects": list(self.subjects),
            "overlap": {
                "size_p": self.overlap.size_p,
                "size_d": self.overlap.size_d,
                "intersection": self.overlap.intersection,
                "symdiff": self.overlap.symdiff,
                "jaccard": _num(self.overlap.jaccard),
            },
            "order": {
                "kendall_tau": _num(self.order.kendall_tau),
                "first_author_preserved": self.order.first_author_preserved,
                "last_author_preserved": self.order.last_author_preserved,
                "max_displacement": _num(self.order.max_displacement),
            },
            "alignment": self.alignment.as_dict(),
        }

    def csv_row(self) -> list:
        d = self.as_dict()
        return [
            d["publication"],
            d["supplement"],
            d["provenance"],
            _cell(d["score"]),
            d["supplement_kind"],
            _cell(d["year"]),
            self.subjects[0] if self.subjects else "",
            self.overlap.size_p,
            self.overlap.size_d,
            self.overlap.intersection,
            self.overlap.symdiff,
            _cell(d["overlap"]["jaccard"]),
            _cell(d["order"]["kendall_tau"]),
            int(self.order.first_author_preserved),
            int(self.order.last_author_preserved),
            _cell(d["order"]["max_displacement"]),
        ]


def _num(x: Optional[float]) -> Optional[float]:
    return None if x is None else round(float(x), 6)


def _cell(x) -> str:
    return "" if x is None else str(x)


def overlap_stats(alignment: AuthorAlignment) -> OverlapStats:
    inter = len(alignment.matches)
    size_p = inter + len(alignment.p_only)
    size_d = inter + len(alignment.d_only)
    union = size_p + size_d - inter
    return OverlapStats(
        size_p=size_p,
        size_d=size_d,
        intersection=inter,
        symdiff=len(alignment.p_only) + len(alignment.d_only),
        jaccard=1.0 if union == 0 else inter / union,
    )


def kendall_tau(pairs: Sequence[Tuple[int, int]]) -> Optional[float]:
    """Tau-a over (rank_p, rank_d) pairs of distinct ranks; None below two pairs."""
    n = len(pairs)
    if n < 2:
        return None
    concordant = discordant = 0
    for i in range(n):
        pi, di = pairs[i]
        for j in range(i + 1, n):
            s = (pairs[j][0] - pi) * (pairs[j][1] - di)
            if s > 0:
                concordant += 1
            elif s < 0:
                discordant += 1
    return (concordant - discordant) / (n * (n - 1) / 2)


def _dense(values: Iterable[int]) -> dict:
    return {v: i for i, v in enumerate(sorted(set(values)), start=1)}


def _normalized_rank(rank: int, length: int) -> float:
    return 0.0 if length <= 1 else (rank - 1) / (length - 1)


def order_stats(
    alignment: AuthorAlignment, a_p: Sequence[AuthorName], a_d: Sequence[AuthorName]
) -> OrderStats:
    matches = alignment.matches
    dense_p = _dense(m[0] for m in matches)
    dense_d = _dense(m[1] for m in matches)
    pairs = sorted((dense_p[i], dense_d[j]) for i, j, _ in matches)
    len_p, len_d = len(a_p), len(a_d)
    matched = {(i, j) for i, j, _ in matches}
    displacement = None
    if matches:
        displacement = max(
            abs(_normalized_rank(i, len_p) - _normalized_rank(j, len_d)) for i, j, _ in matches
        )
    return OrderStats(
        kendall_tau=kendall_tau(pairs),
        first_author_preserved=(1, 1) in matched,
        last_author_preserved=len_p > 0 and len_d > 0 and (len_p, len_d) in matched,
        max_displacement=displacement,
    )


def analyze_couple(
    couple: LinkedCouple, index: GraphIndex, matcher: MatcherConfig = MatcherConfig()
) -> DriftReport:
    pub = index.get(couple.publication)
    sup = index.get(couple.supplement)
    if pub is None or sup is None:
        raise UnresolvableEndpoint(f"{couple.publication} -> {couple.supplement}")
    if pub.authorless or sup.authorless:
        raise AuthorlessEndpoint(f"{couple.publication} -> {couple.supplement}")
    alignment = matcher.align(pub.authors, sup.authors)
    return DriftReport(
        couple=couple,
        overlap=overlap_stats(alignment),
        order=order_stats(alignment, pub.authors, sup.authors),
        year=pub.date.year if pub.date else None,
        supplement_kind=sup.kind,
        alignment=alignment,
        subjects=pub.subjects,
    )


def analyze_couples(
    couples: Iterable[LinkedCouple],
    index: GraphIndex,
    matcher: MatcherConfig = MatcherConfig(),
    skips: Optional[Counter] = None,
) -> List[DriftReport]:
    """Analyze every couple, tallying per-reason skips instead of raising."""
    if skips is None:
        skips = Counter()
    reports = []
    for couple in couples:
        try:
            reports.append(analyze_couple(couple, index, matcher))
        except UnresolvableEndpoint:
            skips["unresolvable_endpoint"] += 1
        except AuthorlessEndpoint:
            skips["authorless_endpoint"] += 1
    return reports


def write_reports_jsonl(reports: Iterable[DriftReport], fh: IO[str]) -> None:
    for report in reports:
        fh.write(json.dumps(report.as_dict(), ensure_ascii=False))
        fh.write("\n")


def write_reports_csv(reports: Iterable[DriftReport], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for report in reports:
        writer.writerow(report.csv_row())


def read_reports_jsonl(fh: IO[str]) -> List[dict]:
    return [json.loads(line) for line in fh if line.strip()]
