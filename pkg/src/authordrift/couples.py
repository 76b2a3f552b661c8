"""Publication-supplement couples and their JSON Lines checkpoint format."""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, List, Optional

from authordrift.ingest import GraphIndex
from authordrift.model import ProductId, ProductKind, Semantics


class Provenance(str, enum.Enum):
    DECLARED = "declared"
    RETROFITTED_SIMPLE = "retrofitted_simple"
    RETROFITTED_SIMILARITY = "retrofitted_similarity"


@dataclass(frozen=True)
class LinkedCouple:
    publication: ProductId
    supplement: ProductId
    provenance: Provenance = Provenance.DECLARED
    score: Optional[float] = None
    supplement_kind: Optional[ProductKind] = None

    @property
    def pair(self) -> tuple:
        return (self.publication, self.supplement)

    def sort_key(self) -> tuple:
        return (self.publication.value, self.supplement.value)

    def to_json(self) -> str:
        obj = {
            "publication": self.publication.value,
            "supplement": self.supplement.value,
            "provenance": self.provenance.value,
        }
        if self.score is not None:
            obj["score"] = round(self.score, 6)
        if self.supplement_kind is not None:
            obj["supplement_kind"] = self.supplement_kind.value
        return json.dumps(obj, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "LinkedCouple":
        obj = json.loads(line)
        kind = obj.get("supplement_kind")
        return cls(
            publication=ProductId.parse(obj["publication"]),
            supplement=ProductId.parse(obj["supplement"]),
            provenance=Provenance(obj.get("provenance", "declared")),
            score=obj.get("score"),
            supplement_kind=ProductKind(kind) if kind else None,
        )


def write_couples(couples: Iterable[LinkedCouple], fh: IO[str]) -> int:
    n = 0
    for couple in couples:
        fh.write(couple.to_json())
        fh.write("\n")
        n += 1
    return n


def read_couples(fh: IO[str]) -> Iterator[LinkedCouple]:
    for line in fh:
        if line.strip():
            yield LinkedCouple.from_json(line)


def select_declared_couples(
    index: GraphIndex, exclusions: Optional[Counter] = None
) -> List[LinkedCouple]:
    """One couple per canonical ``IsSupplementedBy`` edge that passes the kind check.

    Edges whose source is not a publication or whose target is not a dataset
    or software are excluded and tallied in ``exclusions`` under
    ``wrong_kind``; dangling supplement relations count as
    ``missing_endpoint``. Couples with an authorless endpoint are kept and
    tallied under ``authorless``. Output is sorted by (publication, supplement).
    """
    if exclusions is None:
        exclusions = Counter()
    for rel in index.dangling:
        if rel.semantics is Semantics.IS_SUPPLEMENTED_BY:
            exclusions["missing_endpoint"] += 1
    couples = {}
    for rel in index.edges(Semantics.IS_SUPPLEMENTED_BY):
        pub, sup = index.products[rel.source], index.products[rel.target]
        if pub.kind is not ProductKind.PUBLICATION or not sup.kind.is_supplement:
            exclusions["wrong_kind"] += 1
            continue
        if pub.authorless or sup.authorless:
            exclusions["authorless"] += 1
        couples[(pub.id, sup.id)] = LinkedCouple(
            publication=pub.id,
            supplement=sup.id,
            provenance=Provenance.DECLARED,
            supplement_kind=sup.kind,
        )
    return sorted(couples.values(), key=LinkedCouple.sort_key)
