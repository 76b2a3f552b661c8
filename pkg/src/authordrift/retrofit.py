"""Recover supplement couples hidden behind plain citation edges.

Two heuristics run over the same candidate set, the canonical ``Cites`` and
``References`` edges joining a publication to a dataset or software record:

* ``retrofit_simple`` accepts a candidate whose author lists share at least
  one person and whose dates fall within a window.
* ``retrofit_by_similarity`` scores candidates with a weighted feature
  similarity and accepts those inside an interval calibrated on declared
  couples.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from authordrift.couples import LinkedCouple, Provenance, select_declared_couples
from authordrift.errors import CalibrationUnderflow, MissingTitle
from authordrift.ingest import GraphIndex
from authordrift.model import ProductId, ProductKind, ResearchProduct, VANILLA, normalize_text
from authordrift.namematch import MatcherConfig

MIN_CALIBRATION_COUPLES = 30

Pair = Tuple[ProductId, ProductId]


@dataclass(frozen=True)
class RetrofitConfig:
    window_days: int = 183
    weights: Tuple[float, float, float] = (0.5, 0.3, 0.2)  # title, authors, date
    tau_days: float = 90.0
    k: float = 2.0

    def __post_init__(self) -> None:
        if len(self.weights) != 3 or any(w < 0 for w in self.weights):
            raise ValueError(f"weights must be three non-negative numbers: {self.weights}")
        if not math.isclose(sum(self.weights), 1.0, abs_tol=1e-9):
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")
        if self.tau_days <= 0:
            raise ValueError("tau_days must be positive")
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.window_days < 0:
            raise ValueError("window_days must be non-negative")


@dataclass(frozen=True)
class FeatureVector:
    date: Optional[object]  # datetime.date
    title_trigrams: FrozenSet[str]
    author_keys: FrozenSet[str]


@dataclass(frozen=True)
class SimilarityInterval:
    lower: float
    upper: float
    sample_size: int
    mean: float
    stddev: float

    def __contains__(self, score: float) -> bool:
        return self.lower <= score <= self.upper

    def as_dict(self) -> dict:
        return {
            "lower": round(self.lower, 6),
            "upper": round(self.upper, 6),
            "mean": round(self.mean, 6),
            "stddev": round(self.stddev, 6),
            "sample_size": self.sample_size,
        }


def trigrams(text: str) -> FrozenSet[str]:
    """Character 3-grams; strings shorter than three characters yield themselves."""
    if len(text) < 3:
        return frozenset({text}) if text else frozenset()
    return frozenset(text[i:i + 3] for i in range(len(text) - 2))


def jaccard(a: FrozenSet, b: FrozenSet) -> float:
    if not a and not b:
        return 1.0
    inter = len(a & b)
    return inter / (len(a) + len(b) - inter)


def feature_vector(x: ResearchProduct) -> FeatureVector:
    if not x.title or not x.title.strip():
        raise MissingTitle(f"{x.id} has no title")
    return FeatureVector(
        date=x.date,
        title_trigrams=trigrams(normalize_text(x.title)),
        author_keys=frozenset(a.initial_key for a in x.authors),
    )


def similarity(a: FeatureVector, b: FeatureVector, config: RetrofitConfig = RetrofitConfig()) -> float:
    w_title, w_auth, w_date = config.weights
    score = w_title * jaccard(a.title_trigrams, b.title_trigrams)
    score += w_auth * jaccard(a.author_keys, b.author_keys)
    if a.date is not None and b.date is not None:
        score += w_date * math.exp(-abs((a.date - b.date).days) / config.tau_days)
    return min(1.0, max(0.0, score))


def temporal_proximity(
    p: ResearchProduct, d: ResearchProduct, window_days: int, missing: Optional[Counter] = None
) -> bool:
    if p.date is None or d.date is None:
        if missing is not None:
            missing["missing_date"] += 1
        return False
    return abs((p.date - d.date).days) <= window_days


def candidate_pairs(index: GraphIndex) -> List[Tuple[ResearchProduct, ResearchProduct]]:
    """Publication/supplement pairs joined by a canonical Cites or References edge.

    Either direction counts; each pair appears once, sorted by identifier.
    """
    seen: Dict[Pair, Tuple[ResearchProduct, ResearchProduct]] = {}
    for rel in index.edges(*sorted(VANILLA)):
        a, b = index.products[rel.source], index.products[rel.target]
        if a.kind is ProductKind.PUBLICATION and b.kind.is_supplement:
            pub, sup = a, b
        elif b.kind is ProductKind.PUBLICATION and a.kind.is_supplement:
            pub, sup = b, a
        else:
            continue
        seen.setdefault((pub.id, sup.id), (pub, sup))
    return [seen[k] for k in sorted(seen, key=lambda k: (k[0].value, k[1].value))]


def _pairs(couples: Optional[Iterable[LinkedCouple]]) -> Set[Pair]:
    return {c.pair for c in couples} if couples is not None else set()


def retrofit_simple(
    index: GraphIndex,
    matcher: MatcherConfig = MatcherConfig(),
    window_days: int = 183,
    declared: Optional[Iterable[LinkedCouple]] = None,
    counts: Optional[Counter] = None,
) -> List[LinkedCouple]:
    """Promote candidates with a shared author and dates within ``window_days``.

    ``declared`` defaults to the index's declared couples; those pairs are
    never emitted.
    """
    if counts is None:
        counts = Counter()
    if declared is None:
        declared = select_declared_couples(index)
    skip = _pairs(declared)
    out = []
    for pub, sup in candidate_pairs(index):
        counts["candidates"] += 1
        if (pub.id, sup.id) in skip:
            counts["already_declared"] += 1
            continue
        if not temporal_proximity(pub, sup, window_days, counts):
            continue
        if not matcher.shares_author(pub.authors, sup.authors):
            continue
        out.append(
            LinkedCouple(pub.id, sup.id, Provenance.RETROFITTED_SIMPLE, supplement_kind=sup.kind)
        )
    counts["retrofitted_simple"] += len(out)
    return out


class FeatureCache:
    """Memoized feature vectors keyed by product id."""

    def __init__(self) -> None:
        self._cache: Dict[ProductId, Optional[FeatureVector]] = {}

    def get(self, product: ResearchProduct) -> Optional[FeatureVector]:
        try:
            return self._cache[product.id]
        except KeyError:
            pass
        try:
            fv = feature_vector(product)
        except MissingTitle:
            fv = None
        self._cache[product.id] = fv
        return fv


def calibrate_interval(
    declared: Sequence[LinkedCouple],
    index: GraphIndex,
    k: float = 2.0,
    config: RetrofitConfig = RetrofitConfig(),
    cache: Optional[FeatureCache] = None,
) -> SimilarityInterval:
    """Band ``mean +/- k * stddev`` of declared-couple similarities, clamped to [0, 1].

    Uses the population standard deviation. Couples with a missing endpoint
    or an untitled endpoint are ignored.

    Raises:
        CalibrationUnderflow: fewer than 30 usable couples.
    """
    cache = cache or FeatureCache()
    scores = []
    for couple in declared:
        pub, sup = index.get(couple.publication), index.get(couple.supplement)
        if pub is None or sup is None:
            continue
        fp, fs = cache.get(pub), cache.get(sup)
        if fp is None or fs is None:
            continue
        scores.append(similarity(fp, fs, config))
    if len(scores) < MIN_CALIBRATION_COUPLES:
        raise CalibrationUnderflow(len(scores), MIN_CALIBRATION_COUPLES)
    mean = statistics.fmean(scores)
    sd = statistics.pstdev(scores, mu=mean)
    return SimilarityInterval(
        lower=max(0.0, mean - k * sd),
        upper=min(1.0, mean + k * sd),
        sample_size=len(scores),
        mean=mean,
        stddev=sd,
    )


def retrofit_by_similarity(
    index: GraphIndex,
    interval: SimilarityInterval,
    config: RetrofitConfig = RetrofitConfig(),
    exclude: Optional[Iterable[LinkedCouple]] = None,
    counts: Optional[Counter] = None,
    cache: Optional[FeatureCache] = None,
) -> List[LinkedCouple]:
    """Promote candidates whose similarity lies inside ``interval``.

    ``exclude`` holds couples already known (declared and simple-retrofitted);
    it defaults to the index's declared couples.
    """
    if counts is None:
        counts = Counter()
    if exclude is None:
        exclude = select_declared_couples(index)
    cache = cache or FeatureCache()
    skip = _pairs(exclude)
    out = []
    for pub, sup in candidate_pairs(index):
        if (pub.id, sup.id) in skip:
            continue
        fp, fs = cache.get(pub), cache.get(sup)
        if fp is None or fs is None:
            counts["missing_title"] += 1
            continue
        score = similarity(fp, fs, config)
        if score in interval:
            out.append(
                LinkedCouple(
                    pub.id, sup.id, Provenance.RETROFITTED_SIMILARITY, score, supplement_kind=sup.kind
                )
            )
    counts["retrofitted_similarity"] += len(out)
    return out
