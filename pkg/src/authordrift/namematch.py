"""Fuzzy author identity and one-to-one alignment of two author lists."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

from authordrift.model import AuthorName

DEFAULT_THRESHOLD = 0.25
# Added to the given-name component when family names differ by one edit.
FAMILY_TYPO_PENALTY = 0.1
# Upper bound of the given-name component; keeps it strictly below 1.
GIVEN_SCALE = 0.9

Distance = Callable[[AuthorName, AuthorName], float]


@dataclass(frozen=True)
class AuthorAlignment:
    matches: Tuple[Tuple[int, int, float], ...]  # (rank_in_p, rank_in_d, distance)
    p_only: Tuple[int, ...]
    d_only: Tuple[int, ...]

    def as_dict(self) -> dict:
        return {
            "matches": [list(m) for m in self.matches],
            "p_only": list(self.p_only),
            "d_only": list(self.d_only),
        }


@dataclass(frozen=True)
class MatcherConfig:
    threshold: float = DEFAULT_THRESHOLD
    exact: bool = False

    def distance(self) -> Distance:
        return exact_distance if self.exact else author_distance

    def align(self, a_p: Sequence[AuthorName], a_d: Sequence[AuthorName]) -> AuthorAlignment:
        threshold = 0.0 if self.exact else self.threshold
        return match_author_lists(a_p, a_d, threshold, self.distance())

    def shares_author(self, a_p: Sequence[AuthorName], a_d: Sequence[AuthorName]) -> bool:
        threshold = 0.0 if self.exact else self.threshold
        dist = self.distance()
        return any(dist(a, b) <= threshold for a in a_p for b in a_d)


def within_one_edit(a: str, b: str) -> bool:
    """True when the Levenshtein distance between ``a`` and ``b`` is at most 1."""
    if a == b:
        return True
    la, lb = len(a), len(b)
    if abs(la - lb) > 1:
        return False
    if la > lb:
        a, b, la, lb = b, a, lb, la
    i = 0
    while i < la and a[i] == b[i]:
        i += 1
    if la == lb:
        return a[i + 1:] == b[i + 1:]
    return a[i:] == b[i + 1:]


def levenshtein(a: Sequence, b: Sequence, sub_cost: Callable = None) -> float:
    """Edit distance with unit insert/delete and pluggable substitution cost."""
    if sub_cost is None:
        sub_cost = lambda x, y: 0 if x == y else 1  # noqa: E731
    prev = [float(j) for j in range(len(b) + 1)]
    for i, x in enumerate(a, start=1):
        cur = [float(i)] + [0.0] * len(b)
        for j, y in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + sub_cost(x, y))
        prev = cur
    return prev[-1]


def _tokens_compatible(x: str, y: str) -> bool:
    if x == y:
        return True
    if len(x) == 1 or len(y) == 1:
        return x[0] == y[0]
    return False


def _token_cost(x: str, y: str) -> float:
    if _tokens_compatible(x, y):
        return 0.0
    if len(x) == 1 or len(y) == 1:
        return 1.0
    return levenshtein(x, y) / max(len(x), len(y))


def _is_extension(short: Sequence[str], long: Sequence[str]) -> bool:
    """Whether ``short`` embeds in order into ``long`` under initial-compatibility."""
    # reach[j]: first j tokens of short embed into the prefix scanned so far
    reach = [True] + [False] * len(short)
    for tok in long:
        for j in range(len(short), 0, -1):
            if reach[j - 1] and _tokens_compatible(short[j - 1], tok):
                reach[j] = True
    return reach[-1]


def given_name_distance(a: Sequence[str], b: Sequence[str]) -> float:
    """Given-name component in ``[0, 1)``.

    Zero when one token sequence equals or extends the other, where a
    one-letter token matches any token with that initial
    (``christopher p`` vs ``christopher``). Otherwise a token-level edit
    distance, normalized by the longer sequence and scaled below 1.
    """
    if tuple(a) == tuple(b):
        return 0.0
    short, long = (a, b) if len(a) <= len(b) else (b, a)
    if _is_extension(short, long):
        return 0.0
    scaled = levenshtein(a, b, _token_cost) / max(len(a), len(b))
    return GIVEN_SCALE * min(scaled, 1.0)


def author_distance(a: AuthorName, b: AuthorName) -> float:
    if a.pid and b.pid:
        return 0.0 if a.pid == b.pid else 1.0
    if a.family == b.family:
        penalty = 0.0
    elif within_one_edit(a.family, b.family):
        penalty = FAMILY_TYPO_PENALTY
    else:
        return 1.0
    return min(1.0, penalty + given_name_distance(a.given_tokens, b.given_tokens))


def exact_distance(a: AuthorName, b: AuthorName) -> float:
    """Plain string match on the normalized full name (pids ignored)."""
    return 0.0 if a.full_key == b.full_key else 1.0


def match_author_lists(
    a_p: Sequence[AuthorName],
    a_d: Sequence[AuthorName],
    threshold: float = DEFAULT_THRESHOLD,
    distance: Distance = author_distance,
) -> AuthorAlignment:
    """Greedy one-to-one alignment of two author lists.

    Candidate pairs with distance at most ``threshold`` are taken in
    ascending ``(distance, rank_p, rank_d)`` order, skipping any pair whose
    rank is already used. Ranks are 1-based list positions.
    """
    candidates: List[Tuple[float, int, int]] = []
    for i, a in enumerate(a_p, start=1):
        for j, b in enumerate(a_d, start=1):
            d = distance(a, b)
            if d <= threshold:
                candidates.append((d, i, j))
    candidates.sort()
    used_p, used_d = set(), set()
    matches = []
    for d, i, j in candidates:
        if i in used_p or j in used_d:
            continue
        used_p.add(i)
        used_d.add(j)
        matches.append((i, j, d))
    matches.sort(key=lambda m: (m[0], m[1]))
    return AuthorAlignment(
        matches=tuple(matches),
        p_only=tuple(i for i in range(1, len(a_p) + 1) if i not in used_p),
        d_only=tuple(j for j in range(1, len(a_d) + 1) if j not in used_d),
    )
