"""Domain types shared by every pipeline stage, plus name normalization.

All types are frozen dataclasses; nothing here holds mutable state.
"""

from __future__ import annotations

import datetime as dt
import enum
import functools
import re
import unicodedata
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from authordrift.errors import EmptyName, InvalidIdentifier, SelfLoop, UnparsableName

EARLIEST_DATE = dt.date(1500, 1, 1)

_DOI_PREFIXES = (
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi.org/",
    "doi:",
)
_ORCID_PREFIXES = ("https://orcid.org/", "http://orcid.org/", "orcid.org/")

# Typographic variants folded before tokenization.
_CHAR_FOLD = str.maketrans(
    {
        "’": "'",
        "‘": "'",
        "ʼ": "'",
        "`": "'",
        "‐": "-",
        "‑": "-",
    }
)
_SEPARATOR = re.compile(r"[^\w'-]|[\d_]")


class ProductKind(str, enum.Enum):
    PUBLICATION = "publication"
    DATASET = "dataset"
    SOFTWARE = "software"
    OTHER = "other"

    @property
    def is_supplement(self) -> bool:
        return self in (ProductKind.DATASET, ProductKind.SOFTWARE)


class Semantics(str, enum.Enum):
    IS_SUPPLEMENT_TO = "IsSupplementTo"
    IS_SUPPLEMENTED_BY = "IsSupplementedBy"
    CITES = "Cites"
    IS_CITED_BY = "IsCitedBy"
    REFERENCES = "References"
    IS_REFERENCED_BY = "IsReferencedBy"
    OTHER = "other"

    @classmethod
    def parse(cls, label: str) -> "Semantics":
        """Case-insensitive lookup; unknown labels map to OTHER."""
        return _SEMANTICS_BY_LOWER.get(label.strip().lower(), cls.OTHER)


_SEMANTICS_BY_LOWER = {s.value.lower(): s for s in Semantics if s is not Semantics.OTHER}

_INVERSE = {
    Semantics.IS_SUPPLEMENT_TO: Semantics.IS_SUPPLEMENTED_BY,
    Semantics.IS_CITED_BY: Semantics.CITES,
    Semantics.IS_REFERENCED_BY: Semantics.REFERENCES,
}

VANILLA = frozenset({Semantics.CITES, Semantics.REFERENCES})


@dataclass(frozen=True)
class ProductId:
    scheme: str
    value: str

    @classmethod
    def parse(cls, raw: str) -> "ProductId":
        """Build an identifier from a dump string.

        Values are lowercased and stripped; DOI resolver prefixes are removed
        so that ``https://doi.org/10.1/X`` and ``10.1/x`` compare equal.
        """
        if not isinstance(raw, str):
            raise InvalidIdentifier(f"identifier must be a string, got {type(raw).__name__}")
        value = raw.strip().lower()
        if value.startswith("10."):
            return cls("doi", value)
        for prefix in _DOI_PREFIXES:
            if value.startswith(prefix):
                value = value[len(prefix):].strip()
                break
        if not value:
            raise InvalidIdentifier(f"empty identifier: {raw!r}")
        scheme = "doi" if value.startswith("10.") else "other"
        return cls(scheme, value)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AuthorName:
    raw: str
    family: str
    given_tokens: Tuple[str, ...] = ()
    pid: Optional[str] = None
    rank: Optional[int] = None
    organization: bool = False

    @property
    def full_key(self) -> str:
        """Normalized full name, used for exact matching."""
        return self.family + "|" + " ".join(self.given_tokens)

    @property
    def initial_key(self) -> str:
        return self.family + "|" + (self.given_tokens[0][0] if self.given_tokens else "")

    def render(self) -> str:
        """The normalized name laid out as ``family, given ...``."""
        if self.given_tokens:
            return f"{self.family}, {' '.join(self.given_tokens)}"
        return self.family

    def with_rank(self, rank: int) -> "AuthorName":
        return replace(self, rank=rank)


@dataclass(frozen=True)
class ResearchProduct:
    id: ProductId
    kind: ProductKind
    title: str
    date: Optional[dt.date] = None
    authors: Tuple[AuthorName, ...] = ()
    subjects: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.date is not None and not date_in_range(self.date):
            raise ValueError(f"date {self.date} outside [{EARLIEST_DATE}, today + 1 year]")

    @property
    def authorless(self) -> bool:
        return not self.authors


@dataclass(frozen=True)
class Relation:
    source: ProductId
    target: ProductId
    semantics: Semantics
    label: Optional[str] = None  # original label, kept for OTHER

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise SelfLoop(f"relation from {self.source} to itself")

    @property
    def display_label(self) -> str:
        if self.semantics is Semantics.OTHER:
            return f"other({self.label})"
        return self.semantics.value


def date_in_range(value: dt.date, today: Optional[dt.date] = None) -> bool:
    return EARLIEST_DATE <= value <= _latest_date(today or dt.date.today())


@functools.lru_cache(maxsize=8)
def _latest_date(today: dt.date) -> dt.date:
    try:
        return today.replace(year=today.year + 1)
    except ValueError:  # Feb 29
        return today.replace(year=today.year + 1, day=28)


_DATE_RE = re.compile(r"^(\d{4})(?:-(\d{1,2})(?:-(\d{1,2}))?)?$")


def parse_partial_date(text: str) -> dt.date:
    """Parse ``YYYY``, ``YYYY-MM`` or ``YYYY-MM-DD`` (a trailing time part is ignored).

    Year-only dates complete to July 1st and year-month dates to the 15th.
    """
    text = text.strip()
    if "T" in text:
        text = text.split("T", 1)[0]
    m = _DATE_RE.match(text)
    if not m:
        raise ValueError(f"unrecognized date: {text!r}")
    year = int(m.group(1))
    if m.group(2) is None:
        return dt.date(year, 7, 1)
    month = int(m.group(2))
    if m.group(3) is None:
        return dt.date(year, month, 15)
    return dt.date(year, month, int(m.group(3)))


def fold_text(text: str) -> str:
    """Compatibility-decompose, strip diacritics and case-fold."""
    if text.isascii():
        return text.translate(_CHAR_FOLD).lower()
    folded = _strip_marks(text.translate(_CHAR_FOLD)).casefold()
    if folded.isascii():
        return folded
    # casefold can reintroduce combining sequences (e.g. Greek dialytika)
    return _strip_marks(folded).casefold()


def _strip_marks(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c))


def _tokens(text: str) -> list[str]:
    out = []
    for tok in _SEPARATOR.sub(" ", text).split():
        if not tok.isascii():
            # \w also admits non-decimal numerics (e.g. Tamil ten)
            tok = "".join(c if c.isalpha() or c in "-'" else " " for c in tok)
            out.extend(_tokens(tok) if " " in tok else _clean(tok))
            continue
        out.extend(_clean(tok))
    return out


def _clean(tok: str) -> list[str]:
    # after stripping, a surviving token starts with a letter
    tok = tok.strip("-'")
    return [tok] if tok else []


def normalize_text(text: str) -> str:
    """Fold ``text`` and keep only its word tokens, single-space separated."""
    return " ".join(_tokens(fold_text(text)))


def normalize_name(raw: str) -> AuthorName:
    """Split a raw author string into a normalized family name and given tokens.

    ``"Family, Given Given2"`` splits at the first comma; anything else is
    treated as ``"Given ... Family"`` with the last token as family name.
    Initials such as ``"P."`` or ``"J.-P."`` become one-letter tokens.
    Multi-word family names (comma layout only) are joined without a separator.

    Raises:
        EmptyName: ``raw`` is empty or whitespace.
        UnparsableName: nothing alphabetic survives normalization.
    """
    if not isinstance(raw, str) or not raw.strip():
        raise EmptyName("author name is empty")
    family, given, organization = _split_name(raw)
    return AuthorName(raw=raw, family=family, given_tokens=given, organization=organization)


@functools.lru_cache(maxsize=1 << 18)
def _split_name(raw: str) -> Tuple[str, Tuple[str, ...], bool]:
    folded = fold_text(raw)
    family_tokens: list[str] = []
    given: list[str] = []
    if "," in folded:
        family_part, given_part = folded.split(",", 1)
        family_tokens = _tokens(family_part)
        given = _tokens(given_part)
    if not family_tokens:
        toks = _tokens(folded)
        if not toks:
            raise UnparsableName(f"no alphabetic content in {raw!r}")
        family_tokens, given = toks[-1:], toks[:-1]
    organization = "," not in raw and len(raw.split()) > 4
    return "".join(family_tokens), tuple(given), organization


def normalize_pid(pid: str) -> Optional[str]:
    value = pid.strip()
    lowered = value.lower()
    for prefix in _ORCID_PREFIXES:
        if lowered.startswith(prefix):
            value = value[len(prefix):]
            break
    return value.upper() or None


def canonicalize_relation(r: Relation) -> Relation:
    """Flip inverse semantics so that edges point publication-side first.

    ``IsSupplementTo(d -> p)`` becomes ``IsSupplementedBy(p -> d)``;
    ``IsCitedBy`` and ``IsReferencedBy`` flip to ``Cites`` and ``References``.
    """
    flipped = _INVERSE.get(r.semantics)
    if flipped is None:
        return r
    return Relation(source=r.target, target=r.source, semantics=flipped, label=r.label)
