"""Streaming readers for product and relation dumps.

Both dumps are JSON Lines, optionally gzip-compressed. Malformed lines never
abort a read: they are skipped and tallied in :class:`IngestStats` under a
reason label. Only an unreadable stream is fatal (:class:`IoFailure`).
"""

from __future__ import annotations

import gzip
import json
import logging
import multiprocessing
import os
import zlib
from collections import Counter
from dataclasses import dataclass, field
from itertools import islice
from typing import IO, Callable, Dict, Iterable, Iterator, List, Optional, Tuple, Union

from authordrift.errors import AuthorDriftError, IoFailure
from authordrift.model import (
    AuthorName,
    ProductId,
    ProductKind,
    Relation,
    ResearchProduct,
    Semantics,
    canonicalize_relation,
    date_in_range,
    normalize_name,
    normalize_pid,
    parse_partial_date,
)

log = logging.getLogger(__name__)

GZIP_MAGIC = b"\x1f\x8b\x08"  # magic + deflate method byte
BATCH_SIZE = 2000

PRODUCT_FIELDS = frozenset({"id", "kind", "title", "date", "authors", "subjects"})
PRODUCT_REQUIRED = frozenset({"id", "kind", "title", "authors"})
AUTHOR_FIELDS = frozenset({"name", "pid"})
RELATION_FIELDS = frozenset({"source", "target", "semantics"})

Source = Union[str, "os.PathLike[str]", IO[bytes]]


@dataclass
class IngestStats:
    lines_read: int = 0
    records_emitted: int = 0
    records_rejected: int = 0
    reject_reasons: Counter = field(default_factory=Counter)
    other_semantics: Counter = field(default_factory=Counter)

    def reject(self, reason: str) -> None:
        self.records_rejected += 1
        self.reject_reasons[reason] += 1

    def balanced(self) -> bool:
        return self.lines_read == self.records_emitted + self.records_rejected

    def as_dict(self) -> dict:
        out = {
            "lines_read": self.lines_read,
            "records_emitted": self.records_emitted,
            "records_rejected": self.records_rejected,
            "reject_reasons": dict(sorted(self.reject_reasons.items())),
        }
        if self.other_semantics:
            out["other_semantics"] = dict(sorted(self.other_semantics.items()))
        return out


def open_dump(path: Union[str, "os.PathLike[str]"]) -> IO[bytes]:
    """Open a dump for binary reading, transparently gunzipping by magic bytes."""
    try:
        fh = open(path, "rb")
        head = fh.read(3)
        fh.seek(0)
    except OSError as exc:
        raise IoFailure(f"cannot open {os.fspath(path)}: {exc.strerror or exc}") from exc
    if head == GZIP_MAGIC:
        return gzip.GzipFile(fileobj=fh, mode="rb")  # type: ignore[return-value]
    return fh


def _sniff_stream(stream: IO[bytes]) -> IO[bytes]:
    if isinstance(stream, gzip.GzipFile):
        return stream
    if hasattr(stream, "peek"):
        head = stream.peek(3)[:3]
    elif stream.seekable():
        head = stream.read(3)
        stream.seek(0)
    else:
        head = b""
    if head == GZIP_MAGIC:
        return gzip.GzipFile(fileobj=stream, mode="rb")  # type: ignore[return-value]
    return stream


def _decode(line: bytes) -> Union[dict, str]:
    """Turn a raw line into a JSON object or a reject reason."""
    line = line.strip()
    if not line:
        return "blank"
    try:
        text = line.decode("utf-8")
    except UnicodeDecodeError:
        return "encoding"
    try:
        obj = json.loads(text)
    except (ValueError, RecursionError):
        return "json"
    if not isinstance(obj, dict):
        return "not_object"
    return obj


def parse_product(line: bytes) -> Union[ResearchProduct, str]:
    """Parse one products line; returns the product or a reject reason."""
    obj = _decode(line)
    if isinstance(obj, str):
        return obj
    keys = obj.keys()
    if not keys <= PRODUCT_FIELDS:
        return "unknown_field"
    if not PRODUCT_REQUIRED <= keys:
        return "missing_field"
    try:
        pid = ProductId.parse(obj["id"])
    except AuthorDriftError:
        return "bad_id"
    try:
        kind = ProductKind(obj["kind"])
    except ValueError:
        return "bad_kind"
    title = obj["title"]
    if not isinstance(title, str):
        return "bad_title"
    date = None
    raw_date = obj.get("date")
    if raw_date is not None:
        if not isinstance(raw_date, str):
            return "bad_date"
        try:
            date = parse_partial_date(raw_date)
        except ValueError:
            return "bad_date"
        if not date_in_range(date):
            return "date_out_of_range"
    raw_authors = obj["authors"]
    if not isinstance(raw_authors, list):
        return "bad_author"
    authors = []
    for rank, entry in enumerate(raw_authors, start=1):
        if not isinstance(entry, dict) or not entry.keys() <= AUTHOR_FIELDS:
            return "bad_author"
        name, pid_raw = entry.get("name"), entry.get("pid")
        if not isinstance(name, str) or not (pid_raw is None or isinstance(pid_raw, str)):
            return "bad_author"
        try:
            author = normalize_name(name)
        except AuthorDriftError:
            return "bad_author"
        authors.append(
            AuthorName(
                author.raw,
                author.family,
                author.given_tokens,
                normalize_pid(pid_raw) if pid_raw else None,
                rank,
                author.organization,
            )
        )
    subjects = obj.get("subjects")
    if subjects is None:
        subjects = ()
    elif isinstance(subjects, list) and all(isinstance(s, str) for s in subjects):
        subjects = tuple(subjects)
    else:
        return "bad_subjects"
    return ResearchProduct(
        id=pid, kind=kind, title=title, date=date, authors=tuple(authors), subjects=subjects
    )


def parse_relation(line: bytes) -> Union[Relation, str]:
    """Parse one relations line into a canonical relation or a reject reason."""
    obj = _decode(line)
    if isinstance(obj, str):
        return obj
    if obj.keys() != RELATION_FIELDS:
        return "unknown_field" if not obj.keys() <= RELATION_FIELDS else "missing_field"
    try:
        source = ProductId.parse(obj["source"])
        target = ProductId.parse(obj["target"])
    except AuthorDriftError:
        return "bad_id"
    label = obj["semantics"]
    if not isinstance(label, str) or not label.strip():
        return "bad_semantics"
    if source == target:
        return "self_loop"
    semantics = Semantics.parse(label)
    relation = Relation(
        source, target, semantics, label.strip() if semantics is Semantics.OTHER else None
    )
    return canonicalize_relation(relation)


def _parse_batch(args: Tuple[Callable, List[bytes]]) -> list:
    parser, lines = args
    return [parser(line) for line in lines]


def _lines(stream: IO[bytes]) -> Iterator[bytes]:
    try:
        yield from stream
    except (OSError, EOFError, zlib.error) as exc:
        raise IoFailure(f"read failed: {exc}") from exc


def _open_source(source: Source) -> Tuple[IO[bytes], bool]:
    if isinstance(source, (str, os.PathLike)):
        return open_dump(source), True
    return _sniff_stream(source), False


def _stream_records(
    stream: IO[bytes], owned: bool, parser: Callable, stats: IngestStats, jobs: int,
    record_type: type,
) -> Iterator:
    try:
        lines = _lines(stream)
        if jobs > 1:
            batches = iter(lambda: list(islice(lines, BATCH_SIZE)), [])
            with multiprocessing.Pool(jobs) as pool:
                for parsed in pool.imap(_parse_batch, ((parser, b) for b in batches)):
                    yield from _account(parsed, stats, record_type)
        else:
            for line in lines:
                yield from _account((parser(line),), stats, record_type)
    finally:
        if owned:
            stream.close()


def _account(parsed: Iterable, stats: IngestStats, record_type: type) -> Iterator:
    for item in parsed:
        stats.lines_read += 1
        if isinstance(item, record_type):
            stats.records_emitted += 1
            if record_type is Relation and item.semantics is Semantics.OTHER:
                stats.other_semantics[item.label] += 1
            yield item
        else:
            stats.reject(item)


def read_products(source: Source, jobs: int = 1) -> Tuple[Iterator[ResearchProduct], IngestStats]:
    """Lazily read a products dump.

    ``source`` is a path or a binary stream. The returned stats object fills
    in as the iterator is consumed. Opening a path fails eagerly.
    """
    stats = IngestStats()
    stream, owned = _open_source(source)
    return _stream_records(stream, owned, parse_product, stats, jobs, ResearchProduct), stats


def read_relations(source: Source, jobs: int = 1) -> Tuple[Iterator[Relation], IngestStats]:
    """Lazily read a relations dump; every emitted relation is canonical."""
    stats = IngestStats()
    stream, owned = _open_source(source)
    return _stream_records(stream, owned, parse_relation, stats, jobs, Relation), stats


class GraphIndex:
    """In-memory product lookup and per-semantics adjacency.

    Duplicate product ids keep their first occurrence. Identical canonical
    relations collapse to one edge with a multiplicity count. Relations with
    an unknown endpoint are set aside as dangling.
    """

    def __init__(self) -> None:
        self.products: Dict[ProductId, ResearchProduct] = {}
        self.duplicate_products = 0
        self.edge_multiplicity: Dict[Relation, int] = {}
        self.dangling: Dict[Relation, int] = {}
        self._by_semantics: Dict[Semantics, List[Relation]] = {}

    def get(self, pid: ProductId) -> Optional[ResearchProduct]:
        return self.products.get(pid)

    def __contains__(self, pid: object) -> bool:
        return pid in self.products

    def __len__(self) -> int:
        return len(self.products)

    def edges(self, *semantics: Semantics) -> List[Relation]:
        """Usable edges of the given semantics, in first-seen order."""
        if not semantics:
            return list(self.edge_multiplicity)
        out: List[Relation] = []
        for s in semantics:
            out.extend(self._by_semantics.get(s, ()))
        return out

    @property
    def n_edges(self) -> int:
        return len(self.edge_multiplicity)

    def summary(self) -> dict:
        return {
            "products": len(self.products),
            "duplicate_products": self.duplicate_products,
            "edges": self.n_edges,
            "edge_occurrences": sum(self.edge_multiplicity.values()),
            "dangling": len(self.dangling),
        }


def build_index(products: Iterable[ResearchProduct], relations: Iterable[Relation]) -> GraphIndex:
    index = GraphIndex()
    for product in products:
        if product.id in index.products:
            index.duplicate_products += 1
        else:
            index.products[product.id] = product
    for rel in relations:
        rel = canonicalize_relation(rel)
        if rel.source not in index.products or rel.target not in index.products:
            index.dangling[rel] = index.dangling.get(rel, 0) + 1
            continue
        count = index.edge_multiplicity.get(rel)
        if count is None:
            index.edge_multiplicity[rel] = 1
            index._by_semantics.setdefault(rel.semantics, []).append(rel)
        else:
            index.edge_multiplicity[rel] = count + 1
    log.debug("index built: %s", index.summary())
    return index


def load_index(products_path: Source, relations_path: Source, jobs: int = 1):
    """Read both dumps and build the index; returns ``(index, product_stats, relation_stats)``."""
    products, pstats = read_products(products_path, jobs=jobs)
    relations, rstats = read_relations(relations_path, jobs=jobs)
    index = build_index(products, relations)
    return index, pstats, rstats
