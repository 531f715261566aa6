"""Inverted index, collection statistics, and their on-disk formats.

Postings are kept per field: ``field -> term -> [Posting(doc, tf), ...]``
with ``doc`` the dense ingestion ordinal. Document frequency is counted
at field level, i.e. the number of documents whose *field* contains the
term.
"""

from __future__ import annotations

import json
import math
import struct
import zlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from fieldrank.analysis import analyze

INDEX_MAGIC = b"FRANKIDX"
INDEX_VERSION = 1
_HEADER = struct.Struct(">8sH")


class IndexFormatError(ValueError):
    """Raised when an index, stats, or corpus file cannot be read."""


class Posting(NamedTuple):
    doc: int
    tf: int


@dataclass(frozen=True)
class Document:
    ext_id: str
    fields: Mapping[str, str]

    def __post_init__(self) -> None:
        if not isinstance(self.ext_id, str) or not self.ext_id:
            raise ValueError("document id must be a non-empty string")
        for name, text in self.fields.items():
            _check_field_name(name)
            if not isinstance(text, str):
                raise ValueError(f"field {name!r} of {self.ext_id!r} is not text")


def _check_field_name(name: str) -> None:
    if not isinstance(name, str) or not name:
        raise ValueError("field name must be a non-empty string")
    if "\t" in name or "\n" in name or "\r" in name:
        raise ValueError(f"field name {name!r} contains a tab or newline")


@dataclass(frozen=True)
class CollectionStats:
    """N, per-field length totals and averages, and field-level df."""

    n_docs: int
    field_total_len: Mapping[str, int]
    field_avg_len: Mapping[str, float]
    doc_freq: Mapping[str, Mapping[str, int]] = field(repr=False)

    def df(self, field_name: str, term: str) -> int:
        return self.doc_freq.get(field_name, {}).get(term, 0)

    @classmethod
    def from_totals(
        cls,
        n_docs: int,
        totals: Mapping[str, int],
        doc_freq: Mapping[str, Mapping[str, int]],
    ) -> CollectionStats:
        avg = {f: t / n_docs for f, t in totals.items()} if n_docs else {}
        return cls(
            n_docs=n_docs,
            field_total_len=MappingProxyType(dict(totals)),
            field_avg_len=MappingProxyType(avg),
            doc_freq=MappingProxyType(
                {f: MappingProxyType(dict(d)) for f, d in doc_freq.items()}
            ),
        )


class InvertedIndex:
    """Committed, read-only index. Safe to share between threads."""

    def __init__(
        self,
        fields: Sequence[str],
        ext_ids: Sequence[str],
        lengths: Mapping[str, Sequence[int]],
        postings: Mapping[str, Mapping[str, Sequence[Posting]]],
    ) -> None:
        self._fields = tuple(fields)
        self._ext_ids = tuple(ext_ids)
        self._ordinals = {e: i for i, e in enumerate(self._ext_ids)}
        self._lengths = {f: tuple(lengths[f]) for f in self._fields}
        self._postings = {
            f: {t: tuple(p) for t, p in postings[f].items()} for f in self._fields
        }
        self.stats = CollectionStats.from_totals(
            len(self._ext_ids),
            {f: sum(self._lengths[f]) for f in self._fields},
            {f: {t: len(p) for t, p in self._postings[f].items()} for f in self._fields},
        )

    @property
    def fields(self) -> tuple[str, ...]:
        return self._fields

    @property
    def n_docs(self) -> int:
        return len(self._ext_ids)

    def ext_id(self, doc: int) -> str:
        self._check_doc(doc)
        return self._ext_ids[doc]

    def ordinal(self, ext_id: str) -> int:
        return self._ordinals[ext_id]

    def doc_freq(self, field_name: str, term: str) -> int:
        return len(self._postings.get(field_name, {}).get(term, ()))

    def postings(self, field_name: str, term: str) -> tuple[Posting, ...]:
        return self._postings.get(field_name, {}).get(term, ())

    def field_length(self, doc: int, field_name: str) -> int:
        self._check_doc(doc)
        if field_name not in self._lengths:
            return 0
        return self._lengths[field_name][doc]

    def terms(self, field_name: str) -> Iterator[str]:
        return iter(self._postings.get(field_name, {}))

    def _check_doc(self, doc: int) -> None:
        if not 0 <= doc < len(self._ext_ids):
            raise IndexError(f"document ordinal {doc} out of range [0, {len(self._ext_ids)})")


class IndexBuilder:
    """Single-writer accumulator; :meth:`commit` freezes it.

    With ``fields`` given, only those field names are accepted and
    every one of them exists in the committed index even if no document
    populates it. Without, fields are discovered as documents arrive.
    """

    def __init__(self, fields: Sequence[str] | None = None) -> None:
        self._declared = fields is not None
        self._fields: list[str] = []
        self._lengths: dict[str, list[int]] = {}
        self._postings: dict[str, dict[str, list[Posting]]] = {}
        self._ext_ids: list[str] = []
        self._seen: set[str] = set()
        for name in fields or ():
            _check_field_name(name)
            if name in self._lengths:
                raise ValueError(f"field {name!r} declared twice")
            self._new_field(name)

    def _new_field(self, name: str) -> None:
        self._fields.append(name)
        # Documents added before this field appeared have length 0 in it.
        self._lengths[name] = [0] * len(self._ext_ids)
        self._postings[name] = {}

    def __len__(self) -> int:
        return len(self._ext_ids)

    def add_document(self, doc: Document) -> int:
        """Index ``doc`` and return its ordinal."""
        if doc.ext_id in self._seen:
            raise ValueError(f"duplicate document id {doc.ext_id!r}")
        if self._declared:
            unknown = [f for f in doc.fields if f not in self._lengths]
            if unknown:
                raise ValueError(f"document {doc.ext_id!r} has undeclared field(s) {unknown}")

        # Analyze everything first so a failure leaves the builder untouched.
        analyzed = {name: analyze(text) for name, text in doc.fields.items()}

        ordinal = len(self._ext_ids)
        for name in analyzed:
            if name not in self._lengths:
                self._new_field(name)
        self._ext_ids.append(doc.ext_id)
        self._seen.add(doc.ext_id)
        for name in self._fields:
            terms = analyzed.get(name, [])
            self._lengths[name].append(len(terms))
            table = self._postings[name]
            for term, tf in Counter(terms).items():
                table.setdefault(term, []).append(Posting(ordinal, tf))
        return ordinal

    def add_documents(self, docs: Iterable[Document]) -> None:
        for doc in docs:
            self.add_document(doc)

    def commit(self) -> InvertedIndex:
        return InvertedIndex(self._fields, self._ext_ids, self._lengths, self._postings)


def build_index(docs: Iterable[Document], fields: Sequence[str] | None = None) -> InvertedIndex:
    builder = IndexBuilder(fields)
    builder.add_documents(docs)
    return builder.commit()


# -- stats file ------------------------------------------------------------


def write_stats(stats: CollectionStats | Mapping[str, float], path: str | Path) -> None:
    """Write ``field<TAB>average`` lines sorted by field name.

    ``repr`` of a float is the shortest string that round-trips, so
    :func:`load_stats` reproduces every average bit for bit.
    """
    avgs = stats.field_avg_len if isinstance(stats, CollectionStats) else stats
    lines = []
    for name in sorted(avgs):
        _check_field_name(name)
        lines.append(f"{name}\t{float(avgs[name])!r}\n")
    Path(path).write_text("".join(lines), encoding="utf-8", newline="\n")


def load_stats(path: str | Path) -> dict[str, float]:
    averages: dict[str, float] = {}
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        name, sep, value = line.partition("\t")
        if not sep or not name or "\t" in value:
            raise IndexFormatError(f"{path}:{lineno}: expected 'field<TAB>average', got {line!r}")
        try:
            avg = float(value)
        except ValueError:
            raise IndexFormatError(f"{path}:{lineno}: bad average {value!r}") from None
        if not math.isfinite(avg) or avg < 0:
            raise IndexFormatError(f"{path}:{lineno}: average must be finite and >= 0")
        if name in averages:
            raise IndexFormatError(f"{path}:{lineno}: duplicate field {name!r}")
        averages[name] = avg
    return averages


# -- index file ------------------------------------------------------------


def save_index(index: InvertedIndex, path: str | Path) -> None:
    payload = {
        "fields": list(index.fields),
        "ext_ids": [index.ext_id(i) for i in range(index.n_docs)],
        "lengths": {f: [index.field_length(i, f) for i in range(index.n_docs)] for f in index.fields},
        "postings": {
            f: {t: [list(p) for p in index.postings(f, t)] for t in sorted(index.terms(f))}
            for f in index.fields
        },
    }
    blob = zlib.compress(json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode())
    Path(path).write_bytes(_HEADER.pack(INDEX_MAGIC, INDEX_VERSION) + blob)


def open_index(path: str | Path) -> InvertedIndex:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise IndexFormatError(f"{path}: truncated index file")
    magic, version = _HEADER.unpack_from(raw)
    if magic != INDEX_MAGIC:
        raise IndexFormatError(f"{path}: not an index file")
    if version != INDEX_VERSION:
        raise IndexFormatError(f"{path}: unsupported index version {version}")
    try:
        payload = json.loads(zlib.decompress(raw[_HEADER.size:]))
        fields = payload["fields"]
        n = len(payload["ext_ids"])
        lengths = payload["lengths"]
        postings = {
            f: {t: [Posting(d, tf) for d, tf in plist] for t, plist in payload["postings"][f].items()}
            for f in fields
        }
    except (zlib.error, ValueError, KeyError, TypeError) as exc:
        raise IndexFormatError(f"{path}: corrupt index payload ({exc})") from None
    if any(len(lengths[f]) != n for f in fields):
        raise IndexFormatError(f"{path}: length table does not match document count")
    return InvertedIndex(fields, payload["ext_ids"], lengths, postings)


# -- corpus ----------------------------------------------------------------


def read_corpus(path: str | Path) -> Iterator[Document]:
    """Yield documents from a JSONL file of ``{"id": ..., "fields": {...}}``.

    Blank lines are skipped; anything else malformed raises
    :class:`IndexFormatError` naming the line.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                doc = Document(obj["id"], dict(obj["fields"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise IndexFormatError(f"{path}:{lineno}: {exc}") from None
            yield doc
