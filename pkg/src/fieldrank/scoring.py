"""BM25 and BM25F ranking with boolean candidate filtering.

BM25 term score::

    idf(t) * tf / (k1 * ((1 - b) + b * dl / avgdl) + tf)

optionally multiplied by ``k1 + 1`` so that tf=1 at average length
scores exactly ``idf(t)``.

BM25F first folds a term's per-field frequencies into one weight::

    weight = sum_c tf_c * boost_c / ((1 - b_c) + b_c * len_c / avglen_c)

and saturates once: ``idf(t) * weight / (k1 + weight)``.

``idf(t) = ln((N - df + 0.5) / (df + 0.5))`` and is not clamped, so
terms present in more than half the collection score negatively.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence, Union

from fieldrank.index import InvertedIndex
from fieldrank.query import BooleanQuery, Occur

DEFAULT_K1 = 2.0
DEFAULT_B = 0.75
DEFAULT_BOOST = 1.0


def _check_k1(k1: float) -> None:
    if not (k1 > 0 and math.isfinite(k1)):
        raise ValueError(f"k1 must be positive and finite, got {k1}")


def _check_b(b: float) -> None:
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"b must lie in [0, 1], got {b}")


@dataclass(frozen=True)
class Bm25Params:
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    plus_one_variant: bool = False

    def __post_init__(self) -> None:
        _check_k1(self.k1)
        _check_b(self.b)


@dataclass(frozen=True)
class Bm25fParams:
    """BM25F settings. ``b`` and ``boost`` are aligned with ``fields``.

    ``df_field=None`` defers to the field with the longest average
    length at search time (first such field on ties).
    """

    fields: tuple[str, ...]
    k1: float = DEFAULT_K1
    b: tuple[float, ...] | None = None
    boost: tuple[float, ...] | None = None
    df_field: str | None = None

    def __post_init__(self) -> None:
        fields = tuple(self.fields)
        if not fields:
            raise ValueError("BM25F needs at least one field")
        if len(set(fields)) != len(fields):
            raise ValueError(f"duplicate fields in {list(fields)}")
        b = (DEFAULT_B,) * len(fields) if self.b is None else tuple(map(float, self.b))
        boost = (DEFAULT_BOOST,) * len(fields) if self.boost is None else tuple(map(float, self.boost))
        if len(b) != len(fields):
            raise ValueError(f"{len(b)} b values for {len(fields)} fields")
        if len(boost) != len(fields):
            raise ValueError(f"{len(boost)} boost values for {len(fields)} fields")
        _check_k1(self.k1)
        for value in b:
            _check_b(value)
        for value in boost:
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(f"boost must be finite and >= 0, got {value}")
        if self.df_field is not None and self.df_field not in fields:
            raise ValueError(f"df field {self.df_field!r} is not one of {list(fields)}")
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "boost", boost)

    def resolve_df_field(self, avg_len: Mapping[str, float]) -> str:
        if self.df_field is not None:
            return self.df_field
        return max(self.fields, key=lambda f: (avg_len.get(f, 0.0), -self.fields.index(f)))


RankingParams = Union[Bm25Params, Bm25fParams]


class Hit(NamedTuple):
    ext_id: str
    score: float


def idf(n_docs: int, df: int) -> float:
    if n_docs < 1:
        raise ValueError("idf is undefined on an empty collection")
    if not 0 <= df <= n_docs:
        raise ValueError(f"document frequency {df} outside [0, {n_docs}]")
    return math.log((n_docs - df + 0.5) / (df + 0.5))


def bm25_term_score(
    tf: int,
    doc_len: int,
    avg_len: float,
    df: int,
    n_docs: int,
    params: Bm25Params = Bm25Params(),
) -> float:
    if not avg_len > 0:
        raise ValueError(f"average length must be positive, got {avg_len} (stats not loaded?)")
    if tf == 0:
        return 0.0
    k1, b = params.k1, params.b
    score = idf(n_docs, df) * tf / (k1 * ((1 - b) + b * doc_len / avg_len) + tf)
    if params.plus_one_variant:
        score *= k1 + 1
    return score


def bm25f_field_weight(
    tf: Mapping[str, int],
    field_len: Mapping[str, int],
    avg_len: Mapping[str, float],
    params: Bm25fParams,
) -> float:
    weight = 0.0
    for name, b, boost in zip(params.fields, params.b, params.boost):
        occurs = tf.get(name, 0)
        if occurs == 0:
            continue
        avg = avg_len.get(name, 0.0)
        if not avg > 0:
            raise ValueError(f"field {name!r} has matches but no positive average length")
        weight += occurs * boost / ((1 - b) + b * field_len.get(name, 0) / avg)
    return weight


def bm25f_term_score(weight: float, df: int, n_docs: int, k1: float = DEFAULT_K1) -> float:
    if weight < 0:
        raise ValueError(f"weight must be >= 0, got {weight}")
    return idf(n_docs, df) * weight / (k1 + weight)


def search(
    index: InvertedIndex,
    query: BooleanQuery,
    params: RankingParams,
    top_k: int | None = 10,
    avg_len: Mapping[str, float] | None = None,
) -> list[Hit]:
    """Rank the documents of ``index`` that pass the boolean filter.

    Candidates are the documents containing every MUST term, or, with
    no MUST clause, at least one SHOULD term; documents containing any
    NOT term are then removed. A query with no MUST or SHOULD clause
    matches nothing. Each MUST and SHOULD clause adds its term score.

    ``avg_len`` overrides the index's own average field lengths, e.g.
    with values read by :func:`fieldrank.index.load_stats`.

    Hits are ordered by score descending, then ingestion order.
    """
    for name in query.target_fields:
        if name not in index.fields:
            raise KeyError(f"field {name!r} is not in the index (has {list(index.fields)})")
    if isinstance(params, Bm25Params):
        if len(query.target_fields) != 1:
            raise ValueError(f"BM25 searches exactly one field, got {list(query.target_fields)}")
        fields = query.target_fields
    else:
        if params.fields != query.target_fields:
            raise ValueError(
                f"BM25F fields {list(params.fields)} differ from query fields {list(query.target_fields)}"
            )
        fields = params.fields
    if avg_len is None:
        avg_len = index.stats.field_avg_len
    if top_k is not None and top_k < 0:
        raise ValueError("top_k must be >= 0")

    must = query.terms(Occur.MUST)
    should = query.terms(Occur.SHOULD)
    if not must and not should:
        return []

    # term -> {doc: {field: tf}}
    matches: dict[str, dict[int, dict[str, int]]] = {}
    for term in dict.fromkeys(must + should + query.terms(Occur.NOT)):
        by_doc: dict[int, dict[str, int]] = {}
        for name in fields:
            for doc, tf in index.postings(name, term):
                by_doc.setdefault(doc, {})[name] = tf
        matches[term] = by_doc

    if must:
        candidates = set(matches[must[0]])
        for term in must[1:]:
            candidates.intersection_update(matches[term])
    else:
        candidates = set()
        for term in should:
            candidates.update(matches[term])
    for term in query.terms(Occur.NOT):
        candidates.difference_update(matches[term])
    if not candidates:
        return []

    n_docs = index.n_docs
    contributions: dict[str, dict[int, float]] = {}
    if isinstance(params, Bm25Params):
        name = fields[0]
        avg = avg_len.get(name, 0.0)
        for term in dict.fromkeys(must + should):
            df = index.doc_freq(name, term)
            contributions[term] = {
                doc: bm25_term_score(tfs[name], index.field_length(doc, name), avg, df, n_docs, params)
                for doc, tfs in matches[term].items()
                if doc in candidates
            }
    else:
        df_field = params.resolve_df_field(avg_len)
        for term in dict.fromkeys(must + should):
            df = index.doc_freq(df_field, term)
            scores = {}
            for doc, tfs in matches[term].items():
                if doc not in candidates:
                    continue
                lengths = {name: index.field_length(doc, name) for name in tfs}
                weight = bm25f_field_weight(tfs, lengths, avg_len, params)
                scores[doc] = bm25f_term_score(weight, df, n_docs, params.k1)
            contributions[term] = scores

    scoring_terms = [c.term for c in query.clauses if c.occur is not Occur.NOT]
    ranked = []
    for doc in candidates:
        total = 0.0
        for term in scoring_terms:
            total += contributions[term].get(doc, 0.0)
        ranked.append((-total, doc))
    if top_k is None or top_k >= len(ranked):
        ranked.sort()
    else:
        ranked = heapq.nsmallest(top_k, ranked)
    return [Hit(index.ext_id(doc), -neg) for neg, doc in ranked]
