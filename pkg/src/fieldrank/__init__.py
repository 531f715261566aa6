"""BM25 / BM25F ranking over a small self-contained inverted index."""

from fieldrank.analysis import Token, analyze, tokenize
from fieldrank.index import (
    CollectionStats,
    Document,
    IndexBuilder,
    InvertedIndex,
    Posting,
    load_stats,
    open_index,
    read_corpus,
    save_index,
    write_stats,
)
from fieldrank.query import BooleanQuery, Clause, Occur, parse
from fieldrank.scoring import (
    Bm25fParams,
    Bm25Params,
    Hit,
    bm25_term_score,
    bm25f_field_weight,
    bm25f_term_score,
    idf,
    search,
)

__all__ = [
    "BooleanQuery",
    "Bm25Params",
    "Bm25fParams",
    "Clause",
    "CollectionStats",
    "Document",
    "Hit",
    "IndexBuilder",
    "InvertedIndex",
    "Occur",
    "Posting",
    "Token",
    "analyze",
    "bm25_term_score",
    "bm25f_field_weight",
    "bm25f_term_score",
    "idf",
    "load_stats",
    "open_index",
    "parse",
    "read_corpus",
    "save_index",
    "search",
    "tokenize",
    "write_stats",
]
