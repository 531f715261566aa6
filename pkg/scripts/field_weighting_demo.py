"""Show how BM25F boosts, per-field b, and the df field change a ranking.

    python scripts/field_weighting_demo.py
"""

from fieldrank import Bm25fParams, Bm25Params, Document, parse, search
from fieldrank.index import build_index

DOCS = [
    Document("intro", {"title": "search engines", "body": "an overview of how engines rank pages for a query"}),
    Document("bm25", {"title": "okapi ranking", "body": "bm25 ranks documents by saturated term frequency and idf"}),
    Document("fields", {"title": "ranking structured documents", "body": "fields such as title and body carry different weight"}),
    Document("lucene", {"title": "lucene", "body": "a java library; its default ranking mixes vector space and boolean models"}),
    Document("misc", {"title": "notes", "body": "assorted notes about ranking, indexing, and query parsing in search engines"}),
]
QUERY = "ranking documents engines"


def show(label, hits):
    print(f"\n{label}")
    for rank, hit in enumerate(hits, 1):
        print(f"  {rank}. {hit.ext_id:<8} {hit.score: .4f}")


def main():
    index = build_index(DOCS)
    print("average lengths:", {f: round(a, 3) for f, a in index.stats.field_avg_len.items()})
    fields = ("title", "body")
    q = parse(QUERY, fields)

    show("BM25 on body", search(index, parse(QUERY, "body"), Bm25Params()))
    show("BM25F defaults (boost 1, b 0.75, df from body)", search(index, q, Bm25fParams(fields)))
    show("BM25F title boost 3", search(index, q, Bm25fParams(fields, boost=(3.0, 1.0))))
    show("BM25F title boost 3, no title length norm", search(index, q, Bm25fParams(fields, b=(0.0, 0.75), boost=(3.0, 1.0))))
    show("BM25F df taken from title", search(index, q, Bm25fParams(fields, df_field="title")))


if __name__ == "__main__":
    main()
