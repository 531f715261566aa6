"""Command-line interface: ``index``, ``search`` and ``run``.

Query syntax (search and run): whitespace-separated terms; ``+term``
must match, ``-term`` must not match, a bare term is optional but adds
to the score. ``field:term`` is accepted and the field part ignored.
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import nullcontext
from pathlib import Path
from typing import Iterator, Sequence

from fieldrank.index import (
    IndexBuilder,
    IndexFormatError,
    load_stats,
    open_index,
    read_corpus,
    save_index,
    write_stats,
)
from fieldrank.query import parse
from fieldrank.scoring import DEFAULT_K1, Bm25fParams, Bm25Params, Hit, RankingParams, search

log = logging.getLogger("fieldrank")

QUERY_HELP = (
    "query syntax: whitespace-separated terms; +term is required, -term is "
    "excluded, a bare term is optional and scores. 'field:term' is accepted "
    "and the field part ignored; searched fields come from --fields."
)


def stats_path(index_path: str | Path) -> Path:
    return Path(f"{index_path}.stats")


def _csv(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _floats(parser: argparse.ArgumentParser, flag: str, text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        parser.error(f"{flag} expects a comma-separated list of numbers, got {text!r}")


def cmd_index(args: argparse.Namespace) -> int:
    fields = _csv(args.fields) if args.fields else None
    builder = IndexBuilder(fields)
    for doc in read_corpus(args.corpus):
        builder.add_document(doc)
    index = builder.commit()
    save_index(index, args.out)
    write_stats(index.stats, stats_path(args.out))
    if index.n_docs == 0:
        log.warning("corpus %s contains no documents", args.corpus)
    avgs = "; ".join(f"{f} avg {index.stats.field_avg_len[f]:.4f}" for f in index.fields if index.n_docs)
    print(f"{index.n_docs} docs" + (f"; {avgs}" if avgs else ""))
    return 0


def _ranking(parser: argparse.ArgumentParser, args: argparse.Namespace) -> tuple[list[str], RankingParams]:
    fields = _csv(args.fields)
    if not fields:
        parser.error("--fields must name at least one field")
    b = _floats(parser, "--b", args.b)
    boost = _floats(parser, "--boost", args.boost)
    k1 = DEFAULT_K1 if args.k1 is None else args.k1
    try:
        if args.mode == "bm25":
            if len(fields) != 1:
                parser.error(f"bm25 searches exactly one field, got {len(fields)}")
            if boost is not None:
                parser.error("--boost only applies to bm25f")
            if args.df_field is not None:
                parser.error("--df-field only applies to bm25f")
            if b is not None and len(b) != 1:
                parser.error(f"bm25 takes a single --b value, got {len(b)}")
            kw = {} if b is None else {"b": b[0]}
            return fields, Bm25Params(k1=k1, plus_one_variant=args.plus_one, **kw)
        if args.plus_one:
            parser.error("--plus-one only applies to bm25")
        for flag, values in (("--b", b), ("--boost", boost)):
            if values is not None and len(values) != len(fields):
                parser.error(
                    f"{flag} needs one value per field in --fields order "
                    f"({len(fields)} fields, {len(values)} values)"
                )
        return fields, Bm25fParams(tuple(fields), k1=k1, b=b, boost=boost, df_field=args.df_field)
    except ValueError as exc:
        parser.error(str(exc))


def _averages(args: argparse.Namespace) -> dict[str, float] | None:
    if args.stats is not None:
        return load_stats(args.stats)
    default = stats_path(args.index)
    if default.exists():
        return load_stats(default)
    log.info("no stats file at %s; using averages stored in the index", default)
    return None


def cmd_search(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    fields, params = _ranking(parser, args)
    index = open_index(args.index)
    hits = search(index, parse(args.query, fields), params, args.top_k, _averages(args))
    for hit in hits:
        print(f"{hit.ext_id}\t{hit.score:.6f}")
    return 0


def read_queries(path: str | Path) -> Iterator[tuple[str, str]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            qid, tab, text = line.partition("\t")
            if not tab or not qid.strip() or any(c.isspace() for c in qid):
                raise IndexFormatError(f"{path}:{lineno}: expected 'query_id<TAB>query text'")
            yield qid, text


def format_run(qid: str, hits: Sequence[Hit], tag: str) -> Iterator[str]:
    for rank, hit in enumerate(hits, start=1):
        yield f"{qid} Q0 {hit.ext_id} {rank} {hit.score:.6f} {tag}\n"


def cmd_run(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    if not args.tag or any(c.isspace() for c in args.tag):
        parser.error("--tag must be non-empty and contain no whitespace")
    fields, params = _ranking(parser, args)
    index = open_index(args.index)
    averages = _averages(args)
    # Parse the whole query file before writing anything.
    queries = list(read_queries(args.queries))
    sink = open(args.out, "w", encoding="utf-8", newline="\n") if args.out else nullcontext(sys.stdout)
    with sink as out:
        for qid, text in queries:
            hits = search(index, parse(text, fields), params, args.top_k, averages)
            out.writelines(format_run(qid, hits, args.tag))
    return 0


def _add_ranking_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--index", required=True, help="index file written by 'index'")
    p.add_argument("--mode", choices=("bm25", "bm25f"), default="bm25")
    p.add_argument("--fields", required=True, help="field (bm25) or comma-separated fields (bm25f)")
    p.add_argument("--k1", type=float, default=None, help=f"saturation constant (default {DEFAULT_K1})")
    p.add_argument("--b", default=None, help="length normalization; one value, or one per field for bm25f (default 0.75)")
    p.add_argument("--boost", default=None, help="bm25f per-field boosts in --fields order (default 1 each)")
    p.add_argument("--df-field", default=None, help="bm25f field used for document frequency (default: longest average length)")
    p.add_argument("--plus-one", action="store_true", help="bm25 only: multiply term scores by k1+1")
    p.add_argument("--stats", default=None, help="load average lengths from this file instead of INDEX.stats")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fieldrank", description="BM25/BM25F search over a JSONL corpus.", epilog=QUERY_HELP)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build an index and its stats file")
    p.add_argument("--corpus", required=True, help='JSONL: {"id": ..., "fields": {name: text}} per line')
    p.add_argument("--out", required=True, help="index file; stats are written to OUT.stats")
    p.add_argument("--fields", default=None, help="comma-separated field names to accept")

    p = sub.add_parser("search", help="run one query", epilog=QUERY_HELP)
    _add_ranking_args(p)
    p.add_argument("--query", required=True)
    p.add_argument("--top-k", type=int, default=10)

    p = sub.add_parser("run", help="batch queries into a TREC run file", epilog=QUERY_HELP)
    _add_ranking_args(p)
    p.add_argument("--queries", required=True, help="query_id<TAB>query text per line")
    p.add_argument("--tag", required=True, help="run tag, the sixth column")
    p.add_argument("--top-k", type=int, default=1000)
    p.add_argument("--out", default=None, help="run file (default stdout)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "top_k", 0) < 0:
        parser.error("--top-k must be >= 0")
    try:
        if args.command == "index":
            return cmd_index(args)
        if args.command == "search":
            return cmd_search(parser, args)
        return cmd_run(parser, args)
    except (IndexFormatError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"fieldrank: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
