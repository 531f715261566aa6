"""Compare fieldrank.search against the brute-force scorer on random corpora.

    python scripts/oracle_sweep.py --corpora 1000 --queries 20 --seed 7
"""

import argparse
import math
import pathlib
import random
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1]))

from fieldrank import Bm25fParams, Bm25Params, parse, search  # noqa: E402
from fieldrank.index import build_index  # noqa: E402
from tests.corpora import documents, random_bm25, random_bm25f, random_corpus, random_query  # noqa: E402
from tests.oracle import oracle_search  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--corpora", type=int, default=200)
    ap.add_argument("--queries", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rel-tol", type=float, default=1e-9)
    args = ap.parse_args()

    worst, mismatches, compared = 0.0, 0, 0
    t_engine = t_oracle = 0.0
    for c in range(args.corpora):
        rng = random.Random(args.seed * 1_000_003 + c)
        fields, vocab, pairs = random_corpus(rng)
        index = build_index(documents(pairs), fields)
        for _ in range(args.queries):
            raw = random_query(rng, vocab)
            if rng.random() < 0.5:
                target, kw = [rng.choice(fields)], random_bm25(rng)
                params, mode = Bm25Params(kw["k1"], kw["b"], kw["plus_one"]), "bm25"
            else:
                target, kw = random_bm25f(rng, fields)
                params, mode = Bm25fParams(tuple(target), kw["k1"], kw["b"], kw["boosts"], kw["df_field"]), "bm25f"
            t0 = time.perf_counter()
            got = search(index, parse(raw, target), params, None)
            t1 = time.perf_counter()
            want = oracle_search(pairs, target, raw, mode=mode, **kw)
            t_oracle += time.perf_counter() - t1
            t_engine += t1 - t0
            compared += 1
            if [h.ext_id for h in got] != [e for e, _ in want]:
                mismatches += 1
                print(f"order mismatch: corpus={c} query={raw!r} {params}")
                continue
            for hit, (_, score) in zip(got, want):
                err = abs(hit.score - score) / max(abs(score), 1e-300) if hit.score != score else 0.0
                worst = max(worst, err)
                if not math.isclose(hit.score, score, rel_tol=args.rel_tol):
                    mismatches += 1
                    print(f"score mismatch: corpus={c} query={raw!r} {hit} vs {score}")
    print(f"queries compared   {compared}")
    print(f"mismatches         {mismatches}")
    print(f"worst rel error    {worst:.3e}")
    print(f"engine time        {t_engine:.2f}s")
    print(f"oracle time        {t_oracle:.2f}s")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
