"""Generate the mixed corpus (if missing), build LUTs and run the full benchmark grid.

    python scripts/benchmark.py [--pages 4] [--size 1024] [--repeat 10] [--out bench.json]
"""

import argparse
import sys
import tempfile
from pathlib import Path

from colortrap.bench import format_table, load_corpus, report_json, run_bench
from colortrap.corpus_gen import default_recipes, write_corpus
from colortrap.lut_engine import build_luts


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--corpus", help="directory of .cmyk pages (default: generate the mixed corpus)")
    ap.add_argument("--pages", type=int, default=4)
    ap.add_argument("--size", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=10)
    ap.add_argument("--out", default="-")
    a = ap.parse_args()

    corpus = a.corpus
    if corpus is None:
        corpus = tempfile.mkdtemp(prefix="mixed-")
        write_corpus(default_recipes(a.size, a.pages), corpus)
    results = run_bench(load_corpus(corpus), build_luts(), a.repeat)
    text = report_json(results)
    if a.out == "-":
        print(text)
    else:
        Path(a.out).write_text(text + "\n")
    print(format_table(results), file=sys.stderr)


if __name__ == "__main__":
    main()
