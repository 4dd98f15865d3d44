"""Operations per trapped pixel and per pixel, every algorithm and mode, on one mixed page."""

import sys

import numpy as np

from colortrap.corpus_gen import PageRecipe, generate
from colortrap.lut_engine import build_luts
from colortrap.trapper import ALGORITHMS, MODES, run_algorithm

size = int(sys.argv[1]) if len(sys.argv) > 1 else 1024
luts = build_luts()
page, _ = generate(PageRecipe("mixed", size, size, (), 0))
_, _, ref = run_algorithm(page, "reference", "indep", luts)
n = size * size
print(f"{'algo':<10} {'mode':<6} {'ifs/trap':>9} {'adds/trap':>10} {'muls/trap':>10} "
      f"{'ifs/px':>7} {'prescreen':>10} {'disagree':>9}")
for a in ALGORITHMS:
    for m in MODES:
        _, rep, cls = run_algorithm(page, a, m, luts)
        pt = rep.per_trapped()
        c = rep.counters
        print(f"{a:<10} {m:<6} {pt['ifs']:>9.1f} {pt['adds']:>10.1f} {pt['muls']:>10.1f} "
              f"{c['ifs'] / n:>7.2f} {c['prescreen_rejections'] / n:>9.1%} {np.mean(cls != ref):>9.2%}")
