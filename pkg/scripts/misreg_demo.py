"""Gap/halo counts before and after trapping under every 1-px and 2-px plane shift.

    python scripts/misreg_demo.py [kind] [seed]
"""

import sys

from colortrap.corpus_gen import PageRecipe, generate
from colortrap.lut_engine import build_luts
from colortrap.misreg_sim import shift_sweep, shifts_1px, shifts_2px
from colortrap.trapper import run_algorithm

kind = sys.argv[1] if len(sys.argv) > 1 else "graphic"
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
luts = build_luts()
page, regions = generate(PageRecipe(kind, 256, 256, (), seed))


def totals(p, shifts):
    sweep = shift_sweep(p, regions, shifts)
    return sum(m.gap_pixels for m in sweep.values()), sum(m.halo_pixels for m in sweep.values())


print(f"{kind} page, seed {seed}: summed (gap, halo) pixels over all shifts")
for label, shifts in (("1 px", shifts_1px()), ("2 px", shifts_2px())):
    print(f"  {label} untrapped  {totals(page, shifts)}")
    for algo in ("lut3", "lut5", "hybrid", "reference"):
        out, _, _ = run_algorithm(page, algo, "dep", luts)
        print(f"  {label} {algo:<10} {totals(out, shifts)}")
