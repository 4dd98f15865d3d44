"""Print the table-memory breakdown for the default configuration."""

from colortrap.lut_engine import build_luts, save_luts
from colortrap.trapper import ALGORITHMS, lut_bytes

luts = build_luts()
mem = luts.memory()
for k, v in mem.items():
    print(f"{k:<16} {v:>10,d} B")
print()
for a in ALGORITHMS:
    print(f"{a:<16} {lut_bytes(luts, a):>10,d} B touched")
print(f"{'TRAPLUT1 file':<16} {len(save_luts(luts)):>10,d} B")
