"""Benchmark harness: every algorithm and mode over a corpus directory."""

from __future__ import annotations

import json
import statistics
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .raster_io import RasterPage, load_page
from .trapper import ALGORITHMS, MODES, run_algorithm

CELLS = tuple((a, m) for a in ALGORITHMS for m in MODES)


@dataclass
class BenchResult:
    algo: str
    mode: str
    page: str
    wall_time_ms: float  # mean over repeats
    wall_time_std_ms: float
    wall_time_median_ms: float
    ifs: int
    adds: int
    muls: int
    trapped_pixels: int
    prescreen_rejections: int
    disagreement_rate: float
    lut_bytes: int
    peak_buffer_bytes: int
    repeats: int

    def to_dict(self):
        return asdict(self)


def load_corpus(corpus) -> list[tuple[str, RasterPage]]:
    """(name, page) pairs from a directory of .cmyk files, or pass-through for a list."""
    if isinstance(corpus, (str, Path)):
        paths = sorted(Path(corpus).glob("*.cmyk"))
        return [(p.stem, load_page(p)) for p in paths]
    return [(n, p) for n, p in corpus]


def run_bench(corpus, luts, repeat: int = 10, cells=CELLS, bands: int = 1) -> list[BenchResult]:
    """Time each (algo, mode) on each page ``repeat`` times.

    Cells are interleaved within each repeat so slow drift in machine load
    hits all of them alike.  Counters must not change between repeats.
    """
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    pages = load_corpus(corpus)
    results = []
    for name, page in pages:
        _, _, ref_cls = run_algorithm(page, "reference", "indep", luts)
        times = {c: [] for c in cells}
        first = {}
        for c in cells:  # warm-up, also fixes the counter block
            _, rep, cls = run_algorithm(page, c[0], c[1], luts, bands=bands)
            first[c] = (rep, float(np.mean(cls != ref_cls)))
        for _ in range(repeat):
            for c in cells:
                _, rep, _ = run_algorithm(page, c[0], c[1], luts, bands=bands)
                if rep.counters != first[c][0].counters:
                    raise RuntimeError(f"non-deterministic counters for {c} on {name}")
                times[c].append(rep.wall_time_ms)
        for c in cells:
            rep, dis = first[c]
            ts = times[c]
            results.append(BenchResult(
                algo=c[0], mode=c[1], page=name,
                wall_time_ms=statistics.fmean(ts),
                wall_time_std_ms=statistics.stdev(ts) if len(ts) > 1 else 0.0,
                wall_time_median_ms=statistics.median(ts),
                ifs=rep.counters["ifs"], adds=rep.counters["adds"], muls=rep.counters["muls"],
                trapped_pixels=rep.counters["trapped_pixels"],
                prescreen_rejections=rep.counters["prescreen_rejections"],
                disagreement_rate=dis, lut_bytes=rep.lut_bytes,
                peak_buffer_bytes=rep.peak_buffer_bytes, repeats=repeat,
            ))
    return results


def cell_medians(results) -> dict:
    """Median over pages of each cell's per-page median time."""
    by = {}
    for r in results:
        by.setdefault((r.algo, r.mode), []).append(r.wall_time_median_ms)
    return {c: statistics.median(v) for c, v in by.items()}


def ratios(results) -> dict:
    t = cell_medians(results)

    def rt(a, b):
        return t[a] / t[b] if a in t and b in t and t[b] > 0 else float("nan")

    ref = ("reference", "indep")
    return {
        "reference/lut3": rt(ref, ("lut3", "dep")),
        "reference/lut5_dep": rt(ref, ("lut5", "dep")),
        "reference/hybrid": rt(ref, ("hybrid", "dep")),
        "lut3 indep/dep": rt(("lut3", "indep"), ("lut3", "dep")),
        "lut5 indep/dep": rt(("lut5", "indep"), ("lut5", "dep")),
        "hybrid indep/dep": rt(("hybrid", "indep"), ("hybrid", "dep")),
    }


def report_json(results) -> str:
    return json.dumps({
        "results": [r.to_dict() for r in results],
        "cell_median_ms": {f"{a}/{m}": v for (a, m), v in cell_medians(results).items()},
        "ratios": ratios(results),
    }, indent=1)


def format_table(results) -> str:
    t = cell_medians(results)
    lines = [f"{'algo':<10} {'mode':<6} {'median ms':>10}"]
    for (a, m), v in sorted(t.items(), key=lambda kv: kv[1]):
        lines.append(f"{a:<10} {m:<6} {v:>10.2f}")
    for k, v in ratios(results).items():
        lines.append(f"{k:<22} {v:6.2f}x")
    return "\n".join(lines)
