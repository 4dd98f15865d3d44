"""Density, trapping parameters, final trapped values and the page scan."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .edge_oracle import EdgeType
from .raster_io import CmykPixel, MIN_TRAP_SIZE, DimensionTooSmall, RasterPage

DENSITY_LEVELS = 32
WEIGHT_TOTAL = 16
TRAP2_MIN_DQ = 8  # |delta density| >= 0.25 in 1/32 steps


class InvalidEdgeType(ValueError):
    pass


class LutMismatch(ValueError):
    pass


PageTooSmall = DimensionTooSmall


@dataclass(frozen=True)
class DensityWeights:
    """Integer plane weights summing to 16 (density = sum(w*v) / (255*16))."""

    w_c: int = 3
    w_m: int = 4
    w_y: int = 1
    w_k: int = 8

    def __post_init__(self):
        if not self.w_k >= self.w_m >= self.w_c >= self.w_y > 0:
            raise ValueError("weights must satisfy w_k >= w_m >= w_c >= w_y > 0")
        if self.w_c + self.w_m + self.w_y + self.w_k != WEIGHT_TOTAL:
            raise ValueError("weights must sum to 16")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.w_c, self.w_m, self.w_y, self.w_k)

    def to_dict(self):
        return asdict(self)

    def shift_table(self) -> np.ndarray:
        """Per-plane bit positions of each weight, -1 padded, for shift-add products."""
        tab = np.full((4, 5), -1, dtype=np.int64)
        for p, w in enumerate(self.as_tuple()):
            bits = [b for b in range(5) if (w >> b) & 1]
            tab[p, : len(bits)] = bits
        return tab

    def plane_priority(self) -> np.ndarray:
        """Planes ordered by descending weight (ties keep K, M, C, Y order)."""
        order = sorted(range(4), key=lambda p: (-self.as_tuple()[p], (3, 1, 0, 2).index(p)))
        return np.array(order, dtype=np.int64)


class TrapParams(NamedTuple):
    kdif: int
    ovrd: int  # interpolation weight in eighths, 4..8
    trap: int
    edge: int

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.ovrd, 8)


def weighted_sum(p, w: DensityWeights) -> int:
    return sum(wi * int(v) for wi, v in zip(w.as_tuple(), p))


def density(p, w: DensityWeights = DensityWeights()) -> Fraction:
    return Fraction(weighted_sum(p, w), 255 * WEIGHT_TOTAL)


def quantize_density(d) -> int:
    return min(DENSITY_LEVELS - 1, int(Fraction(d) * DENSITY_LEVELS))


def quantize_sum(s: int) -> int:
    return min(DENSITY_LEVELS - 1, (2 * s) // 255)


def div255(x: int) -> int:
    """x // 255 for 0 <= x < 65535 using only shifts and adds."""
    return (x + 1 + (x >> 8)) >> 8


def trap_amount(dq: int) -> int:
    return 2 if dq >= TRAP2_MIN_DQ else 1


def ovrd_eighths(dq: int) -> int:
    # alpha = clamp(0.5 + dq/32, 0.5, 1.0), floored to eighths
    return min(8, 4 + dq // 4)


def edge_code(edge_type) -> int:
    if edge_type == EdgeType.EDGE1:
        return 1
    if edge_type == EdgeType.EDGE2:
        return 2
    raise InvalidEdgeType(f"{edge_type!r} is not trappable")


def trap_params_q(qc: int, qo: int, edge_type, k5c: int = 0, k5o: int = 0) -> TrapParams:
    dq = abs(qc - qo)
    return TrapParams(abs(k5c - k5o), ovrd_eighths(dq), trap_amount(dq), edge_code(edge_type))


def trap_params(center_density, other_density, edge_type, k_center: int = 0, k_other: int = 0) -> TrapParams:
    """Reference trap-parameter functions on 5-bit quantized densities.

    ``k_center``/``k_other`` are 8-bit K values; KDIF is their 5-bit difference.
    """
    return trap_params_q(
        quantize_density(center_density),
        quantize_density(other_density),
        edge_type,
        k_center >> 3,
        k_other >> 3,
    )


def blend(ovrd: int, d: int) -> int:
    """round(alpha * d) for alpha = ovrd/8, halves rounded up."""
    return (ovrd * d + 4) >> 3


def dominant_plane(p, w: DensityWeights) -> int:
    best, best_v = -1, -1
    for q in w.plane_priority():
        v = w.as_tuple()[q] * int(p[q])
        if v > best_v:
            best, best_v = int(q), v
    return best


def trapped_value(center, neighbor, params: TrapParams, w: DensityWeights = DensityWeights()) -> CmykPixel:
    """Final value of a center pixel on an edge against ``neighbor``.

    Only the darker side changes.  Against a colored neighbor, every plane
    where the neighbor carries more colorant is pulled toward it.  Against
    white, every plane except the dominant one is pulled back toward zero.
    """
    center = CmykPixel(*(int(v) for v in center))
    neighbor = CmykPixel(*(int(v) for v in neighbor))
    if params.trap < params.edge:
        return center
    if weighted_sum(center, w) <= weighted_sum(neighbor, w):
        return center
    out = list(center)
    if neighbor.is_white:
        dom = dominant_plane(center, w)
        for p in range(4):
            if p != dom and center[p] > 0:
                out[p] = center[p] - blend(params.ovrd, center[p])
    else:
        for p in range(4):
            if neighbor[p] > center[p]:
                out[p] = center[p] + blend(params.ovrd, neighbor[p] - center[p])
    return CmykPixel(*out)


# --- page scan ---------------------------------------------------------------

ALGORITHMS = ("reference", "lut3", "lut5", "hybrid")
MODES = ("indep", "dep")


@dataclass
class TrapReport:
    algorithm: str
    mode: str
    width: int
    height: int
    bands: int
    counters: dict
    trapped_counters: dict
    lut_bytes: int
    peak_buffer_bytes: int
    wall_time_ms: float
    config_hash: str = ""

    @property
    def trapped_pixels(self) -> int:
        return self.counters["trapped_pixels"]

    def per_trapped(self) -> dict:
        n = max(1, self.trapped_pixels)
        return {k: self.trapped_counters[k] / n for k in ("ifs", "adds", "muls")}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_trapped_pixel"] = self.per_trapped()
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "TrapReport":
        d = json.loads(text)
        d.pop("per_trapped_pixel", None)
        return cls(**d)


def _counters(ctr) -> tuple[dict, dict]:
    c = [int(v) for v in ctr]
    return (
        {"ifs": c[0], "adds": c[1], "muls": c[2], "trapped_pixels": c[3], "prescreen_rejections": c[4]},
        {"ifs": c[5], "adds": c[6], "muls": c[7]},
    )


def lut_bytes(luts, algorithm: str) -> int:
    """Bytes of precomputed tables an algorithm touches."""
    if luts is None or algorithm == "reference":
        return 0
    mem = luts.memory()
    if algorithm == "lut3":
        return mem["algorithm1"]
    if algorithm == "lut5":
        return mem["tolerance"] + mem["trap_params"] + mem["lut5_family"]
    return mem["tolerance"] + mem["trap_params"] + mem["lut3d"]


def _kernel_args(luts, algorithm):
    """Cached numba argument tuple for one algorithm."""
    cache = luts.__dict__.setdefault("_kernel_args", {})
    if algorithm in cache:
        return cache[algorithm]
    tt = luts.tol_tables
    tr = luts.trap_tables
    shift = luts.weights.shift_table()
    prio = luts.weights.plane_priority()
    tol = (tt.x_lo, tt.x_hi, tt.ak_lo, tt.ak_hi)
    trap = (shift, prio, tr["trap"], tr["ovrd"], tr["edge"], tr["blend"])
    if algorithm == "lut3":
        args = tol + (luts.lut3,) + trap
    elif algorithm == "lut5":
        rank = luts.cmap.rank.astype(np.int64)
        rank[rank == 255] = 0  # only B positions are ever gathered
        args = tol + (luts.cmap.transform, luts.cmap.o_class, luts.cmap.position_maps.astype(np.int64),
                      rank, luts.lut5_flat, luts.lut5_offsets) + trap
    elif algorithm == "hybrid":
        args = tol + (luts.lut3d, np.int64(luts.oracle.max_outer_o)) + trap
    else:
        raise ValueError(algorithm)
    cache[algorithm] = args
    return args


def _reference_args(tolerance, oracle, weights):
    from .edge_oracle import NBR_MASK

    return (
        np.int64(tolerance.a_tol),
        np.array(tolerance.k_tol_curve, dtype=np.int64),
        np.array(weights.as_tuple(), dtype=np.int64),
        weights.plane_priority(),
        NBR_MASK,
        np.int64(oracle.edge2_min_span),
        np.int64(oracle.max_outer_o),
    )


def _scan_band(page, r0, r1, kernel, args, dep, out, cls):
    from . import _kernels as K
    from .raster_io import SWATH_ROWS, PAD

    ctr = np.zeros(K.NCTR, dtype=np.int64)
    sw = np.empty((SWATH_ROWS, page.width + 2 * PAD, 4), dtype=np.uint8)
    kb = np.empty((SWATH_ROWS, page.width + 2 * PAD), dtype=np.int32)
    runs = np.zeros(page.width + 2 * PAD, dtype=np.int32)
    kernel(page.data, r0, r1, out, cls, ctr, dep, sw, kb, runs, *args)
    return ctr, sw.nbytes + kb.nbytes + runs.nbytes


def run_algorithm(page: RasterPage, algorithm: str, mode: str = "indep", luts=None, *,
                  bands: int = 1, tolerance=None, oracle=None, weights=None):
    """Trap a page.  Returns (trapped page, TrapReport, per-pixel edge classes).

    The LUT algorithms need ``luts``; the reference uses the configuration
    of ``luts`` when given, otherwise the explicit config arguments (or
    their defaults).  A config passed together with ``luts`` must match it.
    """
    from . import _kernels as K
    from .categorize import ToleranceParams
    from .edge_oracle import OracleConfig

    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if bands < 1:
        raise ValueError("bands must be >= 1")
    page.check_trappable()
    if luts is not None:
        for given, have in ((tolerance, luts.tolerance), (oracle, luts.oracle), (weights, luts.weights)):
            if given is not None and given != have:
                raise LutMismatch("configuration differs from the one the LUTs were built with")
        tolerance, oracle, weights = luts.tolerance, luts.oracle, luts.weights
    elif algorithm != "reference":
        raise LutMismatch(f"{algorithm} needs a LUT set")
    tolerance = tolerance or ToleranceParams()
    oracle = oracle or OracleConfig()
    weights = weights or DensityWeights()

    if algorithm == "reference":
        kernel, args = K.scan_reference, _reference_args(tolerance, oracle, weights)
    else:
        kernel = {"lut3": K.scan_lut3, "lut5": K.scan_lut5, "hybrid": K.scan_hybrid}[algorithm]
        args = _kernel_args(luts, algorithm)
    dep = mode == "dep"
    h, w = page.height, page.width
    out = np.empty((h, w, 4), dtype=np.uint8)
    cls = np.empty((h, w), dtype=np.int8)

    t0 = time.perf_counter()
    bands = min(bands, h)
    if bands == 1:
        ctr, peak = _scan_band(page, 0, h, kernel, args, dep, out, cls)
    else:
        edges = np.linspace(0, h, bands + 1).astype(int)
        with ThreadPoolExecutor(max_workers=bands) as pool:
            futs = [pool.submit(_scan_band, page, int(a), int(b), kernel, args, dep, out, cls)
                    for a, b in zip(edges[:-1], edges[1:]) if b > a]
            results = [f.result() for f in futs]
        ctr = sum(r[0] for r in results)
        peak = sum(r[1] for r in results)
    wall = (time.perf_counter() - t0) * 1000.0

    totals, trapped = _counters(ctr)
    report = TrapReport(
        algorithm=algorithm, mode=mode, width=w, height=h, bands=bands,
        counters=totals, trapped_counters=trapped,
        lut_bytes=lut_bytes(luts, algorithm), peak_buffer_bytes=int(peak),
        wall_time_ms=wall,
        config_hash=(luts.hash.hex() if luts is not None else ""),
    )
    return RasterPage(out), report, cls


def trap_page_python(page: RasterPage, tolerance=None, oracle=None, weights=None):
    """Slow per-pixel pipeline straight from the categorize/oracle/trapper functions.

    Same output as ``run_algorithm(page, "reference")``; meant for cross-checks
    on small pages.
    """
    from .categorize import ToleranceParams, label_window, truncate
    from .edge_oracle import OracleConfig, classify
    from .window import DX, DY, N_POS

    tolerance = tolerance or ToleranceParams()
    oracle = oracle or OracleConfig()
    weights = weights or DensityWeights()
    page.check_trappable()
    h, w = page.height, page.width
    data = page.data
    out = data.copy()
    cls = np.zeros((h, w), dtype=np.int8)
    for yy in range(h):
        for xx in range(w):
            center = CmykPixel(*(int(v) for v in data[yy, xx]))
            if center.is_white:
                continue
            pix = []
            for i in range(N_POS):
                ry = min(max(yy + int(DY[i]), 0), h - 1)
                rx = min(max(xx + int(DX[i]), 0), w - 1)
                pix.append(CmykPixel(*(int(v) for v in data[ry, rx])))
            lw = label_window([truncate(p) for p in pix], tolerance)
            e = classify(lw, oracle)
            cls[yy, xx] = int(e)
            if e == EdgeType.NON_TRAPPABLE:
                continue
            nb = pix[lw.b_position]
            qc = quantize_sum(weighted_sum(center, weights))
            qo = quantize_sum(weighted_sum(nb, weights))
            params = trap_params_q(qc, qo, e, center[3] >> 3, nb[3] >> 3)
            out[yy, xx] = trapped_value(center, nb, params, weights)
    return RasterPage(out), cls
