"""Lookup-table construction, window lookups and the TRAPLUT1 container.

Every edge table is filled by running the reference classifier over an
exhaustive enumeration of label windows, so lookups agree with it exactly
wherever the table applies.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import struct
import zlib
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numba
import numpy as np

from . import window as W
from .categorize import ToleranceParams, ToleranceTables
from .edge_oracle import (
    NBR_MASK,
    EdgeType,
    OracleConfig,
    classify,
    classify_masks,
    label_masks,
    masks_of,
    o_run_ok,
    popcount,
)
from .trapper import DensityWeights, ovrd_eighths, trap_amount

FORMAT_VERSION = 1
LUT_MAGIC = b"TRAPLUT1"
NO_CLASS = 255


class LutError(ValueError):
    pass


class BadMagic(LutError):
    pass


class VersionMismatch(LutError):
    pass


class ChecksumMismatch(LutError):
    pass


class TooManyOPixels(LutError):
    pass


def config_hash(tol: ToleranceParams, oracle: OracleConfig, weights: DensityWeights) -> bytes:
    doc = {
        "format": FORMAT_VERSION,
        "tolerance": tol.to_dict(),
        "oracle": oracle.to_dict(),
        "density": weights.to_dict(),
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).digest()


# --- Algorithm 1: 3x3 edge table -------------------------------------------

def embed_3x3(pattern: int) -> tuple[int, ...]:
    """Labels of a 5x5 window grown from an 8-bit 3x3 A/B pattern by edge replication."""
    labels = [W.A] * W.N_POS
    for i in W.INNER:
        if (pattern >> (i - 1)) & 1:
            labels[i] = W.B
    index = {p: i for i, p in enumerate(W.POSITIONS)}
    for i in W.OUTER:
        x, y = W.POSITIONS[i]
        src = index[(max(-1, min(1, x)), max(-1, min(1, y)))]
        labels[i] = labels[src]
    return tuple(labels)


def build_lut3x3(oracle: OracleConfig = OracleConfig()) -> np.ndarray:
    lut = np.zeros(256, dtype=np.uint8)
    for pattern in range(256):
        lut[pattern] = classify(embed_3x3(pattern), oracle) == EdgeType.EDGE1
    return lut


def pattern_3x3(labels) -> Optional[int]:
    """8-bit index of the inner ring, or None if it holds an O."""
    idx = 0
    for i in W.INNER:
        if labels[i] == W.O:
            return None
        if labels[i] == W.B:
            idx |= 1 << (i - 1)
    return idx


# --- Algorithm 2: canonical O arrangements and the 5x5 family --------------

def _mask_positions(mask12: int) -> tuple[int, ...]:
    return tuple(W.OUTER[j] for j in range(12) if (mask12 >> j) & 1)


def _positions_mask(positions) -> int:
    return sum(1 << (p - 9) for p in positions)


def canonical_image(mask12: int) -> tuple[int, int]:
    """(transform, canonical mask): the lexicographically least image, least transform on ties."""
    pos = _mask_positions(mask12)
    best = None
    for t in range(W.N_TRANSFORMS):
        img = tuple(sorted(int(W.PERMS[t, p]) for p in pos))
        if best is None or img < best[1]:
            best = (t, img)
    return best[0], _positions_mask(best[1])


def brute_force_orbits(max_o: int, contiguous_only: bool) -> dict[int, int]:
    """Number of D4 orbits of outer-ring O sets per size, by explicit closure."""
    seen = set()
    counts = {}
    for k in range(max_o + 1):
        counts[k] = 0
        for combo in itertools.combinations(W.OUTER, k):
            m = _positions_mask(combo)
            if m in seen or (contiguous_only and not W.is_contiguous_run(m)):
                continue
            counts[k] += 1
            for t in range(W.N_TRANSFORMS):
                seen.add(_positions_mask(int(W.PERMS[t, p]) for p in combo))
    return counts


class CanonicalEntry(NamedTuple):
    transform_id: int
    o_class: Optional[int]
    canonical_mask: int


@dataclass(frozen=True)
class CanonicalMap:
    """O-arrangement canonicalization over all 4096 outer-ring O masks."""

    transform: np.ndarray  # (4096,) transform id
    o_class: np.ndarray  # (4096,) class index or NO_CLASS
    class_masks: np.ndarray  # (n_classes, 2) canonical 12-bit masks, little-endian bytes
    position_maps: np.ndarray  # (8, 21) == window.PERMS
    rank: np.ndarray  # (n_classes, 21) bit index of each free position, 255 otherwise

    @classmethod
    def build(cls, oracle: OracleConfig = OracleConfig()) -> "CanonicalMap":
        reps = {}
        transform = np.zeros(4096, dtype=np.uint8)
        canon = np.zeros(4096, dtype=np.int64)
        for m in range(4096):
            t, c = canonical_image(m)
            transform[m], canon[m] = t, c
            if popcount(m) <= oracle.max_outer_o and W.is_contiguous_run(m):
                reps.setdefault(c, None)
        order = sorted(reps, key=lambda c: (popcount(c), _mask_positions(c)))
        index = {c: i for i, c in enumerate(order)}
        o_class = np.full(4096, NO_CLASS, dtype=np.uint8)
        for m in range(4096):
            if canon[m] in index:
                o_class[m] = index[canon[m]]
        class_masks = np.array([[c & 0xFF, c >> 8] for c in order], dtype=np.uint8)
        rank = np.full((len(order), W.N_POS), NO_CLASS, dtype=np.uint8)
        for ci, c in enumerate(order):
            opos = set(_mask_positions(c))
            free = [p for p in range(1, W.N_POS) if p not in opos]
            for b, p in enumerate(free):
                rank[ci, p] = b
        return cls(transform, o_class, class_masks, W.PERMS.copy(), rank)

    @property
    def n_classes(self) -> int:
        return self.class_masks.shape[0]

    def class_mask(self, ci: int) -> int:
        return int(self.class_masks[ci, 0]) | (int(self.class_masks[ci, 1]) << 8)

    def lookup(self, mask12: int) -> CanonicalEntry:
        oc = int(self.o_class[mask12])
        return CanonicalEntry(int(self.transform[mask12]), None if oc == NO_CLASS else oc,
                              canonical_image(mask12)[1])


@numba.njit(cache=True)
def _fill_class_table(out, omask, free, nbr_mask, span, max_o):
    nf = free.shape[0]
    for idx in range(out.shape[0]):
        bm = np.int64(0)
        for j in range(nf):
            if (idx >> j) & 1:
                bm |= np.int64(1) << free[j]
        out[idx] = classify_masks(bm, omask, nbr_mask, span, max_o)


def build_lut5x5(cmap: CanonicalMap, oracle: OracleConfig = OracleConfig()) -> list[np.ndarray]:
    tables = []
    for ci in range(cmap.n_classes):
        m12 = cmap.class_mask(ci)
        omask = m12 << 9
        opos = set(_mask_positions(m12))
        free = np.array([p for p in range(1, W.N_POS) if p not in opos], dtype=np.int64)
        out = np.empty(1 << free.shape[0], dtype=np.uint8)
        _fill_class_table(out, np.int64(omask), free, NBR_MASK, oracle.edge2_min_span, oracle.max_outer_o)
        tables.append(out)
    return tables


def canonicalize(labels, cmap: CanonicalMap, max_outer_o: int = 6):
    """(CanonicalEntry, pattern index) of a window; pattern is None without a table."""
    labels = getattr(labels, "labels", labels)
    if any(labels[i] == W.O for i in W.INNER):
        raise TooManyOPixels("inner-ring O pixels have no canonical table")
    m12 = W.outer_mask(labels)
    if popcount(m12) > max_outer_o:
        raise TooManyOPixels(f"{popcount(m12)} outer O pixels")
    entry = cmap.lookup(m12)
    if entry.o_class is None:
        return entry, None
    idx = 0
    for i in range(1, W.N_POS):
        if labels[i] == W.B:
            idx |= 1 << int(cmap.rank[entry.o_class, cmap.position_maps[entry.transform_id, i]])
    return entry, idx


# --- Algorithm 3: 3-D feature table -----------------------------------------

LUT3D_SHAPE = (9, 13, 7)


@numba.njit(cache=True)
def _scan_feature_space(omasks, nbr_mask, span, max_o, trappable, seen):
    for r in range(omasks.shape[0]):
        om = omasks[r]
        free = np.empty(20, dtype=np.int64)
        nf = 0
        for p in range(1, 21):
            if not (om >> p) & 1:
                free[nf] = p
                nf += 1
        n_oo = popcount(om)
        for idx in range(1 << nf):
            bm = np.int64(0)
            for j in range(nf):
                if (idx >> j) & 1:
                    bm |= np.int64(1) << free[j]
            non_a = bm | om
            if non_a:
                low = non_a & -non_a
                if low & om:
                    continue  # first non-A pixel in scan order would have been B
            n_ia = 9 - popcount(bm & 0x1FE)
            n_oa = 12 - popcount(bm & 0x1FFE00) - n_oo
            seen[n_ia - 1, n_oa, n_oo] = 1
            if classify_masks(bm, om, nbr_mask, span, max_o) != 0:
                trappable[n_ia - 1, n_oa, n_oo] = 1


def build_lut3d(oracle: OracleConfig = OracleConfig()) -> tuple[np.ndarray, np.ndarray]:
    """(table, seen) over (n_ia-1, n_oa, n_oo).

    Windows with outer O sets that are not a single ring run are
    non-trappable by rule, so enumerating run-shaped O sets is exhaustive
    for the trappable side.
    """
    omasks = np.array(
        [m << 9 for m in range(4096) if popcount(m) <= oracle.max_outer_o and W.is_contiguous_run(m)],
        dtype=np.int64,
    )
    trappable = np.zeros(LUT3D_SHAPE, dtype=np.uint8)
    seen = np.zeros(LUT3D_SHAPE, dtype=np.uint8)
    _scan_feature_space(omasks, NBR_MASK, oracle.edge2_min_span, oracle.max_outer_o, trappable, seen)
    return trappable, seen


# --- trapping parameter tables ---------------------------------------------

def build_trap_tables() -> dict[str, np.ndarray]:
    dq = np.arange(32)
    return {
        "trap": np.array([trap_amount(int(d)) for d in dq], dtype=np.uint8),
        "ovrd": np.array([ovrd_eighths(int(d)) for d in dq], dtype=np.uint8),
        "kdif": np.array([abs(d) for d in range(-31, 32)], dtype=np.uint8),
        "edge": np.array([0, 1, 2], dtype=np.uint8),
        "blend": np.array([[(a8 * d + 4) >> 3 for d in range(256)] for a8 in range(4, 9)], dtype=np.uint8),
    }


# --- the LUT set -------------------------------------------------------------

@dataclass
class LutSet:
    tolerance: ToleranceParams
    oracle: OracleConfig
    weights: DensityWeights
    tol_tables: ToleranceTables
    lut3: np.ndarray
    cmap: CanonicalMap
    lut5: list
    lut3d: np.ndarray
    trap_tables: dict
    report: dict = field(default_factory=dict)

    def __post_init__(self):
        sizes = np.array([t.shape[0] for t in self.lut5], dtype=np.int64)
        self.lut5_offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        self.lut5_flat = np.concatenate(self.lut5) if self.lut5 else np.zeros(0, np.uint8)

    @property
    def hash(self) -> bytes:
        return config_hash(self.tolerance, self.oracle, self.weights)

    def memory(self) -> dict[str, int]:
        trap = sum(a.nbytes for a in self.trap_tables.values())
        cm = self.cmap
        canon = cm.transform.nbytes + cm.o_class.nbytes + cm.class_masks.nbytes + cm.position_maps.nbytes + cm.rank.nbytes
        lut5 = sum(t.nbytes for t in self.lut5)
        return {
            "tolerance": self.tol_tables.nbytes,
            "lut3": self.lut3.nbytes,
            "trap_params": trap,
            "algorithm1": self.tol_tables.nbytes + self.lut3.nbytes + trap,
            "lut5_tables": lut5,
            "canonical_map": canon,
            "lut5_family": lut5 + canon,
            "lut3d": self.lut3d.nbytes,
        }

    # window-level classification for each algorithm
    def classify_lut3(self, labels) -> EdgeType:
        labels = getattr(labels, "labels", labels)
        idx = pattern_3x3(labels)
        if idx is None:
            return EdgeType.NON_TRAPPABLE
        return EdgeType.EDGE1 if self.lut3[idx] else EdgeType.NON_TRAPPABLE

    def classify_lut5(self, labels) -> EdgeType:
        labels = getattr(labels, "labels", labels)
        if any(labels[i] == W.O for i in W.INNER):
            return EdgeType.NON_TRAPPABLE
        if sum(1 for i in W.OUTER if labels[i] == W.O) > self.oracle.max_outer_o:
            return EdgeType.NON_TRAPPABLE
        entry, idx = canonicalize(labels, self.cmap, self.oracle.max_outer_o)
        if idx is None:
            return EdgeType.NON_TRAPPABLE
        return EdgeType(int(self.lut5[entry.o_class][idx]))

    def classify_hybrid(self, labels) -> EdgeType:
        labels = getattr(labels, "labels", labels)
        if all(lab == W.A for lab in labels):
            return EdgeType.NON_TRAPPABLE
        if any(labels[i] == W.O for i in W.INNER):
            return EdgeType.NON_TRAPPABLE
        n_oo = sum(1 for i in W.OUTER if labels[i] == W.O)
        if n_oo > self.oracle.max_outer_o:
            return EdgeType.NON_TRAPPABLE
        n_ia = sum(1 for i in range(9) if labels[i] == W.A)
        n_oa = sum(1 for i in W.OUTER if labels[i] == W.A)
        if not self.lut3d[n_ia - 1, n_oa, n_oo]:
            return EdgeType.NON_TRAPPABLE
        if any(labels[i] == W.B for i in W.FOUR_NEIGHBORS):
            return EdgeType.EDGE1
        return EdgeType.EDGE2


def build_luts(tolerance: ToleranceParams = ToleranceParams(), oracle: OracleConfig = OracleConfig(),
               weights: DensityWeights = DensityWeights()) -> LutSet:
    cmap = CanonicalMap.build(oracle)
    expected = brute_force_orbits(oracle.max_outer_o, contiguous_only=True)
    if sum(expected.values()) != cmap.n_classes:
        raise AssertionError(f"canonical classes {cmap.n_classes} != orbit count {sum(expected.values())}")
    lut3d, seen = build_lut3d(oracle)
    all_orbits = brute_force_orbits(oracle.max_outer_o, contiguous_only=False)
    report = {
        "canonical_classes": cmap.n_classes,
        "run_orbits_by_count": expected,
        "all_subset_orbits_by_count": all_orbits,
        "feature_triples_seen": int(seen.sum()),
        "feature_triples_trappable": int(lut3d.sum()),
    }
    luts = LutSet(
        tolerance, oracle, weights, ToleranceTables.build(tolerance), build_lut3x3(oracle), cmap,
        build_lut5x5(cmap, oracle), lut3d, build_trap_tables(), report,
    )
    luts.report["memory"] = luts.memory()
    return luts


# --- TRAPLUT1 serialization -------------------------------------------------

T_CONFIG = 0
_FIXED_IDS = {
    1: ("tol", "k_tol"), 2: ("tol", "x_lo"), 3: ("tol", "x_hi"), 4: ("tol", "ak_lo"), 5: ("tol", "ak_hi"),
    10: ("lut3", None),
    20: ("cmap", "transform"), 21: ("cmap", "o_class"), 22: ("cmap", "class_masks"),
    23: ("cmap", "position_maps"), 24: ("cmap", "rank"),
    200: ("lut3d", None),
    300: ("trap", "trap"), 301: ("trap", "ovrd"), 302: ("trap", "kdif"), 303: ("trap", "edge"), 304: ("trap", "blend"),
}
LUT5_BASE = 100


def _config_doc(luts: LutSet) -> bytes:
    return json.dumps({"tolerance": luts.tolerance.to_dict(), "oracle": luts.oracle.to_dict(),
                       "density": luts.weights.to_dict()}, sort_keys=True).encode()


def _table_items(luts: LutSet):
    yield T_CONFIG, np.frombuffer(_config_doc(luts), dtype=np.uint8)
    for tid, (group, name) in _FIXED_IDS.items():
        if group == "tol":
            yield tid, getattr(luts.tol_tables, name)
        elif group == "lut3":
            yield tid, luts.lut3
        elif group == "cmap":
            yield tid, getattr(luts.cmap, name)
        elif group == "lut3d":
            yield tid, luts.lut3d
        else:
            yield tid, luts.trap_tables[name]
    for ci, t in enumerate(luts.lut5):
        yield LUT5_BASE + ci, t


def save_luts(luts: LutSet) -> bytes:
    items = list(_table_items(luts))
    body = bytearray()
    body += struct.pack("<H", FORMAT_VERSION)
    body += luts.hash
    body += struct.pack("<H", len(items))
    for tid, arr in items:
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        body += struct.pack("<HB", tid, arr.ndim)
        body += struct.pack("<%dI" % arr.ndim, *arr.shape)
        body += arr.tobytes()
    return LUT_MAGIC + bytes(body) + struct.pack("<I", zlib.crc32(body))


def load_luts(buf: bytes) -> LutSet:
    if not buf.startswith(LUT_MAGIC):
        raise BadMagic("not a TRAPLUT1 file")
    body, crc = buf[len(LUT_MAGIC):-4], buf[-4:]
    if len(buf) < len(LUT_MAGIC) + 40:
        raise ChecksumMismatch("file too short")
    if struct.unpack("<I", crc)[0] != zlib.crc32(body):
        raise ChecksumMismatch("payload CRC32 mismatch")
    (version,) = struct.unpack_from("<H", body, 0)
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"format version {version}, expected {FORMAT_VERSION}")
    stored_hash = bytes(body[2:34])
    (count,) = struct.unpack_from("<H", body, 34)
    off = 36
    tables = {}
    for _ in range(count):
        tid, ndim = struct.unpack_from("<HB", body, off)
        off += 3
        dims = struct.unpack_from("<%dI" % ndim, body, off)
        off += 4 * ndim
        n = int(np.prod(dims)) if ndim else 1
        tables[tid] = np.frombuffer(body, dtype=np.uint8, count=n, offset=off).reshape(dims).copy()
        off += n
    doc = json.loads(tables.pop(T_CONFIG).tobytes())
    tol = ToleranceParams(doc["tolerance"]["a_tol"], tuple(doc["tolerance"]["k_tol_curve"]))
    oracle = OracleConfig(**doc["oracle"])
    weights = DensityWeights(**doc["density"])
    if config_hash(tol, oracle, weights) != stored_hash:
        raise VersionMismatch("oracle-config hash does not match the stored configuration")
    tol_tables = ToleranceTables(*(tables[i] for i in (1, 2, 3, 4, 5)))
    cmap = CanonicalMap(*(tables[i] for i in (20, 21, 22, 23, 24)))
    lut5 = [tables[LUT5_BASE + ci] for ci in range(cmap.n_classes)]
    trap = {name: tables[tid] for tid, (g, name) in _FIXED_IDS.items() if g == "trap"}
    luts = LutSet(tol, oracle, weights, tol_tables, tables[10], cmap, lut5, tables[200], trap)
    luts.report["memory"] = luts.memory()
    return luts


def save_luts_file(luts: LutSet, path):
    with open(path, "wb") as fh:
        fh.write(save_luts(luts))


def load_luts_file(path) -> LutSet:
    with open(path, "rb") as fh:
        return load_luts(fh.read())
