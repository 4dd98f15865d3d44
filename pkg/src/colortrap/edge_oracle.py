"""Reference edge classifier and prescreening rules.

The classifier works on labels only.  Windows are handled as two bitmasks
over the 21 positions (bit i = position i): one for B labels, one for O.

Rule set, applied in order:

* inner-ring O, more than ``max_outer_o`` outer O, or outer O pixels that do
  not form a single run along the ring: non-trappable;
* an inner-ring B whose 8-connected B component reaches the outer ring:
  edge1;
* no B among the four nearest neighbours and some B component covering at
  least ``edge2_min_span`` outer positions: edge2;
* otherwise non-trappable.

Every rule is invariant under the eight flips/rotations of the window.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from . import window as W
from .raster_io import CmykPixel


class EdgeType(enum.IntEnum):
    NON_TRAPPABLE = 0
    EDGE1 = 1
    EDGE2 = 2


class Prescreen(enum.IntEnum):
    NON_TRAPPABLE = 0
    NEEDS_CLASSIFICATION = 1


@dataclass(frozen=True)
class OracleConfig:
    edge2_min_span: int = 2
    max_outer_o: int = 6

    def to_dict(self):
        return {"edge2_min_span": self.edge2_min_span, "max_outer_o": self.max_outer_o}


class FeatureTriple(NamedTuple):
    n_ia: int
    n_oa: int
    n_oo: int


INNER_BITS = sum(1 << i for i in W.INNER)
OUTER_BITS = sum(1 << i for i in W.OUTER)
FOUR_BITS = sum(1 << i for i in W.FOUR_NEIGHBORS)
ALL_BITS = (1 << W.N_POS) - 1

NBR_MASK = np.array(
    [sum(1 << int(j) for j in W.NEIGHBORS[i, : W.NEIGHBOR_COUNTS[i]]) for i in range(W.N_POS)],
    dtype=np.int64,
)


@numba.njit(cache=True, nogil=True)
def popcount(m):
    n = 0
    while m:
        m &= m - 1
        n += 1
    return n


@numba.njit(cache=True, nogil=True)
def component(seed, bmask, nbr_mask):
    comp = np.int64(1) << seed
    while True:
        grown = comp
        for i in range(21):
            if (comp >> i) & 1:
                grown |= nbr_mask[i] & bmask
        if grown == comp:
            return comp
        comp = grown


@numba.njit(cache=True, nogil=True)
def o_run_ok(omask):
    m = (omask >> 9) & 0xFFF
    if m == 0 or m == 0xFFF:
        return True
    prev = ((m << 1) | (m >> 11)) & 0xFFF
    return popcount(m & ~prev) == 1


@numba.njit(cache=True, nogil=True)
def classify_masks(bmask, omask, nbr_mask, edge2_min_span, max_outer_o):
    if omask & 0x1FE:
        return 0
    if popcount(omask & 0x1FFE00) > max_outer_o:
        return 0
    if not o_run_ok(omask):
        return 0
    for i in range(1, 9):
        if (bmask >> i) & 1:
            if component(i, bmask, nbr_mask) & 0x1FFE00:
                return 1
    if bmask & 0xAA:
        return 0
    seen = np.int64(0)
    for i in range(1, 21):
        if (bmask >> i) & 1 and not (seen >> i) & 1:
            comp = component(i, bmask, nbr_mask)
            seen |= comp
            if popcount(comp & 0x1FFE00) >= edge2_min_span:
                return 2
    return 0


@numba.njit(cache=True, nogil=True)
def label_masks(labels):
    bm = np.int64(0)
    om = np.int64(0)
    for i in range(21):
        if labels[i] == 1:
            bm |= np.int64(1) << i
        elif labels[i] == 2:
            om |= np.int64(1) << i
    return bm, om


@numba.njit(cache=True, nogil=True)
def classify_batch(label_rows, nbr_mask, edge2_min_span, max_outer_o):
    out = np.empty(label_rows.shape[0], dtype=np.int8)
    for r in range(label_rows.shape[0]):
        bm, om = label_masks(label_rows[r])
        out[r] = classify_masks(bm, om, nbr_mask, edge2_min_span, max_outer_o)
    return out


def masks_of(labels) -> tuple[int, int]:
    bm = om = 0
    for i, lab in enumerate(labels):
        if lab == W.B:
            bm |= 1 << i
        elif lab == W.O:
            om |= 1 << i
    return bm, om


def _labels(window):
    return window.labels if hasattr(window, "labels") else tuple(window)


def classify(window, config: OracleConfig = OracleConfig()) -> EdgeType:
    """Classify a LabeledWindow (or a bare 21-label sequence)."""
    bm, om = masks_of(_labels(window))
    return EdgeType(classify_masks(bm, om, NBR_MASK, config.edge2_min_span, config.max_outer_o))


def classify_many(label_rows: np.ndarray, config: OracleConfig = OracleConfig()) -> np.ndarray:
    rows = np.ascontiguousarray(label_rows, dtype=np.int8)
    return classify_batch(rows, NBR_MASK, config.edge2_min_span, config.max_outer_o)


def extract_features(window) -> FeatureTriple:
    labels = _labels(window)
    n_ia = sum(1 for i in range(9) if labels[i] == W.A)
    n_oa = sum(1 for i in W.OUTER if labels[i] == W.A)
    n_oo = sum(1 for i in W.OUTER if labels[i] == W.O)
    return FeatureTriple(n_ia, n_oa, n_oo)


def prescreen(window, center: CmykPixel, config: OracleConfig = OracleConfig()) -> Prescreen:
    labels = _labels(window)
    if CmykPixel(*center).is_white:
        return Prescreen.NON_TRAPPABLE
    if all(lab == W.A for lab in labels):
        return Prescreen.NON_TRAPPABLE
    if any(labels[i] == W.O for i in W.INNER):
        return Prescreen.NON_TRAPPABLE
    if sum(1 for i in W.OUTER if labels[i] == W.O) > config.max_outer_o:
        return Prescreen.NON_TRAPPABLE
    return Prescreen.NEEDS_CLASSIFICATION
