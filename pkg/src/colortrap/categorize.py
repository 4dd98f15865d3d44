"""Bit truncation, tolerance volumes and A/B/O labeling of a window."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .raster_io import CmykPixel
from .window import A, B, O, N_POS

A_TOL = 24
LEVELS = 32


class TruncatedPixel(NamedTuple):
    c5: int
    m5: int
    k5: int


def truncate(p: CmykPixel) -> TruncatedPixel:
    return TruncatedPixel(p[0] >> 3, p[1] >> 3, p[3] >> 3)


def upscale(x5: int) -> int:
    """Bucket midpoint of a 5-bit value in the 8-bit domain."""
    return (x5 << 3) + 4


def default_k_tol_curve(a_tol: int = A_TOL) -> tuple[int, ...]:
    # Flat at a_tol up to k5 = 15, then a linear ramp reaching 2*a_tol at k5 = 31.
    curve = []
    for k in range(LEVELS):
        if k <= 15:
            curve.append(a_tol)
        else:
            num = a_tol * 16 * 2 + a_tol * (k - 15) * 2 + 16
            curve.append(num // 32)
    return tuple(curve)


@dataclass(frozen=True)
class ToleranceParams:
    a_tol: int = A_TOL
    k_tol_curve: tuple[int, ...] = field(default_factory=default_k_tol_curve)

    def __post_init__(self):
        if len(self.k_tol_curve) != LEVELS:
            raise ValueError("k_tol_curve needs 32 entries")
        if any(b < a for a, b in zip(self.k_tol_curve, self.k_tol_curve[1:])):
            raise ValueError("k_tol_curve must be non-decreasing")
        if not 0 < 2 * max(self.a_tol, max(self.k_tol_curve)) <= 255:
            raise ValueError("tolerances must satisfy 0 < 2*tol <= 255")

    def to_dict(self):
        return {"a_tol": self.a_tol, "k_tol_curve": list(self.k_tol_curve)}


def k_tol(k_a: int, params: ToleranceParams) -> int:
    return params.k_tol_curve[k_a]


def b_tol(k_a: int, params: ToleranceParams) -> int:
    return max(params.a_tol, k_tol(k_a, params))


def bound_lo(x: int, tol: int) -> int:
    return min(max(x - tol, 0), 255 - 2 * tol)


def bound_hi(x: int, tol: int) -> int:
    return max(min(x + tol, 255), 2 * tol)


class ToleranceVolume(NamedTuple):
    lo: tuple[int, int, int]
    hi: tuple[int, int, int]

    def contains(self, p: TruncatedPixel) -> bool:
        return all(self.lo[i] <= upscale(p[i]) <= self.hi[i] for i in range(3))


def tolerance_volume_a(center: TruncatedPixel, params: ToleranceParams) -> ToleranceVolume:
    bt = b_tol(center.k5, params)
    at = params.a_tol
    xs = [upscale(v) for v in center]
    tols = (bt, bt, at)
    return ToleranceVolume(
        tuple(bound_lo(x, t) for x, t in zip(xs, tols)),
        tuple(bound_hi(x, t) for x, t in zip(xs, tols)),
    )


def tolerance_volume_b(first_b: TruncatedPixel, params: ToleranceParams, k_a: int) -> ToleranceVolume:
    """Volume around the B color; the tolerance is still set by the center's K."""
    bt = b_tol(k_a, params)
    xs = [upscale(v) for v in first_b]
    return ToleranceVolume(
        tuple(bound_lo(x, bt) for x in xs),
        tuple(bound_hi(x, bt) for x in xs),
    )


@dataclass(frozen=True)
class ToleranceTables:
    """Precomputed K_TOL and bound tables.

    ``x_lo[k_a, x5]``/``x_hi[k_a, x5]`` hold the bounds at B_TOL(k_a);
    ``ak_lo``/``ak_hi`` hold the K-plane bounds of the A volume (A_TOL).
    """

    k_tol: np.ndarray
    x_lo: np.ndarray
    x_hi: np.ndarray
    ak_lo: np.ndarray
    ak_hi: np.ndarray

    @classmethod
    def build(cls, params: ToleranceParams) -> "ToleranceTables":
        kt = np.array(params.k_tol_curve, dtype=np.uint8)
        x_lo = np.zeros((LEVELS, LEVELS), dtype=np.uint8)
        x_hi = np.zeros((LEVELS, LEVELS), dtype=np.uint8)
        for ka in range(LEVELS):
            bt = b_tol(ka, params)
            for x5 in range(LEVELS):
                x_lo[ka, x5] = bound_lo(upscale(x5), bt)
                x_hi[ka, x5] = bound_hi(upscale(x5), bt)
        ak_lo = np.array([bound_lo(upscale(x5), params.a_tol) for x5 in range(LEVELS)], dtype=np.uint8)
        ak_hi = np.array([bound_hi(upscale(x5), params.a_tol) for x5 in range(LEVELS)], dtype=np.uint8)
        return cls(kt, x_lo, x_hi, ak_lo, ak_hi)

    def arrays(self):
        return {"k_tol": self.k_tol, "x_lo": self.x_lo, "x_hi": self.x_hi,
                "ak_lo": self.ak_lo, "ak_hi": self.ak_hi}

    @property
    def nbytes(self) -> int:
        return sum(a.nbytes for a in self.arrays().values())

    def volume_a(self, center: TruncatedPixel) -> ToleranceVolume:
        ka = center.k5
        return ToleranceVolume(
            (int(self.x_lo[ka, center.c5]), int(self.x_lo[ka, center.m5]), int(self.ak_lo[center.k5])),
            (int(self.x_hi[ka, center.c5]), int(self.x_hi[ka, center.m5]), int(self.ak_hi[center.k5])),
        )

    def volume_b(self, first_b: TruncatedPixel, k_a: int) -> ToleranceVolume:
        return ToleranceVolume(
            tuple(int(self.x_lo[k_a, v]) for v in first_b),
            tuple(int(self.x_hi[k_a, v]) for v in first_b),
        )


class LabeledWindow(NamedTuple):
    labels: tuple[int, ...]
    color_a: TruncatedPixel
    color_b: Optional[TruncatedPixel]
    b_position: Optional[int]


def label_window(window, params: ToleranceParams) -> LabeledWindow:
    """Label 21 truncated pixels (window order) as A, B or O.

    Scans positions 1..20 in order; the first pixel outside the A volume
    fixes B.  Membership is inclusive on both bounds.
    """
    if len(window) != N_POS:
        raise ValueError("window must hold 21 pixels")
    center = TruncatedPixel(*window[0])
    vol_a = tolerance_volume_a(center, params)
    vol_b = None
    color_b = None
    b_pos = None
    labels = [A] * N_POS
    for i in range(1, N_POS):
        p = TruncatedPixel(*window[i])
        if vol_a.contains(p):
            continue
        if vol_b is None:
            color_b, b_pos = p, i
            vol_b = tolerance_volume_b(p, params, center.k5)
            labels[i] = B
        elif vol_b.contains(p):
            labels[i] = B
        else:
            labels[i] = O
    return LabeledWindow(tuple(labels), center, color_b, b_pos)
