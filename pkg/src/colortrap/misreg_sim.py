"""Plane misregistration simulator and gap/halo artifact metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .raster_io import CmykPixel, RasterPage, TruncatedPayload, format_header, parse_header

REGION_MAGIC = b"RGNMAP1"
BACKGROUND = 0
CONTONE = 255  # continuous-tone content, ignored by the metrics
PLANES = "CMYK"
MAX_SHIFT = 2


class ShiftTooLarge(ValueError):
    pass


class RegionMapMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PlaneShift:
    plane: str
    dx: int
    dy: int

    def __post_init__(self):
        if self.plane not in PLANES:
            raise ValueError(f"plane must be one of {PLANES}")
        if abs(self.dx) > MAX_SHIFT or abs(self.dy) > MAX_SHIFT:
            raise ShiftTooLarge(f"shift ({self.dx}, {self.dy}) exceeds {MAX_SHIFT} px")

    @property
    def index(self) -> int:
        return PLANES.index(self.plane)


def shift_plane(page: RasterPage, s: PlaneShift) -> RasterPage:
    """Translate one plane by (dx, dy); vacated pixels get no colorant."""
    data = page.data
    h, w = page.height, page.width
    out = data.copy()
    p = s.index
    out[:, :, p] = 0
    dx, dy = s.dx, s.dy
    src = data[max(0, -dy): h - max(0, dy), max(0, -dx): w - max(0, dx), p]
    out[max(0, dy): max(0, dy) + src.shape[0], max(0, dx): max(0, dx) + src.shape[1], p] = src
    return RasterPage(out)


def shifts_1px() -> list[tuple[int, int]]:
    return [(dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dx, dy) != (0, 0)]


def shifts_2px() -> list[tuple[int, int]]:
    """Non-zero offsets of Euclidean extent at most 2."""
    return [(dx, dy) for dy in range(-2, 3) for dx in range(-2, 3)
            if (dx, dy) != (0, 0) and dx * dx + dy * dy <= 4]


# --- region maps -------------------------------------------------------------

@dataclass(frozen=True)
class RegionMap:
    """Per-pixel region ids plus the fill color of every flat region."""

    ids: np.ndarray  # (h, w) uint8
    palette: dict  # id -> CmykPixel

    def __post_init__(self):
        ids = np.ascontiguousarray(self.ids, dtype=np.uint8)
        ids.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "palette", {int(k): CmykPixel(*map(int, v)) for k, v in self.palette.items()})

    @property
    def shape(self):
        return self.ids.shape

    def __eq__(self, other):
        return (isinstance(other, RegionMap) and np.array_equal(self.ids, other.ids)
                and self.palette == other.palette)

    def consistent_with(self, page: RasterPage) -> bool:
        """Every flat-region pixel carries its region's palette color."""
        if page.data.shape[:2] != self.ids.shape:
            return False
        for rid, color in self.palette.items():
            sel = self.ids == rid
            if sel.any() and not (page.data[sel] == np.array(color, dtype=np.uint8)).all():
                return False
        return True

    def palette_json(self) -> str:
        return json.dumps({str(k): list(v) for k, v in sorted(self.palette.items())})


def write_region_map(rm: RegionMap) -> bytes:
    h, w = rm.ids.shape
    return format_header(REGION_MAGIC, w, h) + rm.ids.tobytes()


def read_region_map(buf: bytes, palette: dict | None = None) -> RegionMap:
    w, h, off = parse_header(buf, REGION_MAGIC)
    if len(buf) - off != w * h:
        raise TruncatedPayload(f"expected {w * h} region bytes, found {len(buf) - off}")
    ids = np.frombuffer(buf, dtype=np.uint8, offset=off).reshape(h, w).copy()
    return RegionMap(ids, palette or {})


def _palette_path(path) -> Path:
    return Path(str(path) + ".json")


def save_region_map(rm: RegionMap, path):
    Path(path).write_bytes(write_region_map(rm))
    _palette_path(path).write_text(rm.palette_json())


def load_region_map(path) -> RegionMap:
    pal_file = _palette_path(path)
    palette = {}
    if pal_file.exists():
        palette = {int(k): v for k, v in json.loads(pal_file.read_text()).items()}
    return read_region_map(Path(path).read_bytes(), palette)


# --- artifact metrics --------------------------------------------------------

@dataclass(frozen=True)
class ArtifactConfig:
    gap_max: int = 25  # all planes at or below 10% of 255
    halo_min: int = 128  # a plane counts as present above 50%
    reach: int = 2  # Chebyshev distance for "flanked by" / "band"


class ArtifactMetric(NamedTuple):
    gap_pixels: int
    halo_pixels: int


def _dilate(mask: np.ndarray, r: int) -> np.ndarray:
    h, w = mask.shape
    pad = np.pad(mask, r)
    out = np.zeros_like(mask)
    for dy in range(2 * r + 1):
        for dx in range(2 * r + 1):
            out |= pad[dy: dy + h, dx: dx + w]
    return out


def _dominant(color: CmykPixel, weights=(3, 4, 1, 8)) -> int:
    prio = sorted(range(4), key=lambda p: (-weights[p], (3, 1, 0, 2).index(p)))
    best, best_v = -1, -1
    for p in prio:
        if weights[p] * color[p] > best_v:
            best, best_v = p, weights[p] * color[p]
    return best


def gap_mask(page: RasterPage, regions: RegionMap, cfg: ArtifactConfig = ArtifactConfig()) -> np.ndarray:
    _check(page, regions)
    ids = regions.ids
    pale = (page.data <= cfg.gap_max).all(axis=2)
    flat = (ids != BACKGROUND) & (ids != CONTONE)
    out = np.zeros(ids.shape, dtype=bool)
    for rid in np.unique(ids[flat & pale]):
        others = flat & (ids != rid)
        out |= (ids == rid) & pale & _dilate(others, cfg.reach)
    return out


def halo_mask(page: RasterPage, regions: RegionMap, cfg: ArtifactConfig = ArtifactConfig(),
              weights=(3, 4, 1, 8)) -> np.ndarray:
    """Single stray colorant at the border of a multi-colorant region and white.

    Counts pixels on either side of the border (inside the region, or in the
    background next to it) left with exactly one strong plane.  A lone
    dominant plane is what the darker outline looks like anyway and is
    not counted.
    """
    _check(page, regions)
    ids = regions.ids
    bg = ids == BACKGROUND
    near_bg = _dilate(bg, cfg.reach)
    strong = page.data >= cfg.halo_min
    single = strong.sum(axis=2) == 1
    out = np.zeros(ids.shape, dtype=bool)
    for rid, color in regions.palette.items():
        if rid in (BACKGROUND, CONTONE) or sum(v >= cfg.halo_min for v in color) < 2:
            continue
        mine = ids == rid
        if not mine.any():
            continue
        band = (mine & near_bg) | (bg & _dilate(mine, cfg.reach))
        out |= band & single & ~strong[:, :, _dominant(color, weights)]
    return out


def _check(page: RasterPage, regions: RegionMap):
    if page.data.shape[:2] != regions.ids.shape:
        raise RegionMapMismatch(f"page {page.width}x{page.height} vs region map "
                                f"{regions.ids.shape[1]}x{regions.ids.shape[0]}")


def measure_artifacts(page: RasterPage, regions: RegionMap, cfg: ArtifactConfig = ArtifactConfig()) -> ArtifactMetric:
    return ArtifactMetric(int(gap_mask(page, regions, cfg).sum()), int(halo_mask(page, regions, cfg).sum()))


def shift_sweep(page: RasterPage, regions: RegionMap, shifts, planes: str = PLANES,
                cfg: ArtifactConfig = ArtifactConfig()) -> dict:
    """ArtifactMetric for every (plane, dx, dy) combination."""
    return {(pl, dx, dy): measure_artifacts(shift_plane(page, PlaneShift(pl, dx, dy)), regions, cfg)
            for pl in planes for dx, dy in shifts}
