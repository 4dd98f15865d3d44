"""Synthetic test pages with ground-truth region maps.

Page kinds:

* ``text``: K block glyphs (1-3 px strokes) knocked out of flat fills;
* ``graphic``: flat and nested rectangles and bars on white, red included;
* ``gradient``: smooth ramps;
* ``noise``: picture-like random content;
* ``mixed``: one quadrant of each of the above;
* ``flat``: a few large flat fills covering most of the page (uniform-heavy).

Flat objects keep a margin of at least ``MARGIN`` px from every other
object edge, so no pixel sees more than one color edge within the 2 px
misregistration reach.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .misreg_sim import CONTONE, RegionMap, save_region_map
from .raster_io import CmykPixel, RasterPage, save_page

MARGIN = 6
KINDS = ("text", "graphic", "gradient", "noise", "mixed", "flat")

K100 = CmykPixel(0, 0, 0, 255)
CYAN = CmykPixel(255, 0, 0, 0)
MAGENTA = CmykPixel(0, 255, 0, 0)
YELLOW = CmykPixel(0, 0, 255, 0)
RED = CmykPixel(0, 255, 255, 0)
GREEN = CmykPixel(255, 0, 255, 0)
BLUE = CmykPixel(255, 255, 0, 0)

TEXT_FILLS = (MAGENTA, CYAN, YELLOW, GREEN)
GRAPHIC_FILLS = (RED, GREEN, BLUE, MAGENTA, CYAN, YELLOW, K100)
# (outer, inner) pairs whose densities differ enough for a 2 px trap
NESTED_PAIRS = ((RED, YELLOW), (BLUE, YELLOW), (BLUE, CYAN), (MAGENTA, K100),
                (CYAN, K100), (GREEN, K100), (YELLOW, RED), (YELLOW, BLUE))
# pairs without a shared colorant: a plane shift between them exposes white
GAP_PAIRS = tuple(pr for pr in NESTED_PAIRS if not any(a and b for a, b in zip(*pr)))


class RecipeInvalid(ValueError):
    pass


@dataclass(frozen=True)
class PageRecipe:
    kind: str
    width: int = 1024
    height: int = 1024
    palette: tuple = ()
    seed: int = 0
    objects: int = 0  # 0 picks a kind-dependent default

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RecipeInvalid(f"unknown kind {self.kind!r}")
        if not (isinstance(self.width, int) and isinstance(self.height, int)):
            raise RecipeInvalid("size must be integral")
        lo = 96 if self.kind == "mixed" else 48
        if self.width < lo or self.height < lo:
            raise RecipeInvalid(f"{self.kind} pages need at least {lo}x{lo} pixels")
        if not 0 <= self.seed < 2 ** 64:
            raise RecipeInvalid("seed must be a 64-bit unsigned integer")
        if self.objects < 0:
            raise RecipeInvalid("objects must be >= 0")
        pal = tuple(CmykPixel(*p) for p in self.palette)
        for p in pal:
            if len(p) != 4 or any(not 0 <= v <= 255 for v in p):
                raise RecipeInvalid(f"bad palette color {p}")
            if p == CmykPixel(0, 0, 0, 0):
                raise RecipeInvalid("white is the background and cannot be a fill")
        if self.kind == "text" and any(p not in TEXT_FILLS for p in pal):
            raise RecipeInvalid("text fills must come from TEXT_FILLS")
        object.__setattr__(self, "palette", pal)

    @property
    def name(self) -> str:
        return f"{self.kind}_{self.width}x{self.height}_s{self.seed}"

    def to_dict(self):
        return {"kind": self.kind, "width": self.width, "height": self.height,
                "palette": [list(p) for p in self.palette], "seed": self.seed, "objects": self.objects}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["palette"] = tuple(tuple(p) for p in d.get("palette", ()))
        try:
            return cls(**d)
        except TypeError as e:
            raise RecipeInvalid(str(e)) from None


class _Canvas:
    def __init__(self, w, h):
        self.data = np.zeros((h, w, 4), dtype=np.uint8)
        self.ids = np.zeros((h, w), dtype=np.uint8)
        self.palette = {}
        self._by_color = {}

    def region(self, color: CmykPixel) -> int:
        color = CmykPixel(*color)
        if color not in self._by_color:
            rid = len(self._by_color) + 1
            if rid >= CONTONE:
                raise RecipeInvalid("too many distinct fills")
            self._by_color[color] = rid
            self.palette[rid] = color
        return self._by_color[color]

    def fill(self, y0, y1, x0, x1, color):
        rid = self.region(color)
        self.data[y0:y1, x0:x1] = color
        self.ids[y0:y1, x0:x1] = rid

    def paint(self, mask, oy, ox, color):
        rid = self.region(color)
        h, w = mask.shape
        view = self.data[oy:oy + h, ox:ox + w]
        view[mask] = color
        self.ids[oy:oy + h, ox:ox + w][mask] = rid

    def contone(self, y0, y1, x0, x1, pixels):
        self.data[y0:y1, x0:x1] = pixels
        self.ids[y0:y1, x0:x1] = CONTONE


# --- glyphs ------------------------------------------------------------------

GLYPH_W, GLYPH_H = 14, 19


def glyph_mask(rng: np.random.Generator) -> np.ndarray:
    """A block glyph: stems, bars and a 1 px serif on a 14x19 cell.

    Counters (enclosed fill) stay at least 3 px across for every stroke width.
    """
    m = np.zeros((GLYPH_H, GLYPH_W), dtype=bool)
    w = int(rng.integers(1, 4))
    left, right = 2, GLYPH_W - 3 - w
    top, mid, bot = 1, 9 - w // 2, GLYPH_H - 1 - w
    segs = rng.random(6) < 0.55
    if segs.sum() < 2:
        segs[[0, 3]] = True
    if segs[0]:
        m[top:bot + w, left:left + w] = True
    if segs[1]:
        m[top:bot + w, right:right + w] = True
    if segs[2]:
        m[top:top + w, left:right + w] = True
    if segs[3]:
        m[mid:mid + w, left:right + w] = True
    if segs[4]:
        m[bot:bot + w, left:right + w] = True
    if segs[5] and w == 1:
        c = (left + right) // 2
        m[top:bot + w, c:c + w] = True
    if segs[0] and rng.random() < 0.5:
        m[bot + w - 1, left - 1:left + w + 1] = True
    return m


def _text_block(cv: _Canvas, rng, y0, y1, x0, x1, fills):
    fill = fills[int(rng.integers(len(fills)))]
    cv.fill(y0, y1, x0, x1, fill)
    gy0, gx0 = y0 + MARGIN, x0 + MARGIN
    rows = (y1 - y0 - 2 * MARGIN) // (GLYPH_H + 4)
    cols = (x1 - x0 - 2 * MARGIN) // (GLYPH_W + 2)
    for r in range(max(0, rows)):
        for c in range(max(0, cols)):
            if rng.random() < 0.12:
                continue  # word space
            cv.paint(glyph_mask(rng), gy0 + r * (GLYPH_H + 4), gx0 + c * (GLYPH_W + 2), K100)


def _text(cv, rng, y0, y1, x0, x1, recipe):
    fills = recipe.palette or TEXT_FILLS
    bh = max(GLYPH_H + 2 * MARGIN + 4, (y1 - y0) // 3)
    y = y0 + MARGIN
    while y + GLYPH_H + 2 * MARGIN <= y1 - MARGIN:
        h = min(bh, y1 - MARGIN - y)
        _text_block(cv, rng, y, y + h, x0 + MARGIN, x1 - MARGIN, fills)
        y += h + MARGIN


def _graphic(cv, rng, y0, y1, x0, x1, recipe):
    fills = recipe.palette or GRAPHIC_FILLS
    n = recipe.objects or max(4, (y1 - y0) * (x1 - x0) // 6000)
    taken = np.zeros((y1 - y0, x1 - x0), dtype=bool)
    w, h = x1 - x0, y1 - y0
    nested = 0
    for _ in range(n * 6):
        if n <= 0:
            break
        bar = rng.random() < 0.3
        if bar:
            thick = int(rng.integers(1, 4))
            length = int(rng.integers(10, max(11, min(w, h) // 2)))
            rh, rw = (thick, length) if rng.random() < 0.5 else (length, thick)
        else:
            rh = int(rng.integers(8, max(9, h // 3)))
            rw = int(rng.integers(8, max(9, w // 3)))
        if rh + 2 * MARGIN >= h or rw + 2 * MARGIN >= w:
            continue
        ry = int(rng.integers(MARGIN, h - rh - MARGIN))
        rx = int(rng.integers(MARGIN, w - rw - MARGIN))
        if taken[ry - MARGIN:ry + rh + MARGIN, rx - MARGIN:rx + rw + MARGIN].any():
            continue
        taken[ry:ry + rh, rx:rx + rw] = True
        # the first rectangle big enough to nest always does, so every page has abutting fills
        nest = not bar and rh > 4 * MARGIN and rw > 4 * MARGIN and (not nested or rng.random() < 0.5)
        if nest and not recipe.palette:
            pairs = NESTED_PAIRS if nested else GAP_PAIRS
            nested += 1
            outer, inner = pairs[int(rng.integers(len(pairs)))]
            cv.fill(y0 + ry, y0 + ry + rh, x0 + rx, x0 + rx + rw, outer)
            iy = ry + MARGIN + int(rng.integers(0, max(1, rh // 2 - 2 * MARGIN)))
            ix = rx + MARGIN + int(rng.integers(0, max(1, rw // 2 - 2 * MARGIN)))
            ih = int(rng.integers(4, ry + rh - MARGIN - iy + 1))
            iw = int(rng.integers(4, rx + rw - MARGIN - ix + 1))
            cv.fill(y0 + iy, y0 + iy + ih, x0 + ix, x0 + ix + iw, inner)
        else:
            cv.fill(y0 + ry, y0 + ry + rh, x0 + rx, x0 + rx + rw, fills[int(rng.integers(len(fills)))])
        n -= 1


def _gradient(cv, rng, y0, y1, x0, x1, recipe):
    h, w = y1 - y0, x1 - x0
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    px = np.empty((h, w, 4), dtype=np.uint8)
    for p in range(4):
        a, b = rng.uniform(-1, 1, 2)
        base = rng.uniform(0, 200)
        ramp = base + 50 * (a * xx / w + b * yy / h)
        px[:, :, p] = np.clip(ramp, 0, 255).astype(np.uint8)
    cv.contone(y0 + MARGIN, y1 - MARGIN, x0 + MARGIN, x1 - MARGIN,
               px[MARGIN:h - MARGIN, MARGIN:w - MARGIN])


def _noise(cv, rng, y0, y1, x0, x1, recipe):
    h, w = y1 - y0 - 2 * MARGIN, x1 - x0 - 2 * MARGIN
    px = rng.integers(0, 256, size=(h, w, 4), dtype=np.uint8)
    cv.contone(y0 + MARGIN, y1 - MARGIN, x0 + MARGIN, x1 - MARGIN, px)


def _flat(cv, rng, y0, y1, x0, x1, recipe):
    fills = recipe.palette or GRAPHIC_FILLS
    n = recipe.objects or 3
    th, tw = (y1 - y0) // n, (x1 - x0) // n
    for r in range(n):
        for c in range(n):
            ty, tx = y0 + r * th + MARGIN, x0 + c * tw + MARGIN
            h, w = th - 2 * MARGIN, tw - 2 * MARGIN
            if h < 4 * MARGIN or w < 4 * MARGIN or recipe.palette or rng.random() < 0.5:
                cv.fill(ty, ty + h, tx, tx + w, fills[int(rng.integers(len(fills)))])
                continue
            outer, inner = NESTED_PAIRS[int(rng.integers(len(NESTED_PAIRS)))]
            cv.fill(ty, ty + h, tx, tx + w, outer)
            cv.fill(ty + h // 4, ty + h - h // 4, tx + w // 4, tx + w - w // 4, inner)


_DRAW = {"text": _text, "graphic": _graphic, "gradient": _gradient, "noise": _noise, "flat": _flat}


def generate(recipe: PageRecipe) -> tuple[RasterPage, RegionMap]:
    """Render a recipe.  Same recipe, same bytes."""
    rng = np.random.default_rng(recipe.seed)
    cv = _Canvas(recipe.width, recipe.height)
    h, w = recipe.height, recipe.width
    if recipe.kind == "mixed":
        hy, hx = h // 2, w // 2
        quads = [(0, hy, 0, hx), (0, hy, hx, w), (hy, h, 0, hx), (hy, h, hx, w)]
        order = ["text", "graphic", "gradient", "noise"]
        for kind, (a, b, c, d) in zip(order, quads):
            sub = PageRecipe(kind, d - c, b - a, (), recipe.seed, recipe.objects)
            _DRAW[kind](cv, rng, a, b, c, d, sub)
    else:
        _DRAW[recipe.kind](cv, rng, 0, h, 0, w, recipe)
    return RasterPage(cv.data), RegionMap(cv.ids, cv.palette)


def uniform_heavy(seed: int, size: int = 1024) -> PageRecipe:
    return PageRecipe("flat", size, size, (), seed)


def default_recipes(size: int = 1024, pages: int = 4, seed: int = 0) -> list[PageRecipe]:
    return [PageRecipe("mixed", size, size, (), seed + i) for i in range(pages)]


def text_graphic_recipes(size: int = 256, pages: int = 20, seed: int = 0) -> list[PageRecipe]:
    kinds = ("text", "graphic")
    return [PageRecipe(kinds[i % 2], size, size, (), seed + i) for i in range(pages)]


def load_recipes(path) -> list[PageRecipe]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise RecipeInvalid(f"recipe file is not JSON: {e}") from None
    if isinstance(doc, dict):
        doc = doc.get("recipes", [])
    if not isinstance(doc, list):
        raise RecipeInvalid("recipe file must hold a list of recipes")
    return [PageRecipe.from_dict(d) for d in doc]


def write_corpus(recipes, out_dir, seed_offset: int = 0) -> list[Path]:
    """Render recipes into ``out_dir`` as NAME.cmyk + NAME.rgn (+ NAME.rgn.json)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    manifest = []
    for r in recipes:
        if seed_offset:
            r = PageRecipe(r.kind, r.width, r.height, r.palette, (r.seed + seed_offset) % 2 ** 64, r.objects)
        page, regions = generate(r)
        stem = out_dir / r.name
        save_page(page, stem.with_suffix(".cmyk"))
        save_region_map(regions, stem.with_suffix(".rgn"))
        manifest.append({"name": r.name, **r.to_dict()})
        written.append(stem.with_suffix(".cmyk"))
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1))
    return written
