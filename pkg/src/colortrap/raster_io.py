"""CMYK raster pages, the CMYK4 interchange format and the 5-line swath buffer."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

MAGIC = b"CMYK4"
MIN_TRAP_SIZE = 5
SWATH_ROWS = 5
PAD = 2


class RasterError(ValueError):
    pass


class MalformedHeader(RasterError):
    pass


class TruncatedPayload(RasterError):
    pass


class DimensionTooSmall(RasterError):
    pass


class RowWidthMismatch(RasterError):
    pass


class CmykPixel(NamedTuple):
    c: int
    m: int
    y: int
    k: int

    @property
    def is_white(self) -> bool:
        return self.c == 0 and self.m == 0 and self.y == 0 and self.k == 0


WHITE = CmykPixel(0, 0, 0, 0)


@dataclass(frozen=True, eq=False)
class RasterPage:
    """A page of interleaved C, M, Y, K samples, shape ``(height, width, 4)``."""

    data: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.data, dtype=np.uint8)
        if d.ndim != 3 or d.shape[2] != 4:
            raise ValueError(f"page data must be (h, w, 4), got {d.shape}")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @classmethod
    def blank(cls, width: int, height: int) -> "RasterPage":
        return cls(np.zeros((height, width, 4), dtype=np.uint8))

    @classmethod
    def from_planes(cls, c, m, y, k) -> "RasterPage":
        return cls(np.stack([c, m, y, k], axis=-1).astype(np.uint8))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def planes(self) -> tuple[np.ndarray, ...]:
        return tuple(self.data[:, :, p] for p in range(4))

    def pixel(self, x: int, y: int) -> CmykPixel:
        return CmykPixel(*(int(v) for v in self.data[y, x]))

    def __eq__(self, other):
        if not isinstance(other, RasterPage):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def check_trappable(self):
        if self.width < MIN_TRAP_SIZE or self.height < MIN_TRAP_SIZE:
            raise DimensionTooSmall(
                f"page {self.width}x{self.height} is smaller than {MIN_TRAP_SIZE}x{MIN_TRAP_SIZE}"
            )


_HEADER = re.compile(rb"(?P<magic>[A-Z0-9]+)\n(0|[1-9][0-9]*) (0|[1-9][0-9]*)\n255\n")


def parse_header(buf: bytes, magic: bytes) -> tuple[int, int, int]:
    """Return ``(width, height, payload_offset)`` for a CMYK4-style header."""
    m = _HEADER.match(buf)
    if m is None or m.group("magic") != magic:
        raise MalformedHeader(f"expected a {magic.decode()} header")
    width, height = int(m.group(2)), int(m.group(3))
    if width == 0 or height == 0:
        raise MalformedHeader(f"degenerate dimensions {width}x{height}")
    return width, height, m.end()


def format_header(magic: bytes, width: int, height: int) -> bytes:
    return magic + b"\n%d %d\n255\n" % (width, height)


def read_page(buf: bytes) -> RasterPage:
    width, height, off = parse_header(buf, MAGIC)
    n = width * height * 4
    if len(buf) - off < n:
        raise TruncatedPayload(f"expected {n} payload bytes, found {len(buf) - off}")
    if len(buf) - off > n:
        raise MalformedHeader(f"{len(buf) - off - n} trailing bytes after payload")
    data = np.frombuffer(buf, dtype=np.uint8, count=n, offset=off).reshape(height, width, 4)
    return RasterPage(data.copy())


def write_page(page: RasterPage) -> bytes:
    return format_header(MAGIC, page.width, page.height) + page.data.tobytes()


def load_page(path) -> RasterPage:
    with open(path, "rb") as fh:
        return read_page(fh.read())


def save_page(page: RasterPage, path):
    with open(path, "wb") as fh:
        fh.write(write_page(page))


def pad_row(row: np.ndarray) -> np.ndarray:
    """Edge-replicate a ``(width, 4)`` row by two columns on each side."""
    return np.concatenate([row[:1], row[:1], row, row[-1:], row[-1:]], axis=0)


class SwathBuffer:
    """Five consecutive, horizontally padded image rows.

    ``rows[2]`` is the row whose pixels are currently being trapped.  Rows
    above the first and below the last image row are edge replicas.
    """

    def __init__(self, rows: np.ndarray, top_row_index: int):
        if rows.shape[0] != SWATH_ROWS:
            raise ValueError("a swath holds exactly five rows")
        self.rows = rows
        self.top_row_index = top_row_index

    @property
    def width(self) -> int:
        return self.rows.shape[1] - 2 * PAD

    @property
    def nbytes(self) -> int:
        return self.rows.nbytes

    @property
    def center_row_index(self) -> int:
        return self.top_row_index + 2

    @classmethod
    def start(cls, first_rows) -> "SwathBuffer":
        """Prime the buffer with up to three leading rows, centered on row 0."""
        first_rows = list(first_rows)
        if not first_rows:
            raise ValueError("need at least one row")
        width = first_rows[0].shape[0]
        for r in first_rows:
            if r.shape != (width, 4):
                raise RowWidthMismatch(f"row shape {r.shape} != ({width}, 4)")
        rows = np.empty((SWATH_ROWS, width + 2 * PAD, 4), dtype=np.uint8)
        padded = [pad_row(r) for r in first_rows[:3]]
        while len(padded) < 3:
            padded.append(padded[-1])
        rows[0] = rows[1] = rows[2] = padded[0]
        rows[3], rows[4] = padded[1], padded[2]
        return cls(rows, -2)

    def advance(self, next_row: np.ndarray | None) -> "SwathBuffer":
        """Shift up by one row; ``None`` replicates the last row (bottom border)."""
        if next_row is not None and next_row.shape != (self.width, 4):
            raise RowWidthMismatch(f"row shape {next_row.shape} != ({self.width}, 4)")
        self.rows[:-1] = self.rows[1:]
        if next_row is not None:
            self.rows[-1] = pad_row(next_row)
        self.top_row_index += 1
        return self


def swath_advance(buffer: SwathBuffer, next_row: np.ndarray | None) -> SwathBuffer:
    return buffer.advance(next_row)


def iter_swaths(page: RasterPage, start_row: int = 0, stop_row: int | None = None):
    """Yield a SwathBuffer centered on each row in ``[start_row, stop_row)``.

    Only five rows are resident at once; the same buffer object is reused.
    """
    h = page.height
    stop_row = h if stop_row is None else stop_row
    data = page.data

    def row(i):
        return data[min(max(i, 0), h - 1)]

    rows = np.empty((SWATH_ROWS, page.width + 2 * PAD, 4), dtype=np.uint8)
    for j in range(SWATH_ROWS):
        rows[j] = pad_row(row(start_row - 2 + j))
    buf = SwathBuffer(rows, start_row - 2)
    for center in range(start_row, stop_row):
        yield buf
        nxt = center + 3
        buf.advance(data[nxt] if nxt < h else None)
