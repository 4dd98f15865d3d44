import numpy as np
import pytest
from hypothesis import given, strategies as st

from colortrap.raster_io import (
    PAD, CmykPixel, DimensionTooSmall, MalformedHeader, RasterPage, RowWidthMismatch,
    SwathBuffer, TruncatedPayload, iter_swaths, load_page, read_page, save_page, write_page,
)


def test_header_layout():
    page = RasterPage.blank(3, 2)
    buf = write_page(page)
    assert buf.startswith(b"CMYK4\n3 2\n255\n")
    assert len(buf) == len(b"CMYK4\n3 2\n255\n") + 3 * 2 * 4


def test_roundtrip_file(tmp_path, rng):
    page = RasterPage(rng.integers(0, 256, (7, 9, 4), dtype=np.uint8))
    save_page(page, tmp_path / "p.cmyk")
    assert load_page(tmp_path / "p.cmyk") == page


@given(st.integers(1, 12), st.integers(1, 12), st.data())
def test_roundtrip_property(w, h, data):
    raw = data.draw(st.binary(min_size=w * h * 4, max_size=w * h * 4))
    page = RasterPage(np.frombuffer(raw, dtype=np.uint8).reshape(h, w, 4))
    assert read_page(write_page(page)) == page


@pytest.mark.parametrize("buf", [
    b"CMYK5\n2 2\n255\n" + bytes(16),
    b"CMYK4\n2 2\n256\n" + bytes(16),
    b"CMYK4\n0 2\n255\n",
    b"CMYK4\n02 2\n255\n" + bytes(16),
    b"CMYK4 2 2 255\n" + bytes(16),
    b"",
])
def test_malformed_header(buf):
    with pytest.raises(MalformedHeader):
        read_page(buf)


def test_truncated_and_trailing():
    good = write_page(RasterPage.blank(2, 2))
    with pytest.raises(TruncatedPayload):
        read_page(good[:-1])
    with pytest.raises(MalformedHeader):
        read_page(good + b"\0")


def test_page_is_read_only_and_pixel_access():
    page = RasterPage.from_planes(*(np.full((2, 3), v, np.uint8) for v in (1, 2, 3, 4)))
    assert page.pixel(2, 1) == CmykPixel(1, 2, 3, 4)
    assert not page.data.flags.writeable
    assert CmykPixel(0, 0, 0, 0).is_white and not page.pixel(0, 0).is_white


def test_bad_shape_rejected():
    with pytest.raises(ValueError):
        RasterPage(np.zeros((3, 3, 3), np.uint8))


@pytest.mark.parametrize("w,h", [(4, 10), (10, 4), (1, 1)])
def test_too_small_for_trapping(w, h):
    with pytest.raises(DimensionTooSmall):
        RasterPage.blank(w, h).check_trappable()
    RasterPage.blank(5, 5).check_trappable()


def _replicated(data, cy):
    h, w = data.shape[:2]
    ys = np.clip(np.arange(cy - 2, cy + 3), 0, h - 1)
    xs = np.clip(np.arange(-PAD, w + PAD), 0, w - 1)
    return data[np.ix_(ys, xs)]


@pytest.mark.parametrize("h", [1, 2, 3, 6])
def test_iter_swaths_matches_edge_replication(rng, h):
    data = rng.integers(0, 256, (h, 5, 4), dtype=np.uint8)
    page = RasterPage(data)
    n = 0
    for cy, buf in enumerate(iter_swaths(page)):
        assert buf.center_row_index == cy
        assert np.array_equal(buf.rows, _replicated(data, cy))
        assert buf.nbytes == 5 * (5 + 2 * PAD) * 4
        n += 1
    assert n == h


def test_swath_start_and_advance(rng):
    data = rng.integers(0, 256, (6, 7, 4), dtype=np.uint8)
    buf = SwathBuffer.start(data[:3])
    assert np.array_equal(buf.rows, _replicated(data, 0))
    for cy in range(1, 6):
        nxt = cy + 2
        buf.advance(data[nxt] if nxt < 6 else None)
        assert np.array_equal(buf.rows, _replicated(data, cy))


def test_swath_row_width_checked(rng):
    buf = SwathBuffer.start([np.zeros((5, 4), np.uint8)])
    with pytest.raises(RowWidthMismatch):
        buf.advance(np.zeros((6, 4), np.uint8))
    with pytest.raises(RowWidthMismatch):
        SwathBuffer.start([np.zeros((5, 4), np.uint8), np.zeros((4, 4), np.uint8)])
