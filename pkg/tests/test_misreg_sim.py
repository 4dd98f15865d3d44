import numpy as np
import pytest
from hypothesis import given, strategies as st

from colortrap.corpus_gen import PageRecipe, generate
from colortrap.misreg_sim import (
    ArtifactConfig, PlaneShift, RegionMap, RegionMapMismatch, ShiftTooLarge, gap_mask, halo_mask,
    load_region_map, measure_artifacts, read_region_map, save_region_map, shift_plane, shift_sweep,
    shifts_1px, shifts_2px, write_region_map,
)
from colortrap.raster_io import MalformedHeader, RasterPage, TruncatedPayload
from colortrap.trapper import run_algorithm

K, M, RED = (0, 0, 0, 255), (0, 255, 0, 0), (0, 255, 255, 0)


def black_on_magenta():
    data = np.zeros((24, 24, 4), np.uint8)
    ids = np.zeros((24, 24), np.uint8)
    data[4:20, 4:20] = M
    ids[4:20, 4:20] = 1
    data[8:16, 10:13] = K
    ids[8:16, 10:13] = 2
    return RasterPage(data), RegionMap(ids, {1: M, 2: K})


def red_on_white():
    data = np.zeros((20, 20, 4), np.uint8)
    ids = np.zeros((20, 20), np.uint8)
    data[6:14, 6:14] = RED
    ids[6:14, 6:14] = 1
    return RasterPage(data), RegionMap(ids, {1: RED})


def test_shift_protocols():
    assert len(shifts_1px()) == 8 and (0, 0) not in shifts_1px()
    s2 = shifts_2px()
    assert len(s2) == 12 and (2, 0) in s2 and (-1, -1) in s2 and (2, 1) not in s2


def test_shift_bounds():
    with pytest.raises(ShiftTooLarge):
        PlaneShift("K", 3, 0)
    with pytest.raises(ShiftTooLarge):
        PlaneShift("K", 0, -3)
    with pytest.raises(ValueError):
        PlaneShift("R", 0, 0)


@given(st.sampled_from("CMYK"), st.integers(-2, 2), st.integers(-2, 2), st.integers(0, 2**31))
def test_shift_translates_one_plane(plane, dx, dy, seed):
    rng = np.random.default_rng(seed)
    page = RasterPage(rng.integers(0, 256, (9, 11, 4), dtype=np.uint8))
    s = PlaneShift(plane, dx, dy)
    out = shift_plane(page, s).data
    p = s.index
    others = [q for q in range(4) if q != p]
    assert np.array_equal(out[:, :, others], page.data[:, :, others])
    for y in range(9):
        for x in range(11):
            sy, sx = y - dy, x - dx
            want = page.data[sy, sx, p] if 0 <= sy < 9 and 0 <= sx < 11 else 0
            assert out[y, x, p] == want
    back = shift_plane(RasterPage(out), PlaneShift(plane, -dx, -dy)).data
    assert np.array_equal(back[2:-2, 2:-2], page.data[2:-2, 2:-2])


def test_zero_shift_identity():
    page, _ = black_on_magenta()
    assert shift_plane(page, PlaneShift("K", 0, 0)) == page


def test_k_shift_opens_gap_column():
    page, rm = black_on_magenta()
    shifted = shift_plane(page, PlaneShift("K", 1, 0))
    assert (shifted.data[8:16, 10] == 0).all()  # left stroke edge turned white
    g = gap_mask(shifted, rm)
    assert g[8:16, 10].all() and g.sum() == 8
    assert measure_artifacts(page, rm) == (0, 0)


def test_trapping_closes_the_gap(luts):
    page, rm = black_on_magenta()
    trapped, _, _ = run_algorithm(page, "lut3", "dep", luts)
    for (dx, dy) in shifts_1px():
        for pl in "CMYK":
            assert measure_artifacts(shift_plane(trapped, PlaneShift(pl, dx, dy)), rm) == (0, 0)


def test_yellow_halo_both_sides(luts):
    page, rm = red_on_white()
    halo = halo_mask(shift_plane(page, PlaneShift("Y", 1, 0)), rm)
    assert halo[6:14, 14].all()  # yellow spilled into the background
    assert not halo[6:14, 6].any()  # the magenta left behind is the outline color
    assert halo.sum() == 8
    trapped, _, _ = run_algorithm(page, "lut5", "dep", luts)
    res = shift_sweep(trapped, rm, shifts_2px())
    assert all(m == (0, 0) for m in res.values())


def test_metric_thresholds_configurable():
    page, rm = black_on_magenta()
    shifted = shift_plane(page, PlaneShift("K", 1, 0))
    assert gap_mask(shifted, rm, ArtifactConfig(reach=0)).sum() == 0


def test_region_map_roundtrip(tmp_path):
    _, rm = black_on_magenta()
    buf = write_region_map(rm)
    assert buf.startswith(b"RGNMAP1\n24 24\n255\n")
    assert read_region_map(buf, rm.palette) == rm
    save_region_map(rm, tmp_path / "a.rgn")
    assert load_region_map(tmp_path / "a.rgn") == rm
    with pytest.raises(TruncatedPayload):
        read_region_map(buf[:-1])
    with pytest.raises(MalformedHeader):
        read_region_map(b"CMYK4" + buf[7:])


def test_region_map_mismatch():
    page, _ = black_on_magenta()
    _, small = red_on_white()
    with pytest.raises(RegionMapMismatch):
        measure_artifacts(page, small)
    assert not small.consistent_with(page)


@pytest.mark.parametrize("kind", ["text", "graphic", "mixed", "flat"])
def test_unshifted_generated_pages_are_clean(kind):
    page, rm = generate(PageRecipe(kind, 128, 128, seed=3))
    assert rm.consistent_with(page)
    assert measure_artifacts(page, rm) == (0, 0)
