import numpy as np
import pytest
from hypothesis import given, strategies as st

from colortrap.edge_oracle import EdgeType, OracleConfig, classify
from colortrap.lut_engine import (
    LUT_MAGIC, BadMagic, ChecksumMismatch, TooManyOPixels, VersionMismatch, brute_force_orbits,
    build_lut3d, canonicalize, embed_3x3, load_luts, pattern_3x3, save_luts,
)
from colortrap.window import A, B, O, OUTER, POSITIONS, is_contiguous_run, outer_mask, transform_labels

import oracles


def o_run_window(draw):
    n = draw(st.integers(0, 6))
    start = draw(st.integers(0, 11))
    labels = [A] + [draw(st.sampled_from([A, B])) for _ in range(20)]
    for j in range(n):
        labels[OUTER[(start + j) % 12]] = O
    return tuple(labels)


run_windows = st.composite(lambda draw: o_run_window(draw))()
any_o_windows = st.tuples(st.just(A), *[st.sampled_from([A, B]) for _ in range(8)],
                          *[st.sampled_from([A, B, O]) for _ in range(12)])


def test_lut3_table(luts):
    assert luts.lut3[0] == 0
    assert set(np.unique(luts.lut3)) <= {0, 1}
    for p in range(256):
        assert luts.lut3[p] == (oracles.classify_direct(list(embed_3x3(p))) == 1)


def test_lut3_bit_order():
    # pixel 1 (north) is the LSB, pixel 8 (north-west) the MSB
    lab = [A] * 21
    lab[1] = B
    assert pattern_3x3(lab) == 1
    lab[8] = B
    assert pattern_3x3(lab) == 0x81
    lab[3] = O
    assert pattern_3x3(lab) is None


def test_lut3_vertical_edge(luts):
    west = (1 << 5) | (1 << 6) | (1 << 7)  # positions 6, 7, 8
    assert luts.lut3[west] == 1


def test_embedding_replicates_ring():
    lab = embed_3x3(1 << 6)  # west neighbor only
    assert [i for i in range(21) if lab[i] == B] == [7, 18]


def test_canonical_classes(luts):
    cm = luts.cmap
    assert cm.n_classes == 13
    assert cm.lookup(0).o_class == 0 and cm.lookup(0).transform_id == 0
    singles = {cm.lookup(1 << j).o_class for j in range(12)}
    assert len(singles) == 2
    assert brute_force_orbits(1, contiguous_only=False) == {0: 1, 1: 2}


def test_canonical_map_consistent(luts):
    cm = luts.cmap
    for m in range(4096):
        entry = cm.lookup(m)
        pos = [OUTER[j] for j in range(12) if (m >> j) & 1]
        img = sum(1 << (int(cm.position_maps[entry.transform_id, p]) - 9) for p in pos)
        assert img == entry.canonical_mask
        if entry.o_class is not None:
            assert img == cm.class_mask(entry.o_class)
            assert bin(m).count("1") <= 6 and is_contiguous_run(m)
        else:
            assert bin(m).count("1") > 6 or not is_contiguous_run(m)


def test_lut5_sizes(luts):
    sizes = sorted(t.size for t in luts.lut5)
    assert sum(sizes) == 3_112_960
    assert sizes[-1] == 1 << 20
    assert luts.lut5[0][0] == EdgeType.NON_TRAPPABLE


@given(run_windows)
def test_lut5_equals_oracle(luts, lab):
    assert luts.classify_lut5(lab) == oracles.classify_direct(list(lab))


@given(any_o_windows)
def test_lut5_equals_oracle_any_o(luts, lab):
    assert luts.classify_lut5(lab) == classify(lab)


@given(run_windows, st.integers(0, 7))
def test_canonicalize_orbit_invariant(luts, lab, t):
    e1, i1 = canonicalize(lab, luts.cmap)
    e2, i2 = canonicalize(transform_labels(lab, t), luts.cmap)
    assert e1.o_class == e2.o_class
    # the pattern may differ only when the canonical O set has a nontrivial stabilizer
    assert luts.lut5[e1.o_class][i1] == luts.lut5[e2.o_class][i2]


def test_canonicalize_errors(luts):
    lab = [A] * 21
    lab[2] = O
    with pytest.raises(TooManyOPixels):
        canonicalize(lab, luts.cmap)
    lab = [A] * 9 + [O] * 7 + [A] * 5
    with pytest.raises(TooManyOPixels):
        canonicalize(lab, luts.cmap)


def test_lut3d(luts):
    assert luts.lut3d.shape == (9, 13, 7) and luts.lut3d.nbytes == 819
    assert luts.lut3d[8, 12, 0] == 0


def _triple_trappable_brute(n_ia, n_oa, n_oo):
    """Exhaustive over the triple: O sets are runs (others are non-trappable), B fills the rest."""
    import itertools

    for start in range(12 if n_oo else 1):
        o = {OUTER[(start + j) % 12] for j in range(n_oo)}
        inner_b = 9 - n_ia
        outer_b = 12 - n_oa - n_oo
        outer_free = [p for p in OUTER if p not in o]
        for ib in itertools.combinations(range(1, 9), inner_b):
            for ob in itertools.combinations(outer_free, outer_b):
                lab = [A] * 21
                for p in o:
                    lab[p] = O
                for p in ib + ob:
                    lab[p] = B
                non_a = [i for i in range(1, 21) if lab[i] != A]
                if non_a and lab[non_a[0]] == O:
                    continue
                if oracles.classify_direct(lab):
                    return True
    return False


@pytest.mark.parametrize("triple", [(1, 0, 6), (9, 12, 0), (8, 11, 0), (9, 6, 6), (5, 0, 0), (9, 0, 0), (8, 0, 6)])
def test_lut3d_triples_by_brute_force(luts, triple):
    n_ia, n_oa, n_oo = triple
    assert bool(luts.lut3d[n_ia - 1, n_oa, n_oo]) == _triple_trappable_brute(*triple)


def test_lut3d_other_config():
    t, seen = build_lut3d(OracleConfig(edge2_min_span=3))
    assert seen.sum() > 0 and t.sum() <= seen.sum()


def test_roundtrip(luts):
    buf = save_luts(luts)
    assert buf.startswith(LUT_MAGIC)
    back = load_luts(buf)
    assert save_luts(back) == buf
    assert np.array_equal(back.lut5_flat, luts.lut5_flat)
    assert back.memory() == luts.memory()


def test_corruption_detected(luts):
    buf = bytearray(save_luts(luts))
    with pytest.raises(BadMagic):
        load_luts(b"XRAPLUT1" + bytes(buf[8:]))
    flipped = bytearray(buf)
    flipped[5000] ^= 1
    with pytest.raises(ChecksumMismatch):
        load_luts(bytes(flipped))
    with pytest.raises(ChecksumMismatch):
        load_luts(bytes(buf[:20]))


def test_version_mismatch(luts):
    import struct
    import zlib

    buf = save_luts(luts)
    body = bytearray(buf[8:-4])
    body[0:2] = struct.pack("<H", 99)
    with pytest.raises(VersionMismatch):
        load_luts(LUT_MAGIC + bytes(body) + struct.pack("<I", zlib.crc32(body)))
    body = bytearray(buf[8:-4])
    body[2] ^= 0xFF  # stored config hash
    with pytest.raises(VersionMismatch):
        load_luts(LUT_MAGIC + bytes(body) + struct.pack("<I", zlib.crc32(body)))


def test_memory_budget(luts):
    mem = luts.memory()
    assert mem["algorithm1"] == 3810 <= 4096
    assert 2_300_000 <= mem["lut5_family"] <= 3_900_000
    assert mem["lut3d"] <= 8192


def test_rebuild_is_byte_identical(luts):
    from colortrap.lut_engine import build_luts

    assert save_luts(build_luts()) == save_luts(luts)


def test_hybrid_classifier_edge_type(luts):
    assert luts.classify_hybrid(tuple(A if x >= 0 else B for x, _ in POSITIONS)) == EdgeType.EDGE1
    lab = [A] * 21
    for p in (17, 18, 19):
        lab[p] = B
    assert luts.classify_hybrid(lab) == EdgeType.EDGE2
    assert outer_mask(lab, B) == 0b111 << 8
