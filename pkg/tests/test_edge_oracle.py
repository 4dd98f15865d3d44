import numpy as np
import pytest
from hypothesis import given, strategies as st

from colortrap.edge_oracle import (
    EdgeType, OracleConfig, Prescreen, classify, classify_many, extract_features, prescreen,
)
from colortrap.raster_io import CmykPixel
from colortrap.window import A, B, O, OUTER, PERMS, POSITIONS, transform_labels

import oracles

RED = CmykPixel(0, 255, 255, 0)

outer_lab = st.sampled_from([A, A, B, B, O])
windows = st.tuples(st.just(A), *[st.sampled_from([A, B, B, O]) for _ in range(8)], *[outer_lab] * 12)


def from_set(b=(), o=()):
    lab = [A] * 21
    for i in b:
        lab[i] = B
    for i in o:
        lab[i] = O
    return tuple(lab)


def half_plane(pred):
    return from_set(b=[i for i, (x, y) in enumerate(POSITIONS) if pred(x, y)])


def test_position_table_matches_independent_copy():
    assert list(POSITIONS) == oracles.POS
    for t in range(8):
        lab = tuple(range(21))
        assert transform_labels(lab, t) == tuple(oracles.transform(list(lab), t))
        assert sorted(PERMS[t]) == list(range(21))


def test_edge1_half_plane():
    assert classify(half_plane(lambda x, y: x < 0)) == EdgeType.EDGE1


def test_edge2_outer_side():
    assert classify(from_set(b=[17, 18, 19])) == EdgeType.EDGE2
    assert classify(half_plane(lambda x, y: x == -2)) == EdgeType.EDGE2


def test_isolated_outer_b_not_trappable():
    assert classify(from_set(b=[9])) == EdgeType.NON_TRAPPABLE


def test_diagonal_b_reaching_outer_is_edge1():
    assert classify(from_set(b=[8, 20])) == EdgeType.EDGE1


def test_inner_b_not_reaching_outer():
    # a lone inner B can only occur away from replicated borders; it is noise, not an edge
    assert classify(from_set(b=[1])) == EdgeType.NON_TRAPPABLE


def test_o_rules():
    assert classify(from_set(b=[6, 7, 8], o=[1])) == EdgeType.NON_TRAPPABLE
    run7 = [9, 10, 11, 12, 13, 14, 15]
    assert classify(from_set(b=[7, 18], o=run7)) == EdgeType.NON_TRAPPABLE
    assert classify(from_set(b=[7, 18], o=run7[:6])) == EdgeType.EDGE1
    # two separate O runs
    assert classify(from_set(b=[7, 18], o=[9, 12])) == EdgeType.NON_TRAPPABLE


def test_edge2_threshold_configurable():
    w = from_set(b=[17, 18])
    assert classify(w) == EdgeType.EDGE2
    assert classify(w, OracleConfig(edge2_min_span=3)) == EdgeType.NON_TRAPPABLE


def test_features():
    assert extract_features((A,) * 21) == (9, 12, 0)
    assert extract_features(half_plane(lambda x, y: x + y < 0)) == (6, 6, 0)
    assert extract_features(from_set(o=OUTER[:7])).n_oo == 7


@given(windows)
def test_matches_scipy_oracle(lab):
    assert int(classify(lab)) == oracles.classify_direct(list(lab))


@given(windows, st.sampled_from([2, 3]), st.integers(0, 7))
def test_matches_scipy_oracle_other_configs(lab, span, max_o):
    assert int(classify(lab, OracleConfig(span, max_o))) == oracles.classify_direct(list(lab), span, max_o)


@given(windows)
def test_dihedral_invariance(lab):
    e = classify(lab)
    for t in range(8):
        assert classify(transform_labels(lab, t)) == e


@given(windows, st.booleans())
def test_prescreen_sound(lab, white):
    center = CmykPixel(0, 0, 0, 0) if white else RED
    if prescreen(lab, center) == Prescreen.NON_TRAPPABLE and not white:
        assert classify(lab) == EdgeType.NON_TRAPPABLE


def test_prescreen_rules():
    assert prescreen((A,) * 21, CmykPixel(0, 0, 0, 0)) == Prescreen.NON_TRAPPABLE
    assert prescreen((A,) * 21, RED) == Prescreen.NON_TRAPPABLE
    assert prescreen(from_set(b=[7, 18], o=OUTER[:7]), RED) == Prescreen.NON_TRAPPABLE
    assert prescreen(from_set(b=[7], o=[3]), RED) == Prescreen.NON_TRAPPABLE
    assert prescreen(from_set(b=[7, 18]), RED) == Prescreen.NEEDS_CLASSIFICATION


@given(windows)
def test_feature_consistency(lab):
    f = extract_features(lab)
    assert f.n_ia >= 1
    assert f.n_ia + sum(lab[i] == B for i in range(1, 9)) + sum(lab[i] == O for i in range(1, 9)) == 9
    assert f.n_oa + f.n_oo + sum(lab[i] == B for i in OUTER) == 12


@given(st.lists(windows, min_size=1, max_size=50))
def test_batch_matches_single(rows):
    got = classify_many(np.array(rows, dtype=np.int8))
    assert list(got) == [int(classify(r)) for r in rows]


def test_classify_accepts_labeled_window():
    from colortrap.categorize import ToleranceParams, TruncatedPixel, label_window

    red, k = TruncatedPixel(0, 31, 0), TruncatedPixel(0, 0, 31)
    lw = label_window([red if x < 0 else k for x, _ in POSITIONS], ToleranceParams())
    assert classify(lw) == EdgeType.EDGE1
