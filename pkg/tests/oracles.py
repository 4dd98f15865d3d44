"""Independent re-derivations used to check the package.

Written from the rule descriptions only, on different data structures
(5x5 grids and scipy labeling instead of bitmasks), so a shared bug is
unlikely.
"""

from fractions import Fraction

import numpy as np
from scipy import ndimage

A, B, O = 0, 1, 2

# offsets of the 21 window positions, center then inner ring then outer ring,
# each ring clockwise from north
POS = [(0, 0), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1),
       (0, -2), (1, -2), (2, -1), (2, 0), (2, 1), (1, 2), (0, 2), (-1, 2), (-2, 1),
       (-2, 0), (-2, -1), (-1, -2)]


def k_tol_direct(k5, a_tol=24):
    if k5 <= 15:
        return a_tol
    v = Fraction(a_tol) + Fraction(a_tol * (k5 - 15), 16)
    return int(v + Fraction(1, 2))  # round half up, all halves are positive


def lo_direct(x, tol):
    return min(max(x - tol, 0), 255 - 2 * tol)


def hi_direct(x, tol):
    return max(min(x + tol, 255), 2 * tol)


def mid(x5):
    return x5 * 8 + 4


def in_box(p, center, tols):
    return all(lo_direct(mid(c), t) <= mid(v) <= hi_direct(mid(c), t) for v, c, t in zip(p, center, tols))


def label_direct(window5, a_tol=24, curve=None):
    """A/B/O labels for 21 truncated (c5, m5, k5) pixels."""
    kt = (curve or [k_tol_direct(k, a_tol) for k in range(32)])[window5[0][2]]
    bt = max(a_tol, kt)
    labels = [A] * 21
    first_b = None
    for i in range(1, 21):
        p = window5[i]
        if in_box(p, window5[0], (bt, bt, a_tol)):
            continue
        if first_b is None:
            first_b = p
            labels[i] = B
        elif in_box(p, first_b, (bt, bt, bt)):
            labels[i] = B
        else:
            labels[i] = O
    return labels


def to_grid(labels):
    g = np.full((5, 5), -1, dtype=int)
    for (dx, dy), lab in zip(POS, labels):
        g[dy + 2, dx + 2] = lab
    return g


_ORDER = [(0, -2), (1, -2), (2, -1), (2, 0), (2, 1), (1, 2), (0, 2), (-1, 2), (-2, 1), (-2, 0), (-2, -1), (-1, -2)]


def classify_direct(labels, span=2, max_o=6):
    """Rule set on a 5x5 grid with scipy connected-component labeling."""
    g = to_grid(labels)
    inner = [(dy + 2, dx + 2) for dx, dy in POS[1:9]]
    outer = [(dy + 2, dx + 2) for dx, dy in POS[9:]]
    if any(g[p] == O for p in inner):
        return 0
    ring = [g[dy + 2, dx + 2] == O for dx, dy in _ORDER]
    if sum(ring) > max_o:
        return 0
    # O run check: count rising edges around the cycle
    if 0 < sum(ring) < 12 and sum(1 for j in range(12) if ring[j] and not ring[j - 1]) != 1:
        return 0
    comps, _ = ndimage.label(g == B, structure=np.ones((3, 3), int))
    touching = {comps[p] for p in outer if comps[p]}
    if any(comps[p] in touching for p in inner if comps[p]):
        return 1
    if any(g[p] == B for p in [(1, 2), (2, 3), (3, 2), (2, 1)]):
        return 0
    for c in touching:
        if sum(1 for p in outer if comps[p] == c) >= span:
            return 2
    return 0


def transform(labels, t):
    """Apply one of the 8 dihedral maps to a label window (same numbering as POS)."""
    maps = [lambda x, y: (x, y), lambda x, y: (-y, x), lambda x, y: (-x, -y), lambda x, y: (y, -x),
            lambda x, y: (-x, y), lambda x, y: (x, -y), lambda x, y: (y, x), lambda x, y: (-y, -x)]
    f = maps[t]
    out = [0] * 21
    for i, (x, y) in enumerate(POS):
        out[POS.index(f(x, y))] = labels[i]
    return out
