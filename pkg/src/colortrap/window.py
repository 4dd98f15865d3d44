"""Geometry of the 5x5 trapping window.

Positions are numbered 0..20: 0 is the center, 1..8 the inner ring and
9..20 the outer ring, both rings running clockwise from north.  The four
5x5 corners are not part of the window.

    .  20   9  10   .
   19   8   1   2  11
   18   7   0   3  12
   17   6   5   4  13
    .  16  15  14   .
"""

import numpy as np

A, B, O = 0, 1, 2

POSITIONS = (
    (0, 0),
    (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1),
    (0, -2), (1, -2), (2, -1), (2, 0), (2, 1), (1, 2),
    (0, 2), (-1, 2), (-2, 1), (-2, 0), (-2, -1), (-1, -2),
)
N_POS = 21
INNER = tuple(range(1, 9))
OUTER = tuple(range(9, 21))
FOUR_NEIGHBORS = (1, 3, 5, 7)

DX = np.array([p[0] for p in POSITIONS], dtype=np.int64)
DY = np.array([p[1] for p in POSITIONS], dtype=np.int64)

_INDEX = {p: i for i, p in enumerate(POSITIONS)}

# (dx, dy) -> image of the offset; index 0 is the identity.
TRANSFORMS = (
    lambda x, y: (x, y),
    lambda x, y: (-y, x),
    lambda x, y: (-x, -y),
    lambda x, y: (y, -x),
    lambda x, y: (-x, y),
    lambda x, y: (x, -y),
    lambda x, y: (y, x),
    lambda x, y: (-y, -x),
)
N_TRANSFORMS = len(TRANSFORMS)


def _build_perms():
    perms = np.zeros((N_TRANSFORMS, N_POS), dtype=np.uint8)
    for t, f in enumerate(TRANSFORMS):
        for i, (x, y) in enumerate(POSITIONS):
            perms[t, i] = _INDEX[f(x, y)]
    return perms


# PERMS[t, i]: where the label at position i lands under transform t.
PERMS = _build_perms()


def _build_adjacency():
    nbrs = np.full((N_POS, 8), -1, dtype=np.int64)
    counts = np.zeros(N_POS, dtype=np.int64)
    for i, (x, y) in enumerate(POSITIONS):
        for j, (u, v) in enumerate(POSITIONS):
            if i != j and max(abs(x - u), abs(y - v)) == 1:
                nbrs[i, counts[i]] = j
                counts[i] += 1
    return nbrs, counts


# 8-connectivity restricted to the 21 window positions.
NEIGHBORS, NEIGHBOR_COUNTS = _build_adjacency()


def transform_labels(labels, t):
    """Return the label window moved by dihedral transform ``t``."""
    out = [0] * N_POS
    for i, lab in enumerate(labels):
        out[PERMS[t, i]] = lab
    return tuple(out)


def outer_mask(labels, value=O):
    """12-bit mask of outer-ring positions holding ``value`` (bit 0 = position 9)."""
    m = 0
    for j, pos in enumerate(OUTER):
        if labels[pos] == value:
            m |= 1 << j
    return m


def is_contiguous_run(mask):
    """True if the set bits of a 12-bit outer-ring mask form one cyclic run."""
    if mask == 0 or mask == 0xFFF:
        return True
    starts = 0
    for j in range(12):
        if (mask >> j) & 1 and not (mask >> ((j - 1) % 12)) & 1:
            starts += 1
    return starts == 1


def window_from_grid(grid):
    """Pick the 21 window samples out of a 5x5 grid indexed ``grid[dy+2][dx+2]``."""
    return tuple(grid[y + 2][x + 2] for x, y in POSITIONS)
