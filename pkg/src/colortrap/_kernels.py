"""Per-row scan kernels for the four trapping algorithms.

Each kernel traps the center row of a padded 5-row swath ``sw`` of shape
``(5, width + 4, 4)`` into ``out`` and writes the per-pixel edge class to
``cls``.  ``kb`` holds the packed truncated color of every swath pixel
(``c5 | m5 << 6 | k5 << 12``), filled once as a row enters the swath.
Operation counters are accumulated into ``ctr``:

    0 ifs, 1 adds, 2 muls, 3 trapped pixels, 4 prescreen rejections,
    5 ifs, 6 adds, 7 muls spent on trapped pixels.

The LUT kernels use shifts, adds and table reads only.  Box membership is
tested on all three planes at once: with a guard bit above each 5-bit
field, ``(P | G) - L`` keeps a field's guard iff ``x >= lo`` and
``(H | G) - P`` keeps it iff ``x <= hi``.  The reference kernel evaluates
the tolerance, density and interpolation formulas directly.
"""

import numba
import numpy as np

from .window import DX, DY

NCTR = 8
GUARD = (1 << 5) | (1 << 11) | (1 << 17)

_JIT = dict(cache=True, nogil=True)


@numba.njit(inline="always", **_JIT)
def pack_key(c, m, k):
    return (np.int64(c) >> 3) | ((np.int64(m) >> 3) << 6) | ((np.int64(k) >> 3) << 12)


@numba.njit(inline="always", **_JIT)
def _lo5(lo):
    # smallest x5 whose bucket midpoint 8*x5+4 is >= lo
    return (np.int64(lo) + 3) >> 3


@numba.njit(inline="always", **_JIT)
def _hi5(hi):
    return (np.int64(hi) - 4) >> 3


@numba.njit(inline="always", **_JIT)
def _inside(p, lo, hig):
    return ((((p | GUARD) - lo) & (hig - p)) & GUARD) == GUARD


@numba.njit(inline="always", **_JIT)
def _vol_a(p0, x_lo, x_hi, ak_lo, ak_hi):
    c5 = p0 & 31
    m5 = (p0 >> 6) & 31
    k5 = p0 >> 12
    lo = _lo5(x_lo[k5, c5]) | (_lo5(x_lo[k5, m5]) << 6) | (_lo5(ak_lo[k5]) << 12)
    hi = _hi5(x_hi[k5, c5]) | (_hi5(x_hi[k5, m5]) << 6) | (_hi5(ak_hi[k5]) << 12)
    return lo, hi | GUARD


@numba.njit(inline="always", **_JIT)
def _vol_b(pb, ka, x_lo, x_hi):
    c5 = pb & 31
    m5 = (pb >> 6) & 31
    k5 = pb >> 12
    lo = _lo5(x_lo[ka, c5]) | (_lo5(x_lo[ka, m5]) << 6) | (_lo5(x_lo[ka, k5]) << 12)
    hi = _hi5(x_hi[ka, c5]) | (_hi5(x_hi[ka, m5]) << 6) | (_hi5(x_hi[ka, k5]) << 12)
    return lo, hi | GUARD


@numba.njit(**_JIT)
def uniform_runs(kb, r0, r1, runs):
    """runs[j]: consecutive columns ending at j whose rows r0..r1-1 share one truncated color."""
    ifs = 0
    prev = np.int64(-1)
    n = 0
    for j in range(kb.shape[1]):
        key = np.int64(kb[r0, j])
        for r in range(r0 + 1, r1):
            ifs += 1
            if kb[r, j] != key:
                key = -1
                break
        ifs += 1
        if key >= 0 and key == prev:
            n += 1
        elif key >= 0:
            n = 1
        else:
            n = 0
        prev = key
        runs[j] = n
    return ifs


@numba.njit(inline="always", **_JIT)
def _wsum(v0, v1, v2, v3, shift_tab):
    s = np.int64(0)
    terms = 0
    for j in range(5):
        b = shift_tab[0, j]
        if b < 0:
            break
        s += np.int64(v0) << b
        terms += 1
    for j in range(5):
        b = shift_tab[1, j]
        if b < 0:
            break
        s += np.int64(v1) << b
        terms += 1
    for j in range(5):
        b = shift_tab[2, j]
        if b < 0:
            break
        s += np.int64(v2) << b
        terms += 1
    for j in range(5):
        b = shift_tab[3, j]
        if b < 0:
            break
        s += np.int64(v3) << b
        terms += 1
    return s, terms


@numba.njit(inline="always", **_JIT)
def _q(s):
    x = s << 1
    q = (x + 1 + (x >> 8)) >> 8
    return min(q, np.int64(31))


@numba.njit(**_JIT)
def _plane_product(v, p, shift_tab):
    s = np.int64(0)
    for j in range(5):
        b = shift_tab[p, j]
        if b < 0:
            break
        s += np.int64(v) << b
    return s


@numba.njit(**_JIT)
def trap_lut(sw, x, px, bpy, bpx, etype, shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend, out):
    """Density, trap parameters and final value from tables.  Returns (ifs, adds, trapped)."""
    ifs = 0
    c0 = np.int64(sw[2, px, 0])
    c1 = np.int64(sw[2, px, 1])
    c2 = np.int64(sw[2, px, 2])
    c3 = np.int64(sw[2, px, 3])
    n0 = np.int64(sw[bpy, bpx, 0])
    n1 = np.int64(sw[bpy, bpx, 1])
    n2 = np.int64(sw[bpy, bpx, 2])
    n3 = np.int64(sw[bpy, bpx, 3])
    s_c, terms_c = _wsum(c0, c1, c2, c3, shift_tab)
    s_o, terms_o = _wsum(n0, n1, n2, n3, shift_tab)
    adds = terms_c + terms_o + 5
    dq = abs(_q(s_c) - _q(s_o))
    ifs += 1
    if trap_tab[dq] < edge_tab[etype]:
        return ifs, adds, False
    ifs += 1
    if s_c <= s_o:
        return ifs, adds, False
    a8 = np.int64(ovrd_tab[dq]) - 4
    adds += 1
    ifs += 1
    if (n0 | n1 | n2 | n3) == 0:
        best = np.int64(-1)
        dom = 0
        for r in range(4):
            p = prio[r]
            v = _plane_product(sw[2, px, p], p, shift_tab)
            adds += 1
            ifs += 1
            if v > best:
                best = v
                dom = p
        for p in range(4):
            cp = np.int64(sw[2, px, p])
            ifs += 1
            if p != dom and cp > 0:
                out[x, p] = cp - blend[a8, cp]
                adds += 1
    else:
        nb = (n0, n1, n2, n3)
        for p in range(4):
            cp = np.int64(sw[2, px, p])
            np_ = nb[p]
            ifs += 1
            if np_ > cp:
                out[x, p] = cp + blend[a8, np_ - cp]
                adds += 2
    return ifs, adds, True


@numba.njit(inline="always", **_JIT)
def _copy_center(sw, px, out, x):
    for p in range(4):
        out[x, p] = sw[2, px, p]


@numba.njit(inline="always", **_JIT)
def _is_white(sw, px):
    return (sw[2, px, 0] | sw[2, px, 1] | sw[2, px, 2] | sw[2, px, 3]) == 0


# --- Algorithm 1 -------------------------------------------------------------

@numba.njit(**_JIT)
def row_lut3(sw, kb, out, cls, ctr, dep, runs, x_lo, x_hi, ak_lo, ak_hi, lut3,
             shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend):
    width = out.shape[0]
    s_ifs = np.int64(0); s_adds = np.int64(0); s_trap = np.int64(0)
    t_ifs = np.int64(0); t_adds = np.int64(0)
    if dep:
        s_ifs += uniform_runs(kb, 1, 4, runs)
    prev = np.int64(-1)
    lo_a = hi_a = np.int64(0)
    for x in range(width):
        px = x + 2
        _copy_center(sw, px, out, x)
        cls[x] = 0
        ifs = 1
        adds = 0
        if _is_white(sw, px):
            s_ifs += ifs
            continue
        if dep:
            ifs += 1
            if runs[px + 1] >= 3:
                s_ifs += ifs
                continue
        p0 = np.int64(kb[2, px])
        ka = p0 >> 12
        fresh = True
        if dep:
            ifs += 1
            fresh = p0 != prev
        if fresh:
            lo_a, hi_a = _vol_a(p0, x_lo, x_hi, ak_lo, ak_hi)
            adds += 6
            prev = p0
        pattern = 0
        has_b = False
        lo_b = hi_b = np.int64(0)
        bi = 0
        inner_o = False
        for i in range(1, 9):
            p = np.int64(kb[2 + DY[i], px + DX[i]])
            adds += 2
            ifs += 1
            if _inside(p, lo_a, hi_a):
                continue
            ifs += 1
            if not has_b:
                has_b = True
                bi = i
                lo_b, hi_b = _vol_b(p, ka, x_lo, x_hi)
                adds += 6
                pattern |= 1 << (i - 1)
                continue
            adds += 2
            ifs += 1
            if _inside(p, lo_b, hi_b):
                pattern |= 1 << (i - 1)
            else:
                inner_o = True
                break
        ifs += 1
        if inner_o or lut3[pattern] == 0:
            s_ifs += ifs; s_adds += adds
            continue
        cls[x] = 1
        i2, a2, trapped = trap_lut(sw, x, px, 2 + DY[bi], px + DX[bi], 1, shift_tab, prio,
                                   trap_tab, ovrd_tab, edge_tab, blend, out)
        s_ifs += ifs + i2; s_adds += adds + a2
        if trapped:
            s_trap += 1; t_ifs += ifs + i2; t_adds += adds + a2
    ctr[0] += s_ifs; ctr[1] += s_adds; ctr[3] += s_trap
    ctr[5] += t_ifs; ctr[6] += t_adds


# --- shared 5x5 labeling -------------------------------------------------------

@numba.njit(inline="always", **_JIT)
def _label5(kb, px, ka, lo_a, hi_a, x_lo, x_hi):
    """Branchy 5x5 labeling with early exit on an inner O.

    Returns (bm, om, bi, inner_o, ifs, adds).
    """
    ifs = 0
    adds = 0
    bm = np.int64(0)
    om = np.int64(0)
    has_b = False
    lo_b = hi_b = np.int64(0)
    bi = 0
    for i in range(1, 21):
        p = np.int64(kb[2 + DY[i], px + DX[i]])
        adds += 2
        ifs += 1
        if _inside(p, lo_a, hi_a):
            continue
        ifs += 1
        if not has_b:
            has_b = True
            bi = i
            lo_b, hi_b = _vol_b(p, ka, x_lo, x_hi)
            adds += 6
            bm |= np.int64(1) << i
            continue
        adds += 2
        ifs += 1
        if _inside(p, lo_b, hi_b):
            bm |= np.int64(1) << i
        else:
            om |= np.int64(1) << i
            ifs += 1
            if i <= 8:
                return bm, om, bi, True, ifs, adds
    return bm, om, bi, False, ifs, adds


# --- Algorithm 2 -------------------------------------------------------------

@numba.njit(**_JIT)
def row_lut5(sw, kb, out, cls, ctr, dep, runs, x_lo, x_hi, ak_lo, ak_hi,
             cm_transform, cm_class, perms, rank, lut5_flat, lut5_off,
             shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend):
    width = out.shape[0]
    s_ifs = np.int64(0); s_adds = np.int64(0); s_trap = np.int64(0)
    t_ifs = np.int64(0); t_adds = np.int64(0)
    if dep:
        s_ifs += uniform_runs(kb, 0, 5, runs)
    prev = np.int64(-1)
    lo_a = hi_a = np.int64(0)
    for x in range(width):
        px = x + 2
        _copy_center(sw, px, out, x)
        cls[x] = 0
        ifs = 1
        adds = 0
        if _is_white(sw, px):
            s_ifs += ifs
            continue
        if dep:
            ifs += 1
            if runs[px + 2] >= 5:
                s_ifs += ifs
                continue
        p0 = np.int64(kb[2, px])
        ka = p0 >> 12
        fresh = True
        if dep:
            ifs += 1
            fresh = p0 != prev
        if fresh:
            lo_a, hi_a = _vol_a(p0, x_lo, x_hi, ak_lo, ak_hi)
            adds += 6
            prev = p0
        bm, om, bi, inner_o, li, la = _label5(kb, px, ka, lo_a, hi_a, x_lo, x_hi)
        ifs += li + 1
        adds += la
        if inner_o:
            s_ifs += ifs; s_adds += adds
            continue
        m12 = (om >> 9) & 0xFFF
        ci = np.int64(cm_class[m12])
        ifs += 1
        if ci == 255:
            s_ifs += ifs; s_adds += adds
            continue
        t = cm_transform[m12]
        idx = np.int64(0)
        for i in range(1, 21):
            idx |= ((bm >> i) & 1) << rank[ci, perms[t, i]]
        adds += 21
        e = np.int64(lut5_flat[lut5_off[ci] + idx])
        ifs += 1
        if e == 0:
            s_ifs += ifs; s_adds += adds
            continue
        cls[x] = e
        i2, a2, trapped = trap_lut(sw, x, px, 2 + DY[bi], px + DX[bi], e, shift_tab, prio,
                                   trap_tab, ovrd_tab, edge_tab, blend, out)
        s_ifs += ifs + i2; s_adds += adds + a2
        if trapped:
            s_trap += 1; t_ifs += ifs + i2; t_adds += adds + a2
    ctr[0] += s_ifs; ctr[1] += s_adds; ctr[3] += s_trap
    ctr[5] += t_ifs; ctr[6] += t_adds


# --- Algorithm 3 -------------------------------------------------------------

@numba.njit(**_JIT)
def row_hybrid(sw, kb, out, cls, ctr, dep, runs, x_lo, x_hi, ak_lo, ak_hi, lut3d, max_outer_o,
               shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend):
    """Hybrid row; dependent mode reuses the A volume across equal centers."""
    width = out.shape[0]
    s_ifs = np.int64(0); s_adds = np.int64(0); s_trap = np.int64(0); s_pre = np.int64(0)
    t_ifs = np.int64(0); t_adds = np.int64(0)
    if dep:
        s_ifs += uniform_runs(kb, 0, 5, runs)
    prev = np.int64(-1)
    lo_a = hi_a = np.int64(0)
    for x in range(width):
        px = x + 2
        _copy_center(sw, px, out, x)
        cls[x] = 0
        ifs = 1
        adds = 0
        if _is_white(sw, px):
            s_ifs += ifs; s_pre += 1
            continue
        if dep:
            ifs += 1
            if runs[px + 2] >= 5:
                s_ifs += ifs; s_pre += 1
                continue
        p0 = np.int64(kb[2, px])
        ka = p0 >> 12
        fresh = True
        if dep:
            ifs += 1
            fresh = p0 != prev
        if fresh:
            lo_a, hi_a = _vol_a(p0, x_lo, x_hi, ak_lo, ak_hi)
            adds += 6
            prev = p0
        # per-window scan with early exits; B is the first pixel outside A in scan order
        bi = 0
        for i in range(1, 21):
            adds += 2
            ifs += 1
            if not _inside(np.int64(kb[2 + DY[i], px + DX[i]]), lo_a, hi_a):
                bi = i
                break
        ifs += 1
        if bi == 0:
            s_ifs += ifs; s_adds += adds; s_pre += 1
            continue
        lo_s, hi_s = _vol_b(np.int64(kb[2 + DY[bi], px + DX[bi]]), ka, x_lo, x_hi)
        adds += 6
        # positions before bi are A by construction
        n_ia = np.int64(min(bi, 9))
        n_oa = np.int64(max(bi - 9, 0))
        n_io = np.int64(0)
        n_oo = np.int64(0)
        nn_b = np.int64(bi & 1) & np.int64(bi <= 8)
        # inner ring in two chunks, so noisy windows leave early
        for i in range(bi + 1, 3):
            p = np.int64(kb[2 + DY[i], px + DX[i]])
            isa = np.int64(_inside(p, lo_a, hi_a))
            inb = np.int64(_inside(p, lo_s, hi_s))
            n_ia += isa
            n_io += (1 - isa) & (1 - inb)
            nn_b |= (1 - isa) & inb & (i & 1)
            adds += 7
        ifs += 1
        if n_io > 0:
            s_ifs += ifs; s_adds += adds; s_pre += 1
            continue
        for i in range(max(bi + 1, 3), 9):
            p = np.int64(kb[2 + DY[i], px + DX[i]])
            isa = np.int64(_inside(p, lo_a, hi_a))
            inb = np.int64(_inside(p, lo_s, hi_s))
            n_ia += isa
            n_io += (1 - isa) & (1 - inb)
            nn_b |= (1 - isa) & inb & (i & 1)
            adds += 7
        ifs += 1
        if n_io > 0:
            s_ifs += ifs; s_adds += adds; s_pre += 1
            continue
        for i in range(max(bi + 1, 9), 21):
            p = np.int64(kb[2 + DY[i], px + DX[i]])
            isa = np.int64(_inside(p, lo_a, hi_a))
            inb = np.int64(_inside(p, lo_s, hi_s))
            n_oa += isa
            n_oo += (1 - isa) & (1 - inb)
            adds += 6
        ifs += 1
        if n_oo > max_outer_o:
            s_ifs += ifs; s_adds += adds; s_pre += 1
            continue
        ifs += 1
        if lut3d[n_ia - 1, n_oa, n_oo] == 0:
            s_ifs += ifs; s_adds += adds
            continue
        e = 2 - nn_b
        adds += 1
        cls[x] = e
        i2, a2, trapped = trap_lut(sw, x, px, 2 + DY[bi], px + DX[bi], e, shift_tab, prio,
                                   trap_tab, ovrd_tab, edge_tab, blend, out)
        s_ifs += ifs + i2; s_adds += adds + a2
        if trapped:
            s_trap += 1; t_ifs += ifs + i2; t_adds += adds + a2
    ctr[0] += s_ifs; ctr[1] += s_adds; ctr[3] += s_trap; ctr[4] += s_pre
    ctr[5] += t_ifs; ctr[6] += t_adds


# --- reference ---------------------------------------------------------------

@numba.njit(**_JIT)
def _classify_counted(bm, om, nbr_mask, span, max_o):
    """The reference rule set with an if-statement counter."""
    ifs = 1
    if om & 0x1FE:
        return 0, ifs
    n = 0
    mm = om & 0x1FFE00
    while mm:
        ifs += 1
        mm &= mm - 1
        n += 1
    ifs += 1
    if n > max_o:
        return 0, ifs
    m12 = (om >> 9) & 0xFFF
    ifs += 1
    if m12 != 0 and m12 != 0xFFF:
        prev = ((m12 << 1) | (m12 >> 11)) & 0xFFF
        starts = m12 & ~prev
        ifs += 1
        if starts & (starts - 1):
            return 0, ifs
    seen = np.int64(0)
    for i in range(1, 21):
        ifs += 1
        if (bm >> i) & 1 and not (seen >> i) & 1:
            comp = np.int64(1) << i
            while True:
                grown = comp
                for j in range(21):
                    ifs += 1
                    if (comp >> j) & 1:
                        grown |= nbr_mask[j] & bm
                ifs += 1
                if grown == comp:
                    break
                comp = grown
            seen |= comp
            ifs += 1
            if i <= 8 and comp & 0x1FFE00:
                return 1, ifs
    ifs += 1
    if bm & 0xAA:
        return 0, ifs
    seen = np.int64(0)
    for i in range(9, 21):
        ifs += 1
        if (bm >> i) & 1 and not (seen >> i) & 1:
            comp = np.int64(1) << i
            while True:
                grown = comp
                for j in range(21):
                    ifs += 1
                    if (comp >> j) & 1:
                        grown |= nbr_mask[j] & bm
                ifs += 1
                if grown == comp:
                    break
                comp = grown
            seen |= comp
            span_n = 0
            mm = comp & 0x1FFE00
            while mm:
                ifs += 1
                mm &= mm - 1
                span_n += 1
            ifs += 1
            if span_n >= span:
                return 2, ifs
    return 0, ifs


@numba.njit(**_JIT)
def _bounds(x, tol):
    return min(max(x - tol, 0), 255 - 2 * tol), max(min(x + tol, 255), 2 * tol)


@numba.njit(**_JIT)
def row_reference(sw, out, cls, ctr, dep, a_tol, k_tol_curve, weights, prio, nbr_mask, span, max_o):
    width = out.shape[0]
    s_ifs = np.int64(0); s_adds = np.int64(0); s_muls = np.int64(0)
    s_trap = np.int64(0); s_pre = np.int64(0)
    t_ifs = np.int64(0); t_adds = np.int64(0); t_muls = np.int64(0)
    wsum = weights[0] + weights[1] + weights[2] + weights[3]
    prev_key = np.int64(-1)
    lo0 = hi0 = lo1 = hi1 = lo2 = hi2 = np.int64(0)
    b_tol = np.int64(0)
    for x in range(width):
        px = x + 2
        _copy_center(sw, px, out, x)
        cls[x] = 0
        ifs = 1
        adds = 0
        muls = 0
        c = np.int64(sw[2, px, 0])
        m = np.int64(sw[2, px, 1])
        y = np.int64(sw[2, px, 2])
        k = np.int64(sw[2, px, 3])
        if c == 0 and m == 0 and y == 0 and k == 0:
            s_ifs += ifs; s_adds += adds; s_muls += muls
            continue
        key = ((c >> 3) << 10) | ((m >> 3) << 5) | (k >> 3)
        fresh = True
        if dep:
            ifs += 1
            fresh = key != prev_key
        if fresh:
            ka = k >> 3
            kt = np.int64(k_tol_curve[ka])
            b_tol = max(np.int64(a_tol), kt)
            lo0, hi0 = _bounds((c >> 3) * 8 + 4, b_tol)
            lo1, hi1 = _bounds((m >> 3) * 8 + 4, b_tol)
            lo2, hi2 = _bounds((k >> 3) * 8 + 4, np.int64(a_tol))
            muls += 6
            adds += 12
            prev_key = key
        has_b = False
        blo0 = bhi0 = blo1 = bhi1 = blo2 = bhi2 = np.int64(0)
        bpy = 0
        bpx = 0
        bm = np.int64(0)
        om = np.int64(0)
        for i in range(1, 21):
            ry = 2 + DY[i]
            rx = px + DX[i]
            v0 = (np.int64(sw[ry, rx, 0]) >> 3) * 8 + 4
            v1 = (np.int64(sw[ry, rx, 1]) >> 3) * 8 + 4
            v2 = (np.int64(sw[ry, rx, 3]) >> 3) * 8 + 4
            muls += 3
            adds += 3
            ifs += 1
            if lo0 <= v0 and v0 <= hi0 and lo1 <= v1 and v1 <= hi1 and lo2 <= v2 and v2 <= hi2:
                continue
            ifs += 1
            if not has_b:
                has_b = True
                bpy = ry
                bpx = rx
                blo0, bhi0 = _bounds(v0, b_tol)
                blo1, bhi1 = _bounds(v1, b_tol)
                blo2, bhi2 = _bounds(v2, b_tol)
                muls += 6
                adds += 12
                bm |= np.int64(1) << i
                continue
            ifs += 1
            if blo0 <= v0 and v0 <= bhi0 and blo1 <= v1 and v1 <= bhi1 and blo2 <= v2 and v2 <= bhi2:
                bm |= np.int64(1) << i
            else:
                om |= np.int64(1) << i
        e, ci = _classify_counted(bm, om, nbr_mask, span, max_o)
        ifs += ci + 1
        if e == 0:
            s_ifs += ifs; s_adds += adds; s_muls += muls
            continue
        cls[x] = e
        # density, trap parameters and final value by formula
        n0 = np.int64(sw[bpy, bpx, 0]); n1 = np.int64(sw[bpy, bpx, 1])
        n2 = np.int64(sw[bpy, bpx, 2]); n3 = np.int64(sw[bpy, bpx, 3])
        s_c = weights[0] * c + weights[1] * m + weights[2] * y + weights[3] * k
        s_o = weights[0] * n0 + weights[1] * n1 + weights[2] * n2 + weights[3] * n3
        muls += 8
        adds += 6
        qc = min((32 * s_c) // (255 * wsum), 31)
        qo = min((32 * s_o) // (255 * wsum), 31)
        muls += 4
        dq = abs(qc - qo)
        adds += 1
        tr = 2 if dq >= 8 else 1
        a8 = min(8, 4 + dq // 4)
        ifs += 2
        if tr < e or s_c <= s_o:
            s_ifs += ifs; s_adds += adds; s_muls += muls
            continue
        ifs += 1
        if n0 == 0 and n1 == 0 and n2 == 0 and n3 == 0:
            best = np.int64(-1)
            dom = 0
            for r in range(4):
                p = prio[r]
                v = weights[p] * np.int64(sw[2, px, p])
                muls += 1
                ifs += 1
                if v > best:
                    best = v
                    dom = p
            for p in range(4):
                cp = np.int64(sw[2, px, p])
                ifs += 1
                if p != dom and cp > 0:
                    out[x, p] = cp - ((a8 * cp + 4) >> 3)
                    muls += 1
                    adds += 2
        else:
            nb = (n0, n1, n2, n3)
            for p in range(4):
                cp = np.int64(sw[2, px, p])
                ifs += 1
                if nb[p] > cp:
                    out[x, p] = cp + ((a8 * (nb[p] - cp) + 4) >> 3)
                    muls += 1
                    adds += 3
        s_ifs += ifs; s_adds += adds; s_muls += muls
        s_trap += 1; t_ifs += ifs; t_adds += adds; t_muls += muls
    ctr[0] += s_ifs; ctr[1] += s_adds; ctr[2] += s_muls; ctr[3] += s_trap; ctr[4] += s_pre
    ctr[5] += t_ifs; ctr[6] += t_adds; ctr[7] += t_muls




# --- page drivers --------------------------------------------------------------
# The swath is held in ``sw``/``kb``; each step shifts it up one row and pads
# the incoming row by edge replication, so only five rows are ever resident.

@numba.njit(**_JIT)
def _load_row(data, r, sw, kb, slot):
    h = data.shape[0]
    w = data.shape[1]
    rr = min(max(r, 0), h - 1)
    for x in range(w + 4):
        xx = min(max(x - 2, 0), w - 1)
        for p in range(4):
            sw[slot, x, p] = data[rr, xx, p]
        kb[slot, x] = pack_key(data[rr, xx, 0], data[rr, xx, 1], data[rr, xx, 3])


@numba.njit(**_JIT)
def swath_start(data, center, sw, kb):
    for j in range(5):
        _load_row(data, center - 2 + j, sw, kb, j)


@numba.njit(**_JIT)
def swath_step(data, center, sw, kb):
    """Advance a swath centered on ``center - 1`` to ``center``."""
    for j in range(4):
        sw[j] = sw[j + 1]
        kb[j] = kb[j + 1]
    _load_row(data, center + 2, sw, kb, 4)


@numba.njit(**_JIT)
def scan_lut3(data, r0, r1, out, cls, ctr, dep, sw, kb, runs, x_lo, x_hi, ak_lo, ak_hi, lut3,
              shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend):
    swath_start(data, r0, sw, kb)
    for r in range(r0, r1):
        if r > r0:
            swath_step(data, r, sw, kb)
        row_lut3(sw, kb, out[r], cls[r], ctr, dep, runs, x_lo, x_hi, ak_lo, ak_hi, lut3,
                 shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend)


@numba.njit(**_JIT)
def scan_lut5(data, r0, r1, out, cls, ctr, dep, sw, kb, runs, x_lo, x_hi, ak_lo, ak_hi,
              cm_transform, cm_class, perms, rank, lut5_flat, lut5_off,
              shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend):
    swath_start(data, r0, sw, kb)
    for r in range(r0, r1):
        if r > r0:
            swath_step(data, r, sw, kb)
        row_lut5(sw, kb, out[r], cls[r], ctr, dep, runs, x_lo, x_hi, ak_lo, ak_hi,
                 cm_transform, cm_class, perms, rank, lut5_flat, lut5_off,
                 shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend)


@numba.njit(**_JIT)
def scan_hybrid(data, r0, r1, out, cls, ctr, dep, sw, kb, runs, x_lo, x_hi, ak_lo, ak_hi, lut3d, max_outer_o,
                shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend):
    swath_start(data, r0, sw, kb)
    for r in range(r0, r1):
        if r > r0:
            swath_step(data, r, sw, kb)
        row_hybrid(sw, kb, out[r], cls[r], ctr, dep, runs, x_lo, x_hi, ak_lo, ak_hi, lut3d, max_outer_o,
                   shift_tab, prio, trap_tab, ovrd_tab, edge_tab, blend)


@numba.njit(**_JIT)
def scan_reference(data, r0, r1, out, cls, ctr, dep, sw, kb, runs, a_tol, k_tol_curve, weights, prio,
                   nbr_mask, span, max_o):
    swath_start(data, r0, sw, kb)
    for r in range(r0, r1):
        if r > r0:
            swath_step(data, r, sw, kb)
        row_reference(sw, out[r], cls[r], ctr, dep, a_tol, k_tol_curve, weights, prio, nbr_mask, span, max_o)
