"""Compiled inner loops for the half-sumset intersection."""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit(inline="always")
def add_mod(x, y, m):
    # x, y in [0, m) with m < 2**63; avoids overflowing int64.
    d = x - (m - y)
    if d < 0:
        d += m
    return d


@njit(inline="always")
def sub_mod(x, y, m):
    d = x - y
    if d < 0:
        d += m
    return d


@njit(inline="always")
def _slot(key, shift):
    return np.int64((np.uint64(key) * _GOLDEN) >> shift)


@njit(nogil=True, cache=True)
def match_classes(
    m, q, n, c_lo, c_hi,
    hX, hXq, hY, hStart, h_tie,
    pX, pXq, pY, pYidx, pStart, p_tie,
    table_bits, stop_first, out,
):
    """Intersect ``S_p`` with ``n - S_h`` one residue class (mod q) at a time.

    Returns ``(count, next_class)``; ``out`` rows are (index into pX, original
    index of the pY element, matched value).  ``count`` is -1 when the hash
    table overflows and -2 when ``out`` is full; the caller retries the chunk
    with more room.  With ``stop_first`` the scan ends at the first match.
    """
    size = np.int64(1) << table_bits
    mask = size - 1
    shift = np.uint64(64 - table_bits)
    keys = np.full(size, -1, dtype=np.int64)
    used = np.empty(size, dtype=np.int64)
    cap = out.shape[0]
    limit = (size * 3) // 4
    nout = 0
    for c in range(c_lo, c_hi):
        d = (n - c) % q
        nused = 0
        for i in range(len(hX)):
            x = hX[i]
            b = d - hXq[i]
            if b < 0:
                b += q
            for j in range(hStart[b], hStart[b + 1]):
                y = hY[j]
                if h_tie and y < x:
                    continue
                key = sub_mod(n, add_mod(x, y, m), m)
                s = _slot(key, shift) & mask
                while True:
                    k = keys[s]
                    if k == -1:
                        keys[s] = key
                        used[nused] = s
                        nused += 1
                        break
                    if k == key:
                        break
                    s = (s + 1) & mask
                if nused > limit:
                    return -1, c
        if nused == 0:
            continue
        for i in range(len(pX)):
            x = pX[i]
            b = c - pXq[i]
            if b < 0:
                b += q
            for j in range(pStart[b], pStart[b + 1]):
                y = pY[j]
                if p_tie and y < x:
                    continue
                v = add_mod(x, y, m)
                s = _slot(v, shift) & mask
                while True:
                    k = keys[s]
                    if k == -1:
                        break
                    if k == v:
                        if nout == cap:
                            return -2, c
                        out[nout, 0] = i
                        out[nout, 1] = pYidx[j]
                        out[nout, 2] = v
                        nout += 1
                        if stop_first:
                            return nout, c + 1
                        break
                    s = (s + 1) & mask
        for t in range(nused):
            keys[used[t]] = -1
    return nout, c_hi
