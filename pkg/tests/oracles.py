"""Slow, obviously-correct reference implementations used only by the tests."""

import itertools
import math

import numpy as np


def residue_sets(m):
    """T, T2, T3 mod m by breadth-first closure, with no shortcuts."""

    def close(gens):
        seen = {1 % m, (-1) % m}
        todo = list(seen)
        while todo:
            x = todo.pop()
            for g in gens:
                y = x * g % m
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    return close((2, 3)), close((2,)), close((3,))


def dp_reachable(m, r):
    """Boolean mask of residues with a doubly-primitive length-r representation mod m."""
    T, T2, T3 = residue_sets(m)
    mask = np.zeros(m, dtype=bool)
    for x in T2:
        for y in T3:
            mask[(x + y) % m] = True
    for _ in range(r - 2):
        nxt = np.zeros(m, dtype=bool)
        for z in T:
            nxt |= np.roll(mask, z)
        mask = nxt
    return mask


def dp_count(m, residue, r):
    """Number of tuples (x1 in T2, x2 in T3, tail nondecreasing in T) summing to residue."""
    T, T2, T3 = residue_sets(m)
    T = sorted(T)
    count = 0
    for tail in itertools.combinations_with_replacement(T, r - 2):
        s = sum(tail)
        for x in T2:
            if (residue - s - x) % m in T3:
                count += 1
    return count


def carmichael(m):
    """Exponent of (Z/m)^*, by brute force over the units."""
    if m == 1:
        return 1
    lam = 1
    for a in range(1, m):
        if math.gcd(a, m) == 1:
            k, x = 1, a % m
            while x != 1:
                x = x * a % m
                k += 1
            lam = lam * k // math.gcd(lam, k)
    return lam


def two_three_upto(limit):
    out = []
    p = 1
    while p <= limit:
        q = p
        while q <= limit:
            out.append(q)
            q *= 3
        p *= 2
    return sorted(out)


def has_rep(n, r, limit):
    """Naive search for a representation of n with at most r summands bounded by limit."""
    vals = two_three_upto(limit)
    signed = sorted(vals + [-v for v in vals])
    reach = {0}
    for k in range(1, r + 1):
        reach = {a + b for a in reach for b in signed if abs(a + b) <= 4 * limit}
        if n in reach:
            return True
    return False


def has_rep_split(n, r, limit, half_bound):
    """Length <= r representation as p + q, p and q sums of ceil(k/2) and floor(k/2)
    summands, each half at most half_bound in absolute value."""
    vals = two_three_upto(limit)
    signed = vals + [-v for v in vals]

    def sums(k):
        out = {0}
        for _ in range(k):
            out = {a + b for a in out for b in signed}
        return {s for s in out if abs(s) <= half_bound}

    for k in range(1, r + 1):
        P, Q = sums((k + 1) // 2), sums(k // 2)
        if any(n - p in Q for p in P):
            return True
    return False
