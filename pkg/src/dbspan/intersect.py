"""Doubly-primitive representability of a residue via half-sumset intersection.

A doubly-primitive length-r representation of ``n`` mod m is
``n = x1 + x2 + ... + xr`` with ``x1`` in T2, ``x2`` in T3 and every ``xi`` in
T.  The sum is split into two halves S1, S2 and the residue has such a
representation iff S1 meets ``n - S2``.

Three engines share that split:

* dense masks with FFT sumsets for small moduli (all residues at once),
* a compiled hash-join for moduli below 2**63, partitioned by residue class
  modulo a divisor ``q`` of ``m`` so each class fits the memory budget,
* exact Python integer sets for larger moduli when the work is small.
"""

from __future__ import annotations

import itertools
import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from dbspan import _kernels
from dbspan.modular import ModContext, ResourceError, _cyclic_sumset, residue_mask

log = logging.getLogger(__name__)

DENSE_ENGINE_LIMIT = 1 << 16
BIGINT_WORK_LIMIT = 5 * 10**6
DEFAULT_MEMORY_BUDGET = 8 << 30
TARGET_CLASS_SIZE = 1 << 17
MAX_LENGTH = 5

# Slot labels for the tuple (x1 in T2, x2 in T3, x3.. in T).
SLOT_T2, SLOT_T3, SLOT_TAIL = "T2", "T3", "T"


def dp_halves(r: int) -> tuple[list[str], list[str]]:
    """Factor lists of the two halves for length r."""
    if r < 2:
        raise ValueError("doubly-primitive representations need r >= 2")
    if r % 2:
        u = (r - 1) // 2
        return [SLOT_T2, SLOT_T3] + [SLOT_TAIL] * (u - 1), [SLOT_TAIL] * u
    u = r // 2
    return [SLOT_T2] + [SLOT_TAIL] * (u - 1), [SLOT_T3] + [SLOT_TAIL] * (u - 1)


def _factor_values(ctx: ModContext, name: str) -> tuple[int, ...]:
    return {SLOT_T2: ctx.T2, SLOT_T3: ctx.T3, SLOT_TAIL: ctx.T}[name]


def _canonical(parts: dict[str, list[int]]) -> tuple[int, ...]:
    return (parts[SLOT_T2][0], parts[SLOT_T3][0], *sorted(parts[SLOT_TAIL]))


# ---------------------------------------------------------------- dense masks


@lru_cache(maxsize=256)
def _half_mask(m: int, T: tuple, T2: tuple, T3: tuple, factors: tuple[str, ...]) -> np.ndarray:
    lists = {SLOT_T2: T2, SLOT_T3: T3, SLOT_TAIL: T}
    mask = residue_mask(m, lists[factors[0]])
    for f in factors[1:]:
        mask = _cyclic_sumset(mask, residue_mask(m, lists[f]))
    return mask


def dp_mask(ctx: ModContext, r: int) -> np.ndarray:
    """Boolean mask over Z/mZ of residues with a doubly-primitive length-r representation."""
    if ctx.m > DENSE_ENGINE_LIMIT * 64:
        raise ResourceError(f"dense masks are limited to m <= {DENSE_ENGINE_LIMIT * 64}")
    f1, f2 = dp_halves(r)
    key = (ctx.m, ctx.T, ctx.T2, ctx.T3)
    return _cyclic_sumset(_half_mask(*key, tuple(f1)), _half_mask(*key, tuple(f2)))


# ------------------------------------------------------------- bigint engine


def _half_set(ctx: ModContext, factors: list[str]) -> dict[int, list[tuple]]:
    """Residue -> list of factor tuples, tail factors in nondecreasing order."""
    return _half_set_cached(ctx.m, ctx.T, ctx.T2, ctx.T3, tuple(factors))


@lru_cache(maxsize=8)
def _half_set_cached(m: int, T: tuple, T2: tuple, T3: tuple, factors: tuple[str, ...]) -> dict:
    values = {SLOT_T2: T2, SLOT_T3: T3, SLOT_TAIL: T}
    fixed = [f for f in factors if f != SLOT_TAIL]
    k = len(factors) - len(fixed)
    out: dict[int, list[tuple]] = {}
    for head in itertools.product(*(values[f] for f in fixed)):
        for tail in itertools.combinations_with_replacement(T, k):
            s = (sum(head) + sum(tail)) % m
            out.setdefault(s, []).append(head + tail)
    return out


def _bigint_solutions(ctx: ModContext, residue: int, r: int, stop_first: bool) -> list[tuple]:
    from dbspan.modular import work_factor

    if work_factor(ctx, r) > BIGINT_WORK_LIMIT:
        raise ResourceError(
            f"direct refutation mod {ctx.m} at length {r} is too large for exact integer sets"
        )
    f1, f2 = dp_halves(r)
    s1 = _half_set(ctx, f1)
    s2 = _half_set(ctx, f2)
    if len(s1) > len(s2):
        (f1, s1), (f2, s2) = (f2, s2), (f1, s1)
    found = set()
    for v, left in s1.items():
        right = s2.get((residue - v) % ctx.m)
        if right is None:
            continue
        for a in left:
            for b in right:
                found.add(_assemble(f1, a, f2, b))
                if stop_first:
                    return sorted(found)
    return sorted(found)


def _assemble(f1: list[str], a: tuple, f2: list[str], b: tuple) -> tuple[int, ...]:
    parts: dict[str, list[int]] = {SLOT_T2: [], SLOT_T3: [], SLOT_TAIL: []}
    for name, x in itertools.chain(zip(f1, a), zip(f2, b)):
        parts[name].append(int(x))
    return _canonical(parts)


# ----------------------------------------------------------- compiled engine


@dataclass
class _TwoList:
    """A half written as X + Y with Y bucketed by residue mod q."""

    factors_x: list[str]
    factors_y: list[str]
    X: np.ndarray
    X_parts: np.ndarray
    Y: np.ndarray
    tie: bool

    @property
    def size(self) -> int:
        n = len(self.X) * len(self.Y)
        return n // 2 if self.tie else n


def _materialize(ctx: ModContext, factors: list[str]) -> tuple[np.ndarray, np.ndarray]:
    T, T2, T3 = ctx.arrays
    lists = {SLOT_T2: T2, SLOT_T3: T3, SLOT_TAIL: T}
    if not factors:
        return np.zeros(1, dtype=np.int64), np.zeros((1, 0), dtype=np.int64)
    if factors.count(SLOT_TAIL) > 1:
        raise ResourceError("materializing repeated T factors is not supported")
    grids = np.meshgrid(*(lists[f] for f in factors), indexing="ij")
    parts = np.stack([g.ravel() for g in grids], axis=1)
    vals = parts[:, 0].copy()
    for k in range(1, parts.shape[1]):
        vals = _add_mod_np(vals, parts[:, k], ctx.m)
    return vals, parts


def _add_mod_np(x: np.ndarray, y: np.ndarray, m: int) -> np.ndarray:
    d = x - (m - y)
    d[d < 0] += m
    return d


def _two_list(ctx: ModContext, factors: list[str]) -> _TwoList:
    T = ctx.arrays[0]
    if len(factors) == 1:
        X, Xp = _materialize(ctx, [])
        return _TwoList([], factors, X, Xp, np.asarray(_factor_values(ctx, factors[0]), dtype=np.int64), False)
    if len(factors) == 2 and factors == [SLOT_TAIL, SLOT_TAIL]:
        return _TwoList([SLOT_TAIL], [SLOT_TAIL], T, T[:, None], T, True)
    if len(factors) > 3 or factors.count(SLOT_TAIL) > 1:
        raise ResourceError(f"half {factors} is beyond the supported lengths (r <= {MAX_LENGTH})")
    # One list stays bare (the larger), the rest is materialized into X.
    sizes = [len(_factor_values(ctx, f)) for f in factors]
    big = int(np.argmax(sizes))
    rest = factors[:big] + factors[big + 1 :]
    X, Xp = _materialize(ctx, rest)
    Y = np.asarray(_factor_values(ctx, factors[big]), dtype=np.int64)
    if len(X) > len(Y):
        # Loop over the shorter list; Y must then be a single factor list.
        if len(rest) == 1:
            X2, Xp2 = Y, Y[:, None]
            return _TwoList([factors[big]], rest, X2, Xp2, X, False)
    return _TwoList(rest, [factors[big]], X, Xp, Y, False)


def _divisors(factors: dict[int, int], limit: int) -> list[int]:
    divs = [1]
    for p, k in factors.items():
        divs = [d * p**e for d in divs for e in range(k + 1) if d * p**e <= limit]
    return sorted(divs)


def _cyclic_conv_counts(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    q = len(a)
    return np.rint(np.fft.irfft(np.fft.rfft(a) * np.fft.rfft(b), q)).astype(np.int64)


def _class_sizes(half: _TwoList, q: int) -> np.ndarray:
    hx = np.bincount(half.X % q, minlength=q).astype(np.float64)
    hy = np.bincount(half.Y % q, minlength=q).astype(np.float64)
    full = _cyclic_conv_counts(hx, hy) if q > 1 else np.array([len(half.X) * len(half.Y)])
    if half.tie:
        diag = np.bincount((2 * (half.X % q)) % q, minlength=q)
        return (full + diag) // 2
    return full


@dataclass
class _Plan:
    q: int
    table_bits: int
    max_class: int


def _plan(ctx: ModContext, hashed: _TwoList, probed: _TwoList, budget: int) -> _Plan:
    candidates = [1]
    if hashed.size > TARGET_CLASS_SIZE and ctx.factors:
        target = hashed.size / TARGET_CLASS_SIZE
        divs = _divisors(ctx.factors, 1 << 22)
        divs.sort(key=lambda d: abs(math.log(d / target)))
        candidates = sorted(set(divs[:12]) | {1})
    best = None
    for q in candidates:
        sizes = _class_sizes(hashed, q)
        max_class = int(sizes.max())
        bits = max(4, (2 * max_class + 1).bit_length())
        table_bytes = 16 << bits
        if table_bytes > budget // 2:
            continue
        overhead = 3 * q * (len(hashed.X) + len(probed.X))
        cache_penalty = 1.0 if table_bytes <= (16 << 20) else 2.5
        cost = overhead + probed.size * cache_penalty + hashed.size
        if best is None or cost < best[0]:
            best = (cost, _Plan(q, bits, max_class))
    if best is None:
        raise ResourceError(
            f"no partition of the length intersection mod {ctx.m} fits a {budget}-byte budget"
        )
    return best[1]


def _bucket(Y: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    key = Y % q
    order = np.argsort(key, kind="stable")
    start = np.searchsorted(key[order], np.arange(q + 1)).astype(np.int64)
    return Y[order], order.astype(np.int64), start


@lru_cache(maxsize=16)
def _prepared(m: int, r: int, budget: int):
    from dbspan.modular import build_context

    ctx = build_context(m)
    f1, f2 = dp_halves(r)
    h1, h2 = _two_list(ctx, f1), _two_list(ctx, f2)
    # Hash the smaller half, probe the larger.
    (hf, hashed), (pf, probed) = ((f1, h1), (f2, h2)) if h1.size <= h2.size else ((f2, h2), (f1, h1))
    plan = _plan(ctx, hashed, probed, budget)
    q = plan.q
    hY, _, hStart = _bucket(hashed.Y, q)
    pY, pYidx, pStart = _bucket(probed.Y, q)
    arrays = dict(
        hX=hashed.X, hXq=hashed.X % q, hY=hY, hStart=hStart, h_tie=hashed.tie,
        pX=probed.X, pXq=probed.X % q, pY=pY, pYidx=pYidx, pStart=pStart, p_tie=probed.tie,
    )
    return ctx, hf, hashed, pf, probed, plan, arrays


def _run_kernel(m, plan, arrays, residue, stop_first, parallelism, label, on_rows=None):
    """Match every class; ``on_rows`` sees each chunk's rows and may return True to stop."""
    q = plan.q
    per_class = max(1.0, (len(arrays["pX"]) * len(arrays["pY"])) / q)
    target = 4e6 if on_rows is not None else 5e7
    chunk = int(max(1, min(q, target // per_class)))
    chunks = [(c, min(q, c + chunk)) for c in range(0, q, chunk)]
    found = threading.Event()
    results: list[np.ndarray] = []
    lock = threading.Lock()
    done = [0]
    t0 = time.monotonic()

    def work(bounds):
        lo, hi = bounds
        if found.is_set():
            return
        cap = 1024
        while True:
            out = np.empty((cap, 3), dtype=np.int64)
            cnt, _ = _kernels.match_classes(
                m, q, residue, lo, hi,
                arrays["hX"], arrays["hXq"], arrays["hY"], arrays["hStart"], arrays["h_tie"],
                arrays["pX"], arrays["pXq"], arrays["pY"], arrays["pYidx"], arrays["pStart"], arrays["p_tie"],
                plan.table_bits, stop_first, out,
            )
            if cnt == -2:
                cap *= 4
                continue
            if cnt == -1:
                raise ResourceError("hash table overflow in the intersection kernel")
            break
        with lock:
            if cnt:
                rows = out[:cnt].copy()
                results.append(rows)
                if stop_first or (on_rows is not None and on_rows(rows)):
                    found.set()
            done[0] += hi - lo
            if len(chunks) > 1 and time.monotonic() - t0 > 5:
                log.info("%s: %d/%d classes, %.0fs", label, done[0], q, time.monotonic() - t0)

    if parallelism > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(parallelism) as pool:
            list(pool.map(work, chunks))
    else:
        for b in chunks:
            work(b)
            if found.is_set():
                break
    return np.concatenate(results) if results else np.empty((0, 3), dtype=np.int64)


def _decompose(ctx: ModContext, half: _TwoList, value: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """All (X index, Y value) pairs of ``half`` summing to ``value`` mod m."""
    need = (value - half.X) % ctx.m
    Ysorted = np.sort(half.Y)
    pos = np.searchsorted(Ysorted, need)
    pos[pos == len(Ysorted)] = 0
    hit = Ysorted[pos] == need
    idx = np.flatnonzero(hit)
    if half.tie:
        idx = idx[need[idx] >= half.X[idx]]
    return [(half.X_parts[i], need[i]) for i in idx]


def _kernel_solutions(ctx, residue, r, stop_first, budget, parallelism, stop_when=None) -> list[tuple]:
    _, hf, hashed, pf, probed, plan, arrays = _prepared(ctx.m, r, budget)
    label = f"dp r={r} mod {ctx.m}"
    if plan.q > 1:
        log.info("%s: %d classes mod %d, table 2^%d", label, plan.q, plan.q, plan.table_bits)
    out: set[tuple] = set()

    def collect(rows) -> bool:
        for i, yidx, v in rows:
            pparts = list(probed.X_parts[i]) + [probed.Y[yidx]]
            h = (residue - int(v)) % ctx.m
            for hx_parts, hy in _decompose(ctx, hashed, h):
                parts: dict[str, list[int]] = {SLOT_T2: [], SLOT_T3: [], SLOT_TAIL: []}
                for name, x in zip(probed.factors_x + probed.factors_y, pparts):
                    parts[name].append(int(x))
                for name, x in zip(hashed.factors_x + hashed.factors_y, list(hx_parts) + [hy]):
                    parts[name].append(int(x))
                t = _canonical(parts)
                if t in out:
                    continue
                out.add(t)
                if stop_first or (stop_when is not None and stop_when(t)):
                    return True
        return False

    if stop_when is None:
        collect(_run_kernel(ctx.m, plan, arrays, residue, stop_first, parallelism, label))
    else:
        _run_kernel(ctx.m, plan, arrays, residue, stop_first, parallelism, label, on_rows=collect)
    return sorted(out)


# ------------------------------------------------------------------ public


def _solutions(ctx, residue, r, stop_first, budget, parallelism, stop_when=None) -> list[tuple]:
    residue %= ctx.m
    if r < 2:
        raise ValueError("doubly-primitive representations need r >= 2")
    if r > MAX_LENGTH:
        raise ResourceError(f"lengths above {MAX_LENGTH} are not supported")
    if ctx.fits_int64:
        return _kernel_solutions(ctx, residue, r, stop_first, budget, parallelism, stop_when)
    sols = _bigint_solutions(ctx, residue, r, stop_first)
    if stop_when is not None:
        for i, t in enumerate(sols):
            if stop_when(t):
                return sols[: i + 1]
    return sols


def dp_refute_direct(
    ctx: ModContext,
    residue: int,
    r: int,
    *,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    parallelism: int = 1,
) -> bool:
    """True iff ``residue`` has no doubly-primitive length-r representation mod m."""
    if ctx.m <= DENSE_ENGINE_LIMIT:
        return not bool(dp_mask(ctx, r)[residue % ctx.m])
    return not _solutions(ctx, residue, r, True, memory_budget, parallelism)


def dp_enumerate(
    ctx: ModContext,
    residue: int,
    r: int,
    *,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    parallelism: int = 1,
    stop_when=None,
) -> list[tuple[int, ...]]:
    """Every doubly-primitive length-r representation of ``residue`` mod m.

    Tuples are ``(x1, x2, x3, ..., xr)`` with x1 in T2, x2 in T3, the tail in
    nondecreasing order; the list is sorted and duplicate-free.  With
    ``stop_when``, enumeration may end early once some tuple satisfies it, and
    the list is then partial.
    """
    return _solutions(ctx, residue, r, False, memory_budget, parallelism, stop_when)


def estimate_plan(ctx: ModContext, r: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> dict:
    _, _, hashed, _, probed, plan, _ = _prepared(ctx.m, r, memory_budget)
    return {"q": plan.q, "max_class": plan.max_class, "hashed": hashed.size, "probed": probed.size}
