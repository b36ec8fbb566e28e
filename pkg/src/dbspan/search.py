"""Constructive search for double-base representations.

Representations of length r are found by meet-in-the-middle: the sums of
``ceil(r/2)`` summands and of ``floor(r/2)`` summands are generated under two
bounds (summand size and half-sum size) and matched.  Everything here is
one-sided: a miss means *not found within the bounds*, never a proof.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from dbspan.checkpoint import CheckpointError, read_records, write_records
from dbspan.core23 import Representation, TwoThreeInteger, canonicalize, classify, lengthen

log = logging.getLogger(__name__)

DEFAULT_MAX_SUMMAND = 1 << 61
INT64_MAX = (1 << 63) - 1
MAX_HALF_SUMS = 3 * 10**8
DEFAULT_SPAN_CAP = 8


class BoundsOverflowError(OverflowError):
    """Requested bounds do not fit the 64-bit search arithmetic."""


class SpanSearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchBounds:
    """Summand bound and half-sum bound; ``max_abs_partial=None`` means twice the target."""

    max_abs_summand: int = DEFAULT_MAX_SUMMAND
    max_abs_partial: Optional[int] = None

    def __post_init__(self) -> None:
        if self.max_abs_summand < 1 or self.max_abs_summand > INT64_MAX:
            raise ValueError(f"max_abs_summand must be in [1, 2**63 - 1], got {self.max_abs_summand}")
        if self.max_abs_partial is not None and self.max_abs_partial < 1:
            raise ValueError(f"max_abs_partial must be positive, got {self.max_abs_partial}")

    def partial_for(self, *targets: int) -> int:
        if self.max_abs_partial is not None:
            return self.max_abs_partial
        return 2 * max(1, *(abs(t) for t in targets))

    def check_width(self, k: int, partial: int) -> None:
        # Pair sums of summands and half-sum comparisons must stay in int64.
        if 2 * self.max_abs_summand + partial > INT64_MAX or partial > INT64_MAX // 2:
            raise BoundsOverflowError(
                f"summand bound {self.max_abs_summand} with half-sum bound {partial} "
                "overflows 64-bit arithmetic"
            )

    def to_json(self) -> dict:
        return {
            "max_abs_summand": str(self.max_abs_summand),
            "max_abs_partial": None if self.max_abs_partial is None else str(self.max_abs_partial),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SearchBounds":
        p = data.get("max_abs_partial")
        return cls(int(data["max_abs_summand"]), None if p is None else int(p))


@lru_cache(maxsize=8)
def summand_values(max_abs: int) -> np.ndarray:
    """All {2,3}-integers with absolute value at most ``max_abs``, ascending."""
    vals = []
    p = 1
    while p <= max_abs:
        q = p
        while q <= max_abs:
            vals.append(q)
            q *= 3
        p *= 2
    vals.sort()
    return np.array([-v for v in reversed(vals)] + vals, dtype=np.int64)


@lru_cache(maxsize=8)
def _key_order(max_abs: int) -> np.ndarray:
    """Summand values ordered by (|v|, sign)."""
    K = summand_values(max_abs)
    return K[np.lexsort((np.sign(K), np.abs(K)))]


def _pair_ranges(K: np.ndarray, base: np.ndarray, start: np.ndarray, bound: int):
    lo = np.searchsorted(K, -bound - base, "left")
    hi = np.searchsorted(K, bound - base, "right")
    lo = np.maximum(lo, start)
    return lo, np.maximum(hi, lo)


def _expand(base: np.ndarray, K: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    counts = hi - lo
    total = int(counts.sum())
    if total > MAX_HALF_SUMS:
        raise MemoryError(f"{total} half sums exceed the cap of {MAX_HALF_SUMS}")
    rep = np.repeat(np.arange(len(base)), counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    return base[rep] + K[lo[rep] + offs]


def half_sums(k: int, max_summand: int, bound: int) -> np.ndarray:
    """Sorted distinct sums of exactly k summands, |summand| <= max_summand, |sum| <= bound."""
    SearchBounds(max_summand, bound).check_width(k, bound)
    # compute at the next power of 16 so nearby targets share one cached table
    top = 1 << -(-max(1, (bound - 1).bit_length()) // 4) * 4
    try:
        SearchBounds(max_summand, top).check_width(k, top)
        full = _half_sums(k, max_summand, top)
    except (BoundsOverflowError, MemoryError):
        return _half_sums(k, max_summand, bound)
    return full[np.searchsorted(full, -bound, "left") : np.searchsorted(full, bound, "right")]


@lru_cache(maxsize=24)
def _half_sums(k: int, max_summand: int, bound: int) -> np.ndarray:
    K = summand_values(max_summand)
    if k == 1:
        return K[np.abs(K) <= bound]
    idx = np.arange(len(K))
    if k == 2:
        lo, hi = _pair_ranges(K, K, idx, bound)
        return np.unique(_expand(K, K, lo, hi))
    if k == 3:
        i, j = np.triu_indices(len(K))
        chunks = []
        step = 1 << 20
        for s in range(0, len(i), step):
            ii, jj = i[s : s + step], j[s : s + step]
            base = K[ii] + K[jj]
            lo, hi = _pair_ranges(K, base, jj, bound)
            chunks.append(np.unique(_expand(base, K, lo, hi)))
        return np.unique(np.concatenate(chunks))
    if k == 4:
        i, j = np.triu_indices(len(K))
        pairs = np.unique(K[i] + K[j])
        lo, hi = _pair_ranges(pairs, pairs, np.arange(len(pairs)), bound)
        return np.unique(_expand(pairs, pairs, lo, hi))
    raise ValueError(f"half sums of {k} summands are not supported")


def _contains(sorted_arr: np.ndarray, x: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(sorted_arr, x)
    pos[pos == len(sorted_arr)] = 0
    return sorted_arr[pos] == x if len(sorted_arr) else np.zeros(len(x), dtype=bool)


def _decompose(value: int, k: int, max_summand: int, floor_key: int = -1) -> Optional[list[int]]:
    """Lexicographically least k summands (ordered by key) adding to ``value``.

    ``floor_key`` is the position in key order below which summands may not be
    used, so the output is nondecreasing in key.
    """
    order = _key_order(max_summand)
    pos = {int(v): i for i, v in enumerate(order)}
    if k == 1:
        i = pos.get(value)
        return [value] if i is not None and i >= floor_key else None
    if k == 2:
        cand = order[max(floor_key, 0) :]
        rest = value - cand
        ok = np.flatnonzero(_contains(np.sort(cand), rest))
        for i in ok:
            x, y = int(cand[i]), int(rest[i])
            if pos[y] >= pos[x]:
                return [x, y]
        return None
    for i in range(max(floor_key, 0), len(order)):
        x = int(order[i])
        tail = _decompose(value - x, k - 1, max_summand, i)
        if tail is not None:
            return [x] + tail
    return None


def _build(n: int, values: Sequence[int]) -> Representation:
    rep = Representation.from_values(n, sorted(values, key=lambda v: canonicalize(v).sort_key()))
    classify(rep)
    return rep


def _direct(n: int, r: int, bounds: SearchBounds) -> Optional[Representation]:
    if r == 1:
        t = canonicalize(n)
        if t is None or abs(n) > bounds.max_abs_summand:
            return None
        return Representation(n, (t,))
    B = bounds.partial_for(n)
    k1, k2 = (r + 1) // 2, r // 2
    L = half_sums(k1, bounds.max_abs_summand, B)
    R = half_sums(k2, bounds.max_abs_summand, B)
    if len(L) <= len(R):
        cand = L[_contains(R, n - L)]
    else:
        cand = n - R[_contains(L, n - R)]
    if not len(cand):
        return None
    cand = cand[np.lexsort((cand, np.abs(cand)))]
    for a in cand:
        a = int(a)
        left = _decompose(a, k1, bounds.max_abs_summand)
        right = _decompose(n - a, k2, bounds.max_abs_summand)
        if left is not None and right is not None:
            return _build(n, left + right)
    return None


def find_representation(n: int, r: int, bounds: SearchBounds = SearchBounds()) -> Optional[Representation]:
    """A length-r representation of n within ``bounds``, or None if none is found.

    None is not a proof of non-existence.
    """
    if r < 1:
        raise ValueError("length must be at least 1")
    if n == 0:
        if r == 1:
            return None
        rep = Representation.from_values(0, [1, -1])
    else:
        bounds.check_width((r + 1) // 2, bounds.partial_for(n))
        rep = _direct(n, r, bounds)
        if rep is None and r > 1:
            shorter = find_representation(n, r - 1, bounds)
            if shorter is not None:
                rep = shorter
    if rep is None:
        return None
    while rep.length < r:
        i = min(range(rep.length), key=lambda j: rep.summands[j].sort_key())
        rep = lengthen(rep, i)
    if any(abs(v) > bounds.max_abs_summand for v in rep.values):
        return None
    assert sum(rep.values) == n and rep.length == r
    return rep


def is_length1(n: int) -> bool:
    return canonicalize(n) is not None


def span_upper(
    n: int, bounds: SearchBounds = SearchBounds(), max_length: int = DEFAULT_SPAN_CAP
) -> tuple[int, Representation]:
    """Smallest r for which the bounded search finds a representation of n."""
    if n == 0:
        return 2, Representation.from_values(0, [1, -1])
    for r in range(1, max_length + 1):
        rep = _direct(n, r, bounds)
        if rep is not None:
            return r, rep
    raise SpanSearchError(f"no representation of {n} found up to length {max_length}")


# --------------------------------------------------------------------- census


@dataclass
class CensusReport:
    lo: int
    hi: int
    r: int
    bounds: SearchBounds
    half_sum_bound: int
    misses: list[int] = field(default_factory=list)
    intervals: int = 0
    resumed_intervals: int = 0
    checkpoint: Optional[str] = None
    elapsed: float = 0.0

    @property
    def complete(self) -> bool:
        return not self.misses

    def to_json(self) -> dict:
        return {
            "lo": str(self.lo),
            "hi": str(self.hi),
            "length": self.r,
            "bounds": self.bounds.to_json(),
            "half_sum_bound": str(self.half_sum_bound),
            "misses": [str(x) for x in self.misses],
            "checkpoint": {
                "path": self.checkpoint,
                "intervals": self.intervals,
                "resumed_intervals": self.resumed_intervals,
            },
            "elapsed_seconds": round(self.elapsed, 3),
            "note": "misses are integers with no representation found within the bounds",
        }


def _cover_range(lo: int, hi: int, A: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Boolean mask over [lo, hi] of integers a + b with a in A, b in M."""
    covered = np.zeros(hi - lo + 1, dtype=bool)
    if not len(A) or not len(M):
        return covered
    s_lo = np.searchsorted(M, lo - A, "left")
    s_hi = np.searchsorted(M, hi - A, "right")
    counts = s_hi - s_lo
    order = np.argsort(-counts, kind="stable")
    remaining = np.arange(lo, hi + 1, dtype=np.int64)
    marks_since = 0
    for idx in order:
        cnt = int(counts[idx])
        if cnt == 0:
            break
        a = int(A[idx])
        if cnt <= 4 * len(remaining):
            covered[M[s_lo[idx] : s_hi[idx]] + (a - lo)] = True
            marks_since += cnt
        else:
            hit = _contains(M, remaining - a)
            covered[remaining[hit] - lo] = True
            marks_since += len(remaining)
        if marks_since > 2 * len(remaining) + 1024:
            remaining = lo + np.flatnonzero(~covered)
            marks_since = 0
            if not len(remaining):
                break
    return covered


def _cover_points(points: np.ndarray, A: np.ndarray, M: np.ndarray) -> np.ndarray:
    covered = np.zeros(len(points), dtype=bool)
    todo = np.arange(len(points))
    for a in A:
        hit = _contains(M, points[todo] - a)
        covered[todo[hit]] = True
        todo = todo[~hit]
        if not len(todo):
            break
    return covered


def _halves_for(r: int, bounds: SearchBounds, B: int) -> tuple[np.ndarray, np.ndarray]:
    k1, k2 = (r + 1) // 2, r // 2
    bounds.check_width(k1, B)
    L = half_sums(k1, bounds.max_abs_summand, B)
    R = half_sums(k2, bounds.max_abs_summand, B) if k2 else np.zeros(1, dtype=np.int64)
    # Iterate over the smaller half, look up in the larger.
    return (R, L) if len(R) <= len(L) else (L, R)


def coverage(targets: Iterable[int], r: int, bounds: SearchBounds = SearchBounds()) -> dict[int, bool]:
    """Whether each target is found as a length-r sum under a shared half-sum bound."""
    pts = np.unique(np.fromiter(targets, dtype=np.int64))
    if not len(pts):
        return {}
    B = bounds.partial_for(int(pts.min()), int(pts.max()))
    if r == 1:
        K = summand_values(bounds.max_abs_summand)
        return {int(p): bool(c) for p, c in zip(pts, _contains(K, pts))}
    A, M = _halves_for(r, bounds, B)
    return {int(p): bool(c) for p, c in zip(pts, _cover_points(pts, A, M))}


def census(
    lo: int,
    hi: int,
    r: int,
    bounds: SearchBounds = SearchBounds(),
    *,
    checkpoint: Optional[Path] = None,
    resume: bool = False,
    interval: int = 1 << 20,
) -> CensusReport:
    """Sweep [lo, hi] for length-r representations; misses are listed, not refuted."""
    if lo > hi:
        raise ValueError(f"empty range {lo}..{hi}")
    if r < 1:
        raise ValueError("length must be at least 1")
    t0 = time.monotonic()
    B = bounds.partial_for(lo, hi)
    header = {"kind": "census", "lo": str(lo), "hi": str(hi), "length": r,
              "bounds": bounds.to_json(), "half_sum_bound": str(B), "interval": interval}
    done: dict[int, list[int]] = {}
    records = [header]
    resumed = 0
    if checkpoint is not None:
        checkpoint = Path(checkpoint)
        if resume and checkpoint.exists():
            old = read_records(checkpoint)
            if not old or old[0] != header:
                raise CheckpointError(f"{checkpoint}: header does not match this census")
            for rec in old[1:]:
                done[int(rec["lo"])] = [int(x) for x in rec["misses"]]
            records = old
            resumed = len(done)
        else:
            write_records(checkpoint, records)

    report = CensusReport(lo, hi, r, bounds, B, checkpoint=str(checkpoint) if checkpoint else None,
                          resumed_intervals=resumed)
    halves = None
    starts = list(range(lo, hi + 1, interval))
    for s in starts:
        e = min(hi, s + interval - 1)
        if s in done:
            report.misses.extend(done[s])
            continue
        if r == 1:
            K = summand_values(bounds.max_abs_summand)
            covered = np.zeros(e - s + 1, dtype=bool)
            inside = K[(K >= s) & (K <= e)]
            covered[inside - s] = True
        else:
            if halves is None:
                halves = _halves_for(r, bounds, B)
            covered = _cover_range(s, e, *halves)
        misses = [int(x) for x in s + np.flatnonzero(~covered)]
        report.misses.extend(misses)
        if checkpoint is not None:
            records.append({"lo": str(s), "hi": str(e), "misses": [str(x) for x in misses]})
            write_records(checkpoint, records)
        log.info("census %d..%d length %d: %d misses", s, e, r, len(misses))
    report.misses.sort()
    report.intervals = len(starts)
    report.elapsed = time.monotonic() - t0
    return report
