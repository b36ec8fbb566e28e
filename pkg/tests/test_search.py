import random

import numpy as np
import pytest

from dbspan.checkpoint import CheckpointError
from dbspan.core23 import Representation, lengthen
from dbspan.search import (
    BoundsOverflowError,
    SearchBounds,
    census,
    coverage,
    find_representation,
    half_sums,
    is_length1,
    span_upper,
    summand_values,
)
from oracles import has_rep, has_rep_split, two_three_upto

def test_summand_values():
    vals = summand_values(100)
    pos = [int(v) for v in vals if v > 0]
    assert pos == two_three_upto(100)
    assert sorted(int(v) for v in vals) == [int(v) for v in vals]
    assert len(summand_values(1 << 61)) == 2448


def test_half_sums_brute():
    vals = [int(v) for v in summand_values(64)]
    for k in (1, 2, 3):
        want = set()
        stack = [(0, 0)]
        for _ in range(k):
            stack = [(s + v, 0) for s, _ in stack for v in vals]
        want = {s for s, _ in stack if abs(s) <= 200}
        assert set(int(x) for x in half_sums(k, 64, 200)) == want


@pytest.mark.parametrize("bound", [1, 7, 200, 1000, 1025, 4096])
def test_half_sums_shared_table(bound):
    vals = [int(v) for v in summand_values(64)]
    sums = {a + b for a in vals for b in vals}
    sums3 = {s + v for s in sums for v in vals}
    assert set(int(x) for x in half_sums(2, 64, bound)) == {s for s in sums if abs(s) <= bound}
    assert set(int(x) for x in half_sums(3, 64, bound)) == {s for s in sums3 if abs(s) <= bound}


def test_find_representation_examples():
    rep = find_representation(5, 2)
    assert rep is not None and rep.length == 2 and rep.target == 5
    assert find_representation(103, 2) is None
    rep = find_representation(103, 3)
    assert rep.length == 3 and sum(rep.values) == 103
    assert find_representation(6, 3).length == 3  # padded by lengthening


def test_zero():
    r, rep = span_upper(0)
    assert r == 2 and rep.values == [1, -1]
    assert find_representation(0, 1) is None


def test_negative_targets():
    rep = find_representation(-103, 3)
    assert rep.target == -103 and rep.length == 3


def test_is_length1():
    assert is_length1(-2**70 * 3**5)
    assert not is_length1(5)


@pytest.mark.parametrize("n", list(range(-60, 61)))
def test_span_upper_against_naive(n):
    if n == 0:
        return
    r, rep = span_upper(n)
    assert rep.target == n and rep.length == r
    assert not has_rep_split(n, r - 1, 1 << 61 if r <= 2 else 3**6, 2 * abs(n))


def test_span_upper_known_values():
    assert span_upper(103)[0] == 3
    assert span_upper(4985)[0] == 4
    assert span_upper(641687)[0] == 5


def test_census_small_ranges():
    assert census(1, 102, 2).misses == []
    assert census(1, 103, 2).misses == [103]
    rep = census(1, 4985, 3)
    assert rep.misses == [4985]


def test_coverage_points():
    cov = coverage([103, 104, 4985], 2)
    assert cov == {103: False, 104: True, 4985: False}


def test_bounds_overflow():
    with pytest.raises(BoundsOverflowError):
        find_representation(2**62, 3, SearchBounds(max_abs_summand=1 << 62))
    with pytest.raises(ValueError):
        SearchBounds(max_abs_summand=0)


@pytest.mark.parametrize("seed", range(200))
def test_lengthen_monotonic(seed):
    rng = random.Random(seed)
    r = rng.randint(1, 4)
    vals = [rng.choice([1, -1]) * 2 ** rng.randint(0, 15) * 3 ** rng.randint(0, 10) for _ in range(r)]
    rep = Representation.from_values(sum(vals), vals)
    longer = lengthen(rep, rng.randrange(r))
    s, _ = span_upper(rep.target) if rep.target else (2, None)
    assert s <= r
    assert find_representation(rep.target, longer.length) is not None


def test_census_checkpoint_resume(tmp_path):
    ck = tmp_path / "c.ckpt"
    plain = census(1, 5000, 3)
    full = census(1, 5000, 3, checkpoint=ck, interval=1000)
    again = census(1, 5000, 3, checkpoint=ck, resume=True, interval=1000)
    assert again.misses == full.misses == plain.misses
    assert plain.misses[0] == 4985
    assert again.resumed_intervals == 5


def test_census_resume_rejects_other_run(tmp_path):
    ck = tmp_path / "c.ckpt"
    census(1, 500, 2, checkpoint=ck, interval=100)
    with pytest.raises(CheckpointError):
        census(1, 600, 2, checkpoint=ck, resume=True, interval=100)


def test_census_resume_after_partial_run(tmp_path):
    from dbspan.checkpoint import read_records, write_records

    ck = tmp_path / "c.ckpt"
    census(1, 5000, 3, checkpoint=ck, interval=1000)
    recs = read_records(ck)
    write_records(ck, recs[:3])  # as if killed after two intervals
    rep = census(1, 5000, 3, checkpoint=ck, resume=True, interval=1000)
    assert rep.resumed_intervals == 2 and rep.misses == census(1, 5000, 3).misses
    assert len(read_records(ck)) == 6


@pytest.mark.parametrize("r", [2, 3])
def test_census_matches_naive_small(r):
    bounds = SearchBounds(max_abs_summand=3**6)
    hi = 300 if r == 2 else 120
    rep = census(1, hi, r, bounds)
    naive = [n for n in range(1, hi + 1) if not has_rep_split(n, r, 3**6, 2 * hi)]
    assert rep.misses == naive


def test_partial_bound_is_one_sided():
    # 139 = 2187 - 2048, but both halves exceed 2 * 139
    assert find_representation(139, 2) is None
    assert 139 in census(1, 200, 2).misses
    rep = find_representation(139, 2, SearchBounds(max_abs_partial=4096))
    assert sorted(rep.values) == [-2048, 2187]
