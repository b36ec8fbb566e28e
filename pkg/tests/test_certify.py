import copy
import json

import pytest

from dbspan.certify import (
    Certificate,
    CertificateFormatError,
    PoolEntry,
    default_pool,
    lift_attest,
    lift_refute,
    refute_length,
    span_exact,
    verify_certificate,
)
from dbspan.intersect import dp_enumerate, dp_refute_direct
from dbspan.modular import build_context
from dbspan.search import census

BIG = 1811941545963463911360
M0 = BIG // 408


def roundtrip(cert):
    return json.loads(json.dumps(cert.to_json()))


@pytest.fixture(scope="module")
def cert103():
    return refute_length(103, 2)


def test_103(cert103):
    assert cert103 is not None
    assert verify_certificate(roundtrip(cert103)).ok
    assert Certificate.from_json(roundtrip(cert103)).proof == cert103.proof


def test_representable_gives_nothing():
    assert refute_length(5, 2) is None
    assert refute_length(103, 3) is None
    assert refute_length(0, 3) is None


def test_length_one_and_zero():
    c = refute_length(5, 1)
    assert c.to_json()["proof"] == {"kind": "no_length1", "n": "5"}
    assert refute_length(6, 1) is None
    assert verify_certificate(roundtrip(refute_length(6, 0))).ok


def test_strings_for_big_integers(cert103):
    doc = cert103.to_json()
    dp = doc["proof"]["children"][0]
    assert isinstance(dp["m"], str) and isinstance(dp["n"], str)


def test_4985():
    c = refute_length(4985, 3)
    assert c is not None and verify_certificate(roundtrip(c)).ok


def _with_divisor():
    # 206 = 2 * 103 has no length-2 representation, so case 4 has one child
    c = refute_length(206, 2)
    assert c is not None and len(c.proof.divisors) == 1
    return c


def test_deleted_case4_child():
    doc = roundtrip(_with_divisor())
    assert verify_certificate(doc).ok
    doc["proof"]["children"] = doc["proof"]["children"][:3]
    res = verify_certificate(doc)
    assert not res.ok and "divisor" in res.problems[0]


def test_tampered_modulus(cert103):
    doc = roundtrip(cert103)
    doc["proof"]["children"][0]["m"] = str(int(doc["proof"]["children"][0]["m"]) + 1)
    assert not verify_certificate(doc).ok


def test_tampered_residue_consistent_modulus():
    # a leaf whose residue matches a modulus that does not refute
    doc = roundtrip(refute_length(103, 2))
    doc["proof"]["children"][0].update(m="7", residue=str(103 % 7))
    assert not verify_certificate(doc).ok


def test_tampered_claim(cert103):
    doc = roundtrip(cert103)
    doc["claim"]["n"] = "104"
    assert not verify_certificate(doc).ok


def test_malformed_reports_path(cert103):
    doc = roundtrip(cert103)
    del doc["proof"]["children"][2]["n"]
    res = verify_certificate(doc)
    assert not res.ok and res.problems[0].startswith("$.proof.children[2].n")
    with pytest.raises(CertificateFormatError):
        Certificate.from_json({"format": "nope"})


def test_metadata_is_ignored(cert103):
    doc = roundtrip(cert103)
    doc["metadata"] = {"anything": ["goes"]}
    assert verify_certificate(doc).ok


def test_lift_toy_agrees_with_direct():
    ctx = build_context(24)
    for n in range(0, 60):
        lifted = lift_refute(n, 2, 8, 24)
        assert (lifted is not None) == dp_refute_direct(ctx, n % 24, 2)


@pytest.mark.parametrize("m0,m,r", [(8, 24, 2), (35, 105, 3), (120, 720, 3)])
def test_lift_early_stop_matches_full(m0, m, r):
    ctx0 = build_context(m0)
    for n in range(0, 3 * m):
        _, first = lift_attest(n, m0, m, dp_enumerate(ctx0, n % m0, r))
        assert (lift_refute(n, r, m0, m) is None) == (first is not None)


def test_lift_divisibility():
    with pytest.raises(ValueError):
        lift_refute(5, 2, 7, 24)


@pytest.mark.parametrize("n,r", [(5, 2), (15, 4), (2 + 3 + 2**40 + 3**20, 4), (1 + 3**30 - 2**50, 3)])
def test_lift_soundness(n, r):
    # each n has a genuine doubly-primitive representation of length r
    assert lift_refute(n, r, M0, BIG) is None


def test_lift_refutes_103():
    ref = lift_refute(103, 2, M0, BIG)
    assert ref is not None and ref.mode == "lifted" and ref.m0 == M0


def test_lifted_leaf_verifies_and_detects_tampering():
    node = lift_refute(103, 2, M0, BIG)
    doc = {"format": "dbspan-certificate/1", "claim": {"n": "103", "r": 2},
           "proof": {"kind": "case_split", "n": "103", "r": 2, "children": [
               {"case": "dp", **node.to_json()},
               {"case": "plus", "kind": "vacuous", "n": "103"},
               {"case": "minus", "kind": "no_length1", "n": "17"}]}}
    assert verify_certificate(doc).ok
    bad = copy.deepcopy(doc)
    leaf = bad["proof"]["children"][0]
    leaf["tuples"].append(["2", "3"])
    leaf["tuple_count"] += 1
    assert not verify_certificate(bad).ok


def test_span_exact():
    res = span_exact(103)
    assert res.span == 3 and res.status == "proved" and res.witness.length == 3
    assert span_exact(6).span == 1 and span_exact(6).proved
    assert span_exact(5).span == 2 and span_exact(5).proved
    assert span_exact(-103).span == 3


def test_span_exact_weak_pool_is_honest():
    res = span_exact(103, [PoolEntry(7, "seven")])
    assert res.span == 3 and res.status == "upper_bound_only" and res.certificate is None


def test_census_consistency():
    for n, r in ((103, 3), (4985, 4)):
        res = span_exact(n)
        assert res.span == r and res.proved
        assert n in census(n - 10, n + 10, r - 1).misses


def test_default_pool_labels():
    labels = [e.label for e in default_pool()]
    assert labels[0] == "(144,432)" and len(labels) == 6


def test_pool_entry_json():
    e = PoolEntry.from_json({"a": 2, "b": 2})
    assert e.m == 24
    assert PoolEntry.from_json(e.to_json()) == e
    with pytest.raises(ValueError):
        PoolEntry.from_json({"m": "0"})
