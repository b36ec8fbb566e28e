"""Certificates that an integer has no double-base representation of a given length.

An integer n >= 1 has a length-r representation (r >= 2) iff one of:

1. n has a doubly-primitive length-r representation;
2. 6 | n + 1 and (n + 1)/6 has a length-(r-1) representation;
3. 6 | n - 1 and (n - 1)/6 has a length-(r-1) representation;
4. n/d has a primitive length-r representation for some {2,3}-integer d > 1
   dividing n.

A primitive representation that is not doubly primitive has one summand +-1
and all others divisible by 6, so case 4 reduces to a doubly-primitive check
on n/d plus cases 2 and 3 for n/d.  Doubly-primitive representations are
ruled out modulo a sparse modulus m, either directly or by enumerating all
solutions modulo a divisor m0 of m and showing none lifts.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from dbspan import __version__
from dbspan.core23 import Representation, canonicalize, two_three_divisors
from dbspan.intersect import DEFAULT_MEMORY_BUDGET, dp_enumerate, dp_refute_direct
from dbspan.modular import (
    INT64_LIMIT,
    TABLE1_EXPONENTS,
    ModContext,
    ResourceError,
    build_context,
    ln_density_dp,
    ln_work_factor,
    modulus_from_exponents,
    work_factor,
)
from dbspan.search import SearchBounds, span_upper

log = logging.getLogger(__name__)

CERT_FORMAT = "dbspan-certificate/1"
DEFAULT_LIFT_DIVISOR = 408
# Clamped-density moduli are still tried when the attempt is this cheap.
CHEAP_WORK = 10**6
# Leaves below this work are rechecked with plain integer sets.
SMALL_RECHECK_WORK = 3 * 10**6


# ------------------------------------------------------------------ pool


@dataclass(frozen=True)
class PoolEntry:
    m: int
    label: str
    a: Optional[int] = None
    b: Optional[int] = None
    lift_divisor: Optional[int] = None

    def to_json(self) -> dict:
        out = {"m": str(self.m), "label": self.label}
        if self.a is not None:
            out.update(a=self.a, b=self.b)
        if self.lift_divisor is not None:
            out["lift_divisor"] = str(self.lift_divisor)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PoolEntry":
        lift = data.get("lift_divisor")
        lift = None if lift is None else int(lift)
        if "a" in data and "b" in data and "m" not in data:
            a, b = int(data["a"]), int(data["b"])
            prof = modulus_from_exponents(a, b, rs=())
            return cls(prof.m, data.get("label", f"({a},{b})"), a, b, lift)
        m = int(data["m"])
        if m < 1:
            raise ValueError(f"pool modulus must be positive, got {m}")
        return cls(m, data.get("label", str(m)), data.get("a"), data.get("b"), lift)


def default_pool() -> list[PoolEntry]:
    out = []
    for a, b in TABLE1_EXPONENTS:
        prof = modulus_from_exponents(a, b, rs=())
        out.append(PoolEntry(prof.m, f"({a},{b})", a, b))
    return out


@dataclass(frozen=True)
class EngineOptions:
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    parallelism: int = 1


# ------------------------------------------------------------ tree nodes


@dataclass(frozen=True)
class DpRefutation:
    """No doubly-primitive length-r representation of n exists."""

    n: int
    r: int
    mode: str
    m: int
    residue: Optional[int] = None
    m0: Optional[int] = None
    tuples: tuple[tuple[int, ...], ...] = ()
    attestations: tuple[dict, ...] = ()

    @property
    def tuple_count(self) -> int:
        return len(self.tuples)

    def to_json(self) -> dict:
        out = {"kind": "no_dp", "n": str(self.n), "r": self.r, "mode": self.mode, "m": str(self.m)}
        if self.mode == "direct":
            out["residue"] = str(self.residue)
        else:
            out["m0"] = str(self.m0)
            out["tuple_count"] = self.tuple_count
            out["tuples"] = [[str(x) for x in t] for t in self.tuples]
            out["attestations"] = list(self.attestations)
        return out


@dataclass(frozen=True)
class NoLength1:
    n: int

    def to_json(self) -> dict:
        return {"kind": "no_length1", "n": str(self.n)}


@dataclass(frozen=True)
class NoLength0:
    n: int

    def to_json(self) -> dict:
        return {"kind": "no_length0", "n": str(self.n)}


@dataclass(frozen=True)
class Vacuous:
    """Case 2 or 3 does not apply because 6 does not divide n +- 1."""

    n: int
    case: str

    def to_json(self) -> dict:
        return {"kind": "vacuous", "n": str(self.n), "case": self.case}


@dataclass(frozen=True)
class PrimitiveSplit:
    """No primitive length-r representation of n (reached as n = N/d)."""

    n: int
    r: int
    d: int
    dp: DpRefutation
    plus: "Node"
    minus: "Node"

    def to_json(self) -> dict:
        return {
            "kind": "primitive_split",
            "n": str(self.n),
            "r": self.r,
            "d": str(self.d),
            "children": [
                {"case": "dp", **self.dp.to_json()},
                {"case": "plus", **self.plus.to_json()},
                {"case": "minus", **self.minus.to_json()},
            ],
        }


@dataclass(frozen=True)
class CaseSplit:
    n: int
    r: int
    dp: DpRefutation
    plus: "Node"
    minus: "Node"
    divisors: tuple[PrimitiveSplit, ...]

    def to_json(self) -> dict:
        return {
            "kind": "case_split",
            "n": str(self.n),
            "r": self.r,
            "children": [
                {"case": "dp", **self.dp.to_json()},
                {"case": "plus", **self.plus.to_json()},
                {"case": "minus", **self.minus.to_json()},
                *({"case": "divisor", **p.to_json()} for p in self.divisors),
            ],
        }


Node = Union[CaseSplit, PrimitiveSplit, DpRefutation, NoLength1, NoLength0, Vacuous]


@dataclass
class Certificate:
    n: int
    r: int
    proof: Node
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "format": CERT_FORMAT,
            "claim": {"n": str(self.n), "r": self.r,
                      "statement": f"{self.n} has no double-base representation of length {self.r}"},
            "proof": self.proof.to_json(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        if data.get("format") != CERT_FORMAT:
            raise CertificateFormatError("$.format", f"expected {CERT_FORMAT!r}")
        claim = _field(data, "claim", "$", dict)
        n = _int(claim, "n", "$.claim")
        r = _field(claim, "r", "$.claim", int)
        return cls(n, r, _parse_node(_field(data, "proof", "$", dict), "$.proof"), data.get("metadata", {}))


class CertificateFormatError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


def _field(d: dict, key: str, path: str, typ: type):
    if not isinstance(d, dict) or key not in d:
        raise CertificateFormatError(f"{path}.{key}", "missing")
    v = d[key]
    if typ is int and isinstance(v, bool) or not isinstance(v, typ):
        raise CertificateFormatError(f"{path}.{key}", f"expected {typ.__name__}")
    return v


def _int(d: dict, key: str, path: str) -> int:
    v = _field(d, key, path, str)
    try:
        return int(v)
    except ValueError:
        raise CertificateFormatError(f"{path}.{key}", f"not a decimal integer: {v!r}") from None


def _children(d: dict, path: str, cases: Sequence[str]) -> list[dict]:
    kids = _field(d, "children", path, list)
    if len(kids) < len(cases):
        raise CertificateFormatError(f"{path}.children", f"expected at least {len(cases)} children")
    for i, (kid, case) in enumerate(zip(kids, cases)):
        if not isinstance(kid, dict) or kid.get("case") != case:
            raise CertificateFormatError(f"{path}.children[{i}]", f"expected case {case!r}")
    return kids


def _parse_node(d: dict, path: str) -> Node:
    kind = _field(d, "kind", path, str)
    if kind == "no_length1":
        return NoLength1(_int(d, "n", path))
    if kind == "no_length0":
        return NoLength0(_int(d, "n", path))
    if kind == "vacuous":
        return Vacuous(_int(d, "n", path), _field(d, "case", path, str))
    if kind == "no_dp":
        mode = _field(d, "mode", path, str)
        base = dict(n=_int(d, "n", path), r=_field(d, "r", path, int), mode=mode, m=_int(d, "m", path))
        if mode == "direct":
            return DpRefutation(**base, residue=_int(d, "residue", path))
        if mode == "lifted":
            tuples = _field(d, "tuples", path, list)
            try:
                parsed = tuple(tuple(int(x) for x in t) for t in tuples)
            except (TypeError, ValueError):
                raise CertificateFormatError(f"{path}.tuples", "malformed tuple list") from None
            if _field(d, "tuple_count", path, int) != len(parsed):
                raise CertificateFormatError(f"{path}.tuple_count", "does not match the tuple list")
            return DpRefutation(**base, m0=_int(d, "m0", path), tuples=parsed,
                                attestations=tuple(_field(d, "attestations", path, list)))
        raise CertificateFormatError(f"{path}.mode", f"unknown mode {mode!r}")
    if kind in ("case_split", "primitive_split"):
        n, r = _int(d, "n", path), _field(d, "r", path, int)
        kids = _children(d, path, ("dp", "plus", "minus"))
        dp = _parse_node(kids[0], f"{path}.children[0]")
        if not isinstance(dp, DpRefutation):
            raise CertificateFormatError(f"{path}.children[0]", "expected a no_dp node")
        plus = _parse_node(kids[1], f"{path}.children[1]")
        minus = _parse_node(kids[2], f"{path}.children[2]")
        if kind == "primitive_split":
            if len(kids) != 3:
                raise CertificateFormatError(f"{path}.children", "primitive splits have three children")
            return PrimitiveSplit(n, r, _int(d, "d", path), dp, plus, minus)
        divs = []
        for i, kid in enumerate(kids[3:], start=3):
            if kid.get("case") != "divisor":
                raise CertificateFormatError(f"{path}.children[{i}]", "expected case 'divisor'")
            p = _parse_node(kid, f"{path}.children[{i}]")
            if not isinstance(p, PrimitiveSplit):
                raise CertificateFormatError(f"{path}.children[{i}]", "expected a primitive_split node")
            divs.append(p)
        return CaseSplit(n, r, dp, plus, minus, tuple(divs))
    raise CertificateFormatError(f"{path}.kind", f"unknown node kind {kind!r}")


# --------------------------------------------------------- modular leaves


def _fibers(ctx: ModContext, values: Sequence[int], m0: int) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for y in values:
        out.setdefault(y % m0, []).append(y // m0)
    return out


def _lift_offsets(fibers: Sequence[Sequence[int]], N: int) -> np.ndarray:
    """Mask over Z/N of sums of one offset from each fiber."""
    reach = np.zeros(N, dtype=bool)
    reach[0] = True
    for offs in fibers:
        nxt = np.zeros(N, dtype=bool)
        for k in set(offs):
            nxt |= np.roll(reach, k)
        reach = nxt
    return reach


@lru_cache(maxsize=4)
def _fiber_maps(m: int, m0: int) -> tuple[dict, dict, dict]:
    ctx = build_context(m)
    return tuple(_fibers(ctx, s, m0) for s in (ctx.T2, ctx.T3, ctx.T))


def _lifter(n: int, m0: int, m: int):
    """Per-tuple lift check: returns (lifts, attestation) for a mod-m0 tuple."""
    N = m // m0
    f2, f3, ft = _fiber_maps(m, m0)

    def check(tup: Sequence[int]) -> tuple[bool, dict]:
        if (n - sum(tup)) % m0:
            raise ValueError(f"tuple {tup} does not sum to n mod {m0}")
        kinds = [f2, f3] + [ft] * (len(tup) - 2)
        fibers = [kind.get(x, []) for kind, x in zip(kinds, tup)]
        need = ((n - sum(tup)) // m0) % N
        reach = _lift_offsets(fibers, N)
        return bool(reach[need]), {"needed_offset": need, "fiber_sizes": [len(f) for f in fibers]}

    return check


def lift_attest(
    n: int, m0: int, m: int, tuples: Iterable[Sequence[int]]
) -> tuple[list[dict], Optional[tuple[int, ...]]]:
    """Try to lift each mod-m0 tuple to a solution mod m.

    Returns per-tuple attestations and the first tuple that lifts (or None).
    """
    check = _lifter(n, m0, m)
    attest = []
    for tup in tuples:
        lifts, info = check(tup)
        if lifts:
            return attest, tuple(tup)
        attest.append(info)
    return attest, None


def lift_refute(
    n: int, r: int, m0: int, m: int, options: EngineOptions = EngineOptions()
) -> Optional[DpRefutation]:
    """Rule out doubly-primitive length-r representations of n mod m via its divisor m0."""
    if m0 < 1 or m % m0:
        raise ValueError(f"{m0} does not divide {m}")
    ctx0 = build_context(m0)
    check = _lifter(n, m0, m)
    attest: dict[tuple, dict] = {}
    lifted: list[tuple] = []

    def lifts(tup) -> bool:
        ok, info = check(tup)
        if ok:
            lifted.append(tuple(tup))
        attest[tuple(tup)] = info
        return ok

    # stop at the first liftable tuple; a refutation still sees the full list
    tuples = dp_enumerate(ctx0, n % m0, r, memory_budget=options.memory_budget,
                          parallelism=options.parallelism, stop_when=lifts)
    if lifted:
        log.info("lift of %s at length %d: tuple %s lifts mod %s", n, r, lifted[0], m)
        return None
    return DpRefutation(n, r, "lifted", m, m0=m0, tuples=tuple(tuple(t) for t in tuples),
                        attestations=tuple(attest[tuple(t)] for t in tuples))


def _lift_divisor(entry: PoolEntry, pool: Sequence[PoolEntry]) -> Optional[int]:
    m = entry.m
    cands = [p.m for p in pool if p.m < INT64_LIMIT and p.m != m and m % p.m == 0]
    for div in (entry.lift_divisor, DEFAULT_LIFT_DIVISOR):
        if div and m % div == 0 and m // div < INT64_LIMIT:
            cands.append(m // div)
    return max(cands) if cands else None


@dataclass
class _Strategy:
    entry: PoolEntry
    ctx: ModContext
    lnd: float
    lnw: float
    m0: Optional[int]


class Refuter:
    """Builds case-split refutation trees with a fixed modulus pool."""

    def __init__(self, pool: Sequence[PoolEntry], options: EngineOptions = EngineOptions()):
        if not pool:
            raise ValueError("the modulus pool is empty")
        self.pool = list(pool)
        self.options = options
        self.failed: list[tuple[int, int]] = []
        self._memo: dict[tuple[str, int, int], Optional[Node]] = {}
        self._strategies: dict[int, list[_Strategy]] = {}

    def strategies(self, r: int) -> list[_Strategy]:
        if r not in self._strategies:
            out = []
            for e in self.pool:
                ctx = build_context(e.m)
                lnd, lnw = ln_density_dp(ctx, r), ln_work_factor(ctx, r)
                m0 = None
                if not ctx.fits_int64 and work_factor(ctx, r) > 5 * 10**6:
                    m0 = _lift_divisor(e, self.pool)
                    if m0 is None:
                        continue
                if lnd >= 0 and lnw > math.log(CHEAP_WORK):
                    continue
                out.append(_Strategy(e, ctx, lnd, lnw, m0))
            out.sort(key=lambda s: (s.lnd >= 0, s.lnw, s.entry.m))
            self._strategies[r] = out
        return self._strategies[r]

    def dp(self, n: int, r: int) -> Optional[DpRefutation]:
        key = ("dp", n, r)
        if key in self._memo:
            return self._memo[key]
        res = None
        for s in self.strategies(r):
            if s.m0 is None:
                if dp_refute_direct(s.ctx, n % s.ctx.m, r, memory_budget=self.options.memory_budget,
                                    parallelism=self.options.parallelism):
                    res = DpRefutation(n, r, "direct", s.ctx.m, residue=n % s.ctx.m)
            else:
                log.info("lifting %d at length %d through %d -> %d", n, r, s.m0, s.ctx.m)
                res = lift_refute(n, r, s.m0, s.ctx.m, self.options)
            if res is not None:
                break
        if res is None:
            self.failed.append((n, r))
        self._memo[key] = res
        return res

    def _side(self, n: int, r: int, delta: int, case: str) -> Optional[Node]:
        if (n + delta) % 6:
            return Vacuous(n, case)
        return self.general((n + delta) // 6, r - 1)

    def primitive(self, n: int, r: int, d: int) -> Optional[PrimitiveSplit]:
        plus = self._side(n, r, 1, "plus")
        if plus is None:
            return None
        minus = self._side(n, r, -1, "minus")
        if minus is None:
            return None
        dp = self.dp(n, r)
        if dp is None:
            return None
        return PrimitiveSplit(n, r, d, dp, plus, minus)

    def general(self, n: int, r: int) -> Optional[Node]:
        """Refutation of every length-r representation of n >= 0."""
        if n < 0:
            raise ValueError("refutations are built for nonnegative targets")
        key = ("gen", n, r)
        if key in self._memo:
            return self._memo[key]
        if r == 0:
            node = NoLength0(n) if n else None
        elif r == 1:
            node = None if canonicalize(n) is not None else NoLength1(n)
        elif n == 0:
            node = None
        else:
            node = None
            plus = self._side(n, r, 1, "plus")
            minus = self._side(n, r, -1, "minus") if plus is not None else None
            divs = []
            if minus is not None:
                for d in two_three_divisors(n):
                    p = self.primitive(n // d, r, d)
                    if p is None:
                        divs = None
                        break
                    divs.append(p)
            if minus is not None and divs is not None:
                dp = self.dp(n, r)
                if dp is not None:
                    node = CaseSplit(n, r, dp, plus, minus, tuple(divs))
        self._memo[key] = node
        return node


def refute_length(
    n: int,
    r: int,
    pool: Optional[Sequence[PoolEntry]] = None,
    options: EngineOptions = EngineOptions(),
) -> Optional[Certificate]:
    """Certificate that n has no length-r representation, or None if inconclusive.

    None never means n is representable; it means some subgoal could not be
    discharged with the given pool.
    """
    if r < 0:
        raise ValueError("length must be nonnegative")
    pool = default_pool() if pool is None else list(pool)
    t0 = time.monotonic()
    ref = Refuter(pool, options)
    node = ref.general(abs(n), r)
    if node is None:
        if ref.failed:
            log.info("inconclusive: no pool modulus refutes doubly-primitive %s", ref.failed[:5])
        return None
    sign_note = {"negated_target": True} if n < 0 else {}
    return Certificate(
        abs(n),
        r,
        node,
        {
            "tool": "dbspan",
            "tool_version": __version__,
            "pool": [e.label for e in pool],
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "elapsed_seconds": round(time.monotonic() - t0, 3),
            **sign_note,
        },
    )


def inconclusive_hint(n: int, r: int, pool: Sequence[PoolEntry], options: EngineOptions = EngineOptions()) -> list[tuple[int, int]]:
    """Subgoals (target, length) no pool modulus could discharge."""
    ref = Refuter(pool, options)
    ref.general(abs(n), r)
    return ref.failed


# ----------------------------------------------------------- verification


@dataclass
class VerificationResult:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


class _Invalid(Exception):
    pass


def _small_dp_free(ctx: ModContext, residue: int, r: int) -> bool:
    """Plain-set recheck: residue has no doubly-primitive length-r representation mod m."""
    m = ctx.m
    if r % 2:
        u = (r - 1) // 2
        left = {(x + y + sum(c)) % m for x in ctx.T2 for y in ctx.T3
                for c in itertools.combinations_with_replacement(ctx.T, u - 1)}
        right = {sum(c) % m for c in itertools.combinations_with_replacement(ctx.T, u)}
    else:
        u = r // 2
        tails = {sum(c) % m for c in itertools.combinations_with_replacement(ctx.T, u - 1)}
        left = {(x + s) % m for x in ctx.T2 for s in tails}
        right = {(y + s) % m for y in ctx.T3 for s in tails}
    return all((residue - v) % m not in left for v in right)


class _Verifier:
    def __init__(self, options: EngineOptions):
        self.options = options
        self.problems: list[str] = []
        self._done: set = set()

    def fail(self, path: str, msg: str):
        raise _Invalid(f"{path}: {msg}")

    def general(self, node: Node, n: int, r: int, path: str) -> None:
        if r == 0:
            if not isinstance(node, NoLength0) or node.n != n or n == 0:
                self.fail(path, f"expected a no_length0 leaf for nonzero {n}")
            return
        if r == 1:
            if not isinstance(node, NoLength1) or node.n != n:
                self.fail(path, f"expected a no_length1 leaf for {n}")
            if canonicalize(n) is not None:
                self.fail(path, f"{n} is a {{2,3}}-integer")
            return
        if not isinstance(node, CaseSplit) or node.n != n or node.r != r:
            self.fail(path, f"expected a case_split for ({n}, {r})")
        if n <= 0:
            self.fail(path, f"case splits need a positive target, got {n}")
        self.dp(node.dp, n, r, f"{path}.dp")
        self.side(node.plus, n, r, 1, f"{path}.plus")
        self.side(node.minus, n, r, -1, f"{path}.minus")
        want = two_three_divisors(n)
        got = [p.d for p in node.divisors]
        if got != want:
            self.fail(path, f"divisor cases {got} do not match the required {want}")
        for p in node.divisors:
            self.primitive(p, n // p.d, r, f"{path}.divisor[{p.d}]")

    def primitive(self, node: PrimitiveSplit, n: int, r: int, path: str) -> None:
        if node.n != n or node.r != r:
            self.fail(path, f"primitive split is for ({node.n}, {node.r}), expected ({n}, {r})")
        self.dp(node.dp, n, r, f"{path}.dp")
        self.side(node.plus, n, r, 1, f"{path}.plus")
        self.side(node.minus, n, r, -1, f"{path}.minus")

    def side(self, node: Node, n: int, r: int, delta: int, path: str) -> None:
        if (n + delta) % 6:
            if not isinstance(node, Vacuous) or node.n != n:
                self.fail(path, "expected a vacuous marker")
            return
        self.general(node, (n + delta) // 6, r - 1, path)

    def dp(self, node: DpRefutation, n: int, r: int, path: str) -> None:
        if not isinstance(node, DpRefutation) or node.n != n or node.r != r:
            self.fail(path, f"expected a no_dp leaf for ({n}, {r})")
        key = (node.n, node.r, node.mode, node.m, node.m0, node.residue)
        if key in self._done:
            return
        if node.m < 1:
            self.fail(path, "modulus must be positive")
        ctx = build_context(node.m)
        if node.mode == "direct":
            if node.residue != n % node.m:
                self.fail(path, f"residue {node.residue} is not {n} mod {node.m}")
            if work_factor(ctx, r) <= SMALL_RECHECK_WORK:
                free = _small_dp_free(ctx, node.residue, r)
            else:
                free = dp_refute_direct(ctx, node.residue, r, memory_budget=self.options.memory_budget,
                                        parallelism=self.options.parallelism)
            if not free:
                self.fail(path, f"{n} has a doubly-primitive length-{r} representation mod {node.m}")
        elif node.mode == "lifted":
            m0 = node.m0
            if not m0 or node.m % m0:
                self.fail(path, f"{m0} does not divide {node.m}")
            ctx0 = build_context(m0)
            tuples = dp_enumerate(ctx0, n % m0, r, memory_budget=self.options.memory_budget,
                                  parallelism=self.options.parallelism)
            if len(tuples) != node.tuple_count or tuple(map(tuple, tuples)) != node.tuples:
                self.fail(path, f"recorded {node.tuple_count} tuples mod {m0}, recomputed {len(tuples)}")
            _, lifted = lift_attest(n, m0, node.m, tuples)
            if lifted is not None:
                self.fail(path, f"tuple {lifted} lifts to a solution mod {node.m}")
        else:
            self.fail(path, f"unknown mode {node.mode!r}")
        self._done.add(key)


def verify_certificate(
    cert: Union[Certificate, dict], options: EngineOptions = EngineOptions()
) -> VerificationResult:
    """Recheck every leaf and the case coverage of every node from scratch."""
    try:
        if isinstance(cert, dict):
            cert = Certificate.from_json(cert)
    except CertificateFormatError as exc:
        return VerificationResult(False, [str(exc)])
    v = _Verifier(options)
    try:
        v.general(cert.proof, cert.n, cert.r, "$")
    except _Invalid as exc:
        return VerificationResult(False, [str(exc)])
    except (ResourceError, ValueError) as exc:
        return VerificationResult(False, [f"$: {exc}"])
    return VerificationResult(True)


# ------------------------------------------------------------------- span


@dataclass
class SpanResult:
    n: int
    span: int
    witness: Representation
    certificate: Optional[Certificate]
    status: str

    @property
    def proved(self) -> bool:
        return self.status == "proved"

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "span": self.span,
            "status": self.status,
            "witness": self.witness.to_json(),
            "lower_bound_certificate": None if self.certificate is None else self.certificate.to_json(),
        }


def span_exact(
    n: int,
    pool: Optional[Sequence[PoolEntry]] = None,
    bounds: SearchBounds = SearchBounds(),
    options: EngineOptions = EngineOptions(),
    max_length: int = 8,
) -> SpanResult:
    """Span of n: a witness of length s and a certificate for length s - 1."""
    r, witness = span_upper(n, bounds, max_length)
    if n == 0:
        cert = refute_length(0, 1, pool, options)
        return SpanResult(0, 2, witness, cert, "convention")
    cert = refute_length(n, r - 1, pool, options)
    status = "proved" if cert is not None else "upper_bound_only"
    return SpanResult(n, r, witness, cert, status)
