"""Residue-set machinery over Z/mZ.

``T(m)`` is the image of all {2,3}-integers modulo ``m``; ``T2(m)`` and
``T3(m)`` are the images of ``{+-2**i}`` and ``{+-3**j}``.  The density and
work-factor formulas measure how sparse these images are and how much work a
modular refutation costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Optional

import numpy as np
from sympy import isprime
from sympy.ntheory import n_order

DEFAULT_MAX_RESIDUES = 10**7
DENSE_LIMIT = 1 << 24
INT64_LIMIT = 1 << 63

# (a, b) exponent pairs of the six low-density moduli used by default.
TABLE1_EXPONENTS: tuple[tuple[int, int], ...] = (
    (144, 432),
    (288, 144),
    (144, 144),
    (72, 216),
    (144, 48),
    (36, 108),
)


class ResourceError(RuntimeError):
    """A computation would exceed a configured size or memory cap."""


class FactorizationError(ArithmeticError):
    pass


def factorize(m: int, trial_limit: int = 1 << 20) -> dict[int, int]:
    """Factor ``m`` by trial division; a leftover cofactor must be prime."""
    if m < 1:
        raise ValueError(f"cannot factor {m}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    p = 5
    step = 2
    while p <= trial_limit and p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out[p] = k
        p += step
        step = 6 - step
    if m > 1:
        if not isprime(m):
            raise FactorizationError(f"composite cofactor {m} survived trial division to {trial_limit}")
        out[m] = out.get(m, 0) + 1
    return out


def _carmichael_prime_power(p: int, k: int) -> int:
    if p == 2:
        return 1 if k == 1 else 2 if k == 2 else 1 << (k - 2)
    return (p - 1) * p ** (k - 1)


def carmichael(m: int, factors: Optional[dict[int, int]] = None) -> int:
    """Exponent of the multiplicative group (Z/mZ)*."""
    if m < 1:
        raise ValueError(f"carmichael needs m >= 1, got {m}")
    if factors is None:
        factors = factorize(m)
    lam = 1
    for p, k in factors.items():
        lam = math.lcm(lam, _carmichael_prime_power(p, k))
    return lam


def _orbit_size(m: int, g: int) -> int:
    """Number of distinct ``g**i mod m`` for prime ``g``: a tail of length v_g(m), then a cycle."""
    k, rest = 0, m
    while rest % g == 0:
        rest //= g
        k += 1
    return k + (1 if rest == 1 else int(n_order(g, rest)))


def _orbit(m: int, g: int, cap: int) -> list[int]:
    """Distinct values of ``g**i mod m``, i >= 0, stopping at the first repeat."""
    seen = set()
    out = []
    x = 1 % m
    while x not in seen:
        if len(out) >= cap:
            raise ResourceError(f"the powers of {g} mod {m} exceed the cap of {cap} residues")
        seen.add(x)
        out.append(x)
        x = x * g % m
    return out


def _orbit_dense(m: int, g: int) -> np.ndarray:
    # Powers by doubling blocks: block k+1 = block k * g**len(block k).
    size = _orbit_size(m, g)
    powers = np.array([1 % m], dtype=np.int64)
    while len(powers) < size:
        step = pow(g, len(powers), m)
        powers = np.concatenate([powers, (powers * step) % m])
    return powers[:size]


def _closure_sparse(m: int, first: Iterable[int], g: int, cap: int) -> set[int]:
    seen = set(first)
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            y = x * g % m
            if y not in seen:
                seen.add(y)
                nxt.append(y)
        if len(seen) > cap:
            raise ResourceError(f"T({m}) exceeds the cap of {cap} residues")
        frontier = nxt
    return seen


def _products_dense(m: int, o2: np.ndarray, o3: np.ndarray) -> np.ndarray:
    """Mask of all 2**i * 3**j mod m.

    With S_k the union of g**j * base for j < k, S_2k is S_k together with
    g**k * S_k.  Doubling stops once k covers the orbit of g, or earlier when
    S_k is already closed under multiplication by g**k.
    """
    base, (g, steps) = (o2, (3, len(o3))) if len(o2) >= len(o3) else (o3, (2, len(o2)))
    mask = np.zeros(m, dtype=bool)
    mask[base] = True
    size, k = int(mask.sum()), 1
    while k < steps:
        vals = np.flatnonzero(mask)
        mask[(vals * pow(g, k, m)) % m] = True
        grown = int(mask.sum())
        if grown == size:
            break
        size, k = grown, 2 * k
    return mask


def _dense_with_negatives(m: int, values: np.ndarray) -> tuple[int, ...]:
    if values.dtype != bool:
        mask = np.zeros(m, dtype=bool)
        mask[values] = True
    else:
        mask = values.copy()
    mask |= mask[(-np.arange(m)) % m]
    return tuple(np.flatnonzero(mask).tolist())


def _with_negatives(m: int, values: Iterable[int]) -> tuple[int, ...]:
    s = set(values)
    s |= {(-x) % m for x in s}
    return tuple(sorted(s))


@dataclass(frozen=True)
class ModContext:
    m: int
    T: tuple[int, ...]
    T2: tuple[int, ...]
    T3: tuple[int, ...]
    factors: Optional[dict[int, int]] = field(default=None, compare=False, repr=False)

    @property
    def t(self) -> int:
        return len(self.T)

    @property
    def t2(self) -> int:
        return len(self.T2)

    @property
    def t3(self) -> int:
        return len(self.T3)

    @cached_property
    def lambda_(self) -> int:
        return carmichael(self.m, self.factors)

    @property
    def fits_int64(self) -> bool:
        return self.m < INT64_LIMIT

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """T, T2, T3 as sorted int64 arrays (only for m < 2**63)."""
        if not self.fits_int64:
            raise ResourceError(f"modulus {self.m} does not fit a signed 64-bit word")
        return tuple(np.array(s, dtype=np.int64) for s in (self.T, self.T2, self.T3))

    @cached_property
    def Tset(self) -> frozenset[int]:
        return frozenset(self.T)

    def __contains__(self, x: int) -> bool:
        return x % self.m in self.Tset

    def summary(self) -> dict:
        return {"m": str(self.m), "t": self.t, "t2": self.t2, "t3": self.t3}


@lru_cache(maxsize=64)
def build_context(m: int, max_residues: int = DEFAULT_MAX_RESIDUES) -> ModContext:
    """Residue images of the {2,3}-integers modulo ``m``.

    ``T`` is grown as the closure of the 2-orbit of 1 under multiplication by 3,
    then closed under negation; the other generator order is used when its
    orbit is longer so the number of layers stays small.
    """
    if not isinstance(m, int) or isinstance(m, bool):
        raise TypeError(f"modulus must be an int, got {type(m).__name__}")
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    try:
        factors = factorize(m)
    except FactorizationError:
        factors = None
    if m <= DENSE_LIMIT:
        o2 = _orbit_dense(m, 2)
        o3 = _orbit_dense(m, 3)
        mask = _products_dense(m, o2, o3)
        if mask.sum() > max_residues:
            raise ResourceError(f"T({m}) exceeds the cap of {max_residues} residues")
        T, T2, T3 = (_dense_with_negatives(m, x) for x in (mask, o2, o3))
    else:
        for g in (2, 3):
            if factors is not None and _orbit_size(m, g) > max_residues:
                raise ResourceError(f"the powers of {g} mod {m} exceed the cap of {max_residues} residues")
        o2 = _orbit(m, 2, max_residues)
        o3 = _orbit(m, 3, max_residues)
        first, g = (o2, 3) if len(o2) >= len(o3) else (o3, 2)
        T = _with_negatives(m, _closure_sparse(m, first, g, max_residues))
        if len(T) > max_residues:
            raise ResourceError(f"T({m}) exceeds the cap of {max_residues} residues")
        T2 = _with_negatives(m, o2)
        T3 = _with_negatives(m, o3)
    return ModContext(m=m, T=T, T2=T2, T3=T3, factors=factors)


def _ln(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def density_D(ctx: ModContext, r: int) -> Fraction:
    """Expected degree-r density min(1, C(t+r-1, r) / m)."""
    if r < 2:
        raise ValueError("density needs r >= 2")
    return min(Fraction(1), Fraction(math.comb(ctx.t + r - 1, r), ctx.m))


def density_dp(ctx: ModContext, r: int) -> Fraction:
    """Expected doubly-primitive degree-r density min(1, t2*t3*C(t+r-3, r-2) / m)."""
    if r < 2:
        raise ValueError("density needs r >= 2")
    return min(Fraction(1), Fraction(ctx.t2 * ctx.t3 * math.comb(ctx.t + r - 3, r - 2), ctx.m))


def work_factor(ctx: ModContext, r: int) -> Fraction:
    """Approximate combined size of the two half-sumsets for length r."""
    if r < 2:
        raise ValueError("work factor needs r >= 2")
    t, t2, t3 = ctx.t, ctx.t2, ctx.t3
    if r % 2:
        u = (r - 1) // 2
        return Fraction((u * t2 * t3 + t) * t ** (u - 1), math.factorial(u))
    u = r // 2
    return Fraction((t2 + t3) * t ** (u - 1), math.factorial(u - 1))


def ln_density_D(ctx: ModContext, r: int) -> float:
    return _ln(density_D(ctx, r))


def ln_density_dp(ctx: ModContext, r: int) -> float:
    return _ln(density_dp(ctx, r))


def ln_work_factor(ctx: ModContext, r: int) -> float:
    return _ln(work_factor(ctx, r))


def split_power(n: int, p: int) -> tuple[int, int]:
    """Write ``n = p**k * rest`` with ``p`` not dividing ``rest``; return (k, rest)."""
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


@dataclass(frozen=True)
class ModulusProfile:
    a: int
    b: int
    x: int
    y: int
    u: int
    v: int
    m: int
    lnD: dict[int, float]
    lnd: dict[int, float]
    lnw: dict[int, float]

    @property
    def g(self) -> int:
        return math.gcd(self.u, self.v)

    def check(self) -> bool:
        return (
            2**self.a - 1 == 3**self.x * self.u
            and self.u % 3 != 0
            and 3**self.b - 1 == 2**self.y * self.v
            and self.v % 2 == 1
            and self.m == 2**self.y * 3**self.x * math.gcd(self.u, self.v)
        )

    def clamped(self, r: int) -> bool:
        """True when the doubly-primitive density is clamped to 1 at length r."""
        return self.lnd[r] >= 0.0

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "m": str(self.m),
            "x": self.x,
            "y": self.y,
            "lnD": {str(r): v for r, v in self.lnD.items()},
            "lnd": {str(r): v for r, v in self.lnd.items()},
            "lnw": {str(r): v for r, v in self.lnw.items()},
        }


MAX_EXPONENT = 4096


def modulus_from_exponents(
    a: int, b: int, rs: Iterable[int] = (2, 3, 4, 5), max_residues: int = DEFAULT_MAX_RESIDUES
) -> ModulusProfile:
    """Build ``m = 2**y * 3**x * gcd(u, v)`` from ``2**a - 1 = 3**x u`` and ``3**b - 1 = 2**y v``."""
    if a < 1 or b < 1:
        raise ValueError(f"exponents must be positive, got a={a}, b={b}")
    if a > MAX_EXPONENT or b > MAX_EXPONENT:
        raise ResourceError(f"exponents above {MAX_EXPONENT} are not supported")
    x, u = split_power(2**a - 1, 3)
    y, v = split_power(3**b - 1, 2)
    m = 2**y * 3**x * math.gcd(u, v)
    ctx = build_context(m, max_residues)
    rs = tuple(rs)
    return ModulusProfile(
        a=a,
        b=b,
        x=x,
        y=y,
        u=u,
        v=v,
        m=m,
        lnD={r: ln_density_D(ctx, r) for r in rs},
        lnd={r: ln_density_dp(ctx, r) for r in rs},
        lnw={r: ln_work_factor(ctx, r) for r in rs},
    )


def table1_profiles() -> list[ModulusProfile]:
    return [modulus_from_exponents(a, b) for a, b in TABLE1_EXPONENTS]


def _cyclic_sumset(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Boolean mask of {x + y mod m} given boolean masks A and B of length m."""
    m = len(A)
    if m <= 64:
        out = np.zeros(m, dtype=bool)
        for x in np.flatnonzero(A):
            out |= np.roll(B, x)
        return out
    n = 1 << (2 * m - 1).bit_length()
    fa = np.fft.rfft(A.astype(np.float64), n)
    fb = np.fft.rfft(B.astype(np.float64), n)
    lin = np.fft.irfft(fa * fb, n)[: 2 * m - 1]
    folded = lin[:m].copy()
    folded[: m - 1] += lin[m:]
    return folded > 0.5


def residue_mask(m: int, residues: Iterable[int]) -> np.ndarray:
    mask = np.zeros(m, dtype=bool)
    mask[np.fromiter(residues, dtype=np.int64)] = True
    return mask


def non_representable_residues(ctx: ModContext, r: int, max_modulus: int = 1 << 22) -> set[int]:
    """Residues mod m that are not a sum of r elements of T(m)."""
    if r < 2:
        raise ValueError("need r >= 2")
    if ctx.m > max_modulus:
        raise ResourceError(f"exhaustive sumsets are capped at m <= {max_modulus}")
    T = residue_mask(ctx.m, ctx.T)
    reach = T
    for _ in range(r - 1):
        reach = _cyclic_sumset(reach, T)
    return {int(x) for x in np.flatnonzero(~reach)}
