"""Exact arithmetic on {2,3}-integers and double-base representations.

A {2,3}-integer is a nonzero integer ``sign * 2**a * 3**b``.  A representation
of ``n`` of length ``r`` is an ordered list of ``r`` such integers summing to
``n``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Sequence


class RepresentationError(ValueError):
    """A representation violates its sum or summand invariants."""


@dataclass(frozen=True, order=True)
class TwoThreeInteger:
    sign: int
    a: int
    b: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")
        if self.a < 0 or self.b < 0:
            raise ValueError(f"exponents must be nonnegative, got a={self.a}, b={self.b}")

    @property
    def value(self) -> int:
        return self.sign * (1 << self.a) * 3**self.b

    def sort_key(self) -> tuple[int, int, int, int]:
        """Deterministic candidate order: (|value|, sign, a, b)."""
        return (abs(self.value), self.sign, self.a, self.b)

    def __neg__(self) -> "TwoThreeInteger":
        return TwoThreeInteger(-self.sign, self.a, self.b)

    def __str__(self) -> str:
        return str(self.value)


def valuation(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    n = abs(n)
    k = 0
    if p == 2:
        return (n & -n).bit_length() - 1
    while n % p == 0:
        n //= p
        k += 1
    return k


def canonicalize(n: int) -> Optional[TwoThreeInteger]:
    """Return the canonical form of ``n`` or ``None`` if it is not a {2,3}-integer."""
    if n == 0:
        return None
    sign = 1 if n > 0 else -1
    m = abs(n)
    a = valuation(m, 2)
    m >>= a
    b = 0
    while m % 3 == 0:
        m //= 3
        b += 1
    if m != 1:
        return None
    return TwoThreeInteger(sign, a, b)


def value(t: TwoThreeInteger) -> int:
    return t.value


def is_two_three(n: int) -> bool:
    return canonicalize(n) is not None


def two_three_divisors(n: int) -> list[int]:
    """All positive {2,3}-integers ``d > 1`` dividing ``n``, in increasing order."""
    if n == 0:
        raise ValueError("0 has infinitely many {2,3}-divisors")
    v2, v3 = valuation(n, 2), valuation(n, 3)
    return sorted((1 << i) * 3**j for i in range(v2 + 1) for j in range(v3 + 1))[1:]


class ReprClass(enum.Enum):
    GENERAL = "general"
    PRIMITIVE = "primitive"
    DOUBLY_PRIMITIVE = "doubly_primitive"


@dataclass(frozen=True)
class Representation:
    target: int
    summands: tuple[TwoThreeInteger, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "summands", tuple(self.summands))
        if not self.summands:
            raise RepresentationError("a representation needs at least one summand")
        for s in self.summands:
            if not isinstance(s, TwoThreeInteger):
                raise RepresentationError(f"summand {s!r} is not a TwoThreeInteger")
        total = sum(s.value for s in self.summands)
        if total != self.target:
            raise RepresentationError(
                f"summands add to {total}, not to the target {self.target}"
            )

    @classmethod
    def from_values(cls, target: int, values: Iterable[int]) -> "Representation":
        summands = []
        for v in values:
            t = canonicalize(v)
            if t is None:
                raise RepresentationError(f"{v} is not a {{2,3}}-integer")
            summands.append(t)
        return cls(target, tuple(summands))

    @property
    def length(self) -> int:
        return len(self.summands)

    @property
    def values(self) -> list[int]:
        return [s.value for s in self.summands]

    def __neg__(self) -> "Representation":
        return Representation(-self.target, tuple(-s for s in self.summands))

    def __str__(self) -> str:
        terms = self.values
        out = str(terms[0])
        for v in terms[1:]:
            out += f" - {-v}" if v < 0 else f" + {v}"
        return f"{self.target} = {out}"

    def to_json(self) -> dict:
        return {"target": str(self.target), "summands": [str(v) for v in self.values]}

    @classmethod
    def from_json(cls, data: dict) -> "Representation":
        return cls.from_values(int(data["target"]), (int(v) for v in data["summands"]))


def classify(rep: Representation) -> ReprClass:
    # Representation validates the sum at construction; recheck in case the
    # caller bypassed __post_init__ with object.__new__.
    if sum(s.value for s in rep.summands) != rep.target:
        raise RepresentationError("summands do not add to the target")
    odd = [i for i, s in enumerate(rep.summands) if s.a == 0]
    prime_to_3 = [i for i, s in enumerate(rep.summands) if s.b == 0]
    if any(i != j for i in odd for j in prime_to_3):
        return ReprClass.DOUBLY_PRIMITIVE
    g = reduce(math.gcd, (s.value for s in rep.summands), 0)
    if g == 1:
        # Primitive but not doubly primitive: one summand is +-1, the rest are
        # multiples of 6.
        unit = [s for s in rep.summands if s.a == 0 and s.b == 0]
        assert len(unit) == 1
        assert all(s.a >= 1 and s.b >= 1 for s in rep.summands if s is not unit[0])
        return ReprClass.PRIMITIVE
    return ReprClass.GENERAL


def lengthen(rep: Representation, index: int) -> Representation:
    """Replace the summand at ``index`` by the pair ``3x, -2x``."""
    if not -rep.length <= index < rep.length:
        raise IndexError(f"summand index {index} out of range for length {rep.length}")
    index %= rep.length
    s = rep.summands[index]
    pair = (TwoThreeInteger(s.sign, s.a, s.b + 1), TwoThreeInteger(-s.sign, s.a + 1, s.b))
    return Representation(rep.target, rep.summands[:index] + pair + rep.summands[index + 1 :])


def sort_summands(values: Sequence[int]) -> list[int]:
    """Order summand values by the deterministic key (|v|, sign, a, b)."""
    return sorted(values, key=lambda v: canonicalize(v).sort_key())
