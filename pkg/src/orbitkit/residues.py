"""Residue classes mod |k| under multiplication by 2 and 3."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import FrozenSet, Iterable, List, Optional, Tuple

from orbitkit.mapkernel import MapParam, t_apply


@dataclass(frozen=True)
class ResidueSet:
    modulus: int
    members: FrozenSet[int]

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        bad = [a for a in self.members if not 0 <= a < self.modulus]
        if bad:
            raise ValueError(f"residues out of range: {sorted(bad)}")

    @classmethod
    def of(cls, modulus: int, members: Iterable[int]) -> "ResidueSet":
        return cls(modulus, frozenset(members))

    def __contains__(self, a):
        return a % self.modulus in self.members

    def __len__(self):
        return len(self.members)

    def sorted(self) -> List[int]:
        return sorted(self.members)


@dataclass(frozen=True)
class ComponentPartition:
    modulus: int
    components: Tuple[ResidueSet, ...]

    def component_of(self, n: int) -> ResidueSet:
        for c in self.components:
            if n in c:
                return c
        raise AssertionError("partition does not cover all residues")


def residue_component(k: int, a: int) -> ResidueSet:
    """Smallest set containing a that is closed under r -> 2r and r -> 3r mod |k|."""
    mod = abs(k)
    if not 0 <= a < mod:
        raise ValueError(f"residue {a} not in [0, {mod})")
    seen = {a}
    work = [a]
    while work:
        r = work.pop()
        for s in (2 * r % mod, 3 * r % mod):
            if s not in seen:
                seen.add(s)
                work.append(s)
    return ResidueSet.of(mod, seen)


def component_partition(k: int) -> ComponentPartition:
    MapParam(k)
    mod = abs(k)
    comps = []
    covered = set()
    for a in range(mod):
        if a not in covered:
            c = residue_component(k, a)
            covered |= c.members
            comps.append(c)
    return ComponentPartition(mod, tuple(comps))


def closure_check(X: ResidueSet) -> bool:
    mod = X.modulus
    return all(2 * a % mod in X.members and 3 * a % mod in X.members for a in X.members)


def divisor_set(k: int, d: int) -> ResidueSet:
    """Residues a mod |k| with gcd(a, |k|) == d."""
    mod = abs(k)
    if d < 1 or mod % d:
        raise ValueError(f"{d} does not divide {k}")
    return ResidueSet.of(mod, (a for a in range(mod) if gcd(a, mod) == d))


def _commutators(k: int, r: Fraction) -> Tuple[Fraction, Fraction]:
    s1 = lambda x: 2 * x
    s1_inv = lambda x: x / 2
    s3 = lambda x: 3 * x + k
    s3_inv = lambda x: (x - k) / 3
    return s1(s3(s1_inv(s3_inv(r)))), s3(s1(s3_inv(s1_inv(r))))


def commutator_check(k: int, r, depth: int = 0, seed: Optional[int] = 0) -> bool:
    """Check S1 S3 S1^-1 S3^-1 (r) = r + k and S3 S1 S3^-1 S1^-1 (r) = r - k
    with S1(r) = 2r, S3(r) = 3r + k, at r and at ``depth`` random rationals."""
    rng = random.Random(seed)
    points = [Fraction(r)]
    for _ in range(depth):
        points.append(Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4)))
    for x in points:
        a, b = _commutators(k, x)
        if a != x + k or b != x - k:
            return False
    return True


def divisor_conjugacy_check(k: int, multiplier: int, lo: int, hi: int) -> bool:
    """Check multiplier * T_{k'}(n) == T_k(multiplier * n) for n in [lo, hi],
    where k = multiplier * k'."""
    if multiplier < 1 or k % multiplier:
        raise ValueError(f"{multiplier} does not divide {k}")
    big, small = MapParam(k), MapParam(k // multiplier)
    return all(
        multiplier * t_apply(small, n) == t_apply(big, multiplier * n)
        for n in range(lo, hi + 1)
    )
