"""Exact rational generating functions attached to T_k.

Polynomials are tuples of ints (or Fractions while dividing), lowest
degree first. Denominators stay in the form (1 - z^P)^e until a common
factor with the numerator forces an explicit polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import List, Optional, Sequence, Tuple

from orbitkit.inverse import enumerate_backward
from orbitkit.mapkernel import MapParam, iterate, t_apply
from orbitkit.verdicts import MembershipWindow


class GenfunError(RuntimeError):
    """A constructed series failed its oracle or pole check."""


# -- dense polynomial helpers -------------------------------------------------


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _divmod(a, b):
    a = [Fraction(x) for x in _trim(a)]
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] -= c * y
        a = _trim(a)
    return _trim(q), a


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    return a


def _integerize(*polys):
    """Scale rational polynomials by one common factor to primitive integers."""
    den = 1
    for poly in polys:
        for c in poly:
            den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [[int(Fraction(c) * den) for c in poly] for poly in polys]
    content = reduce(gcd, (c for poly in ints for c in poly), 0) or 1
    return [[c // content for c in poly] for poly in ints]


def one_minus_power(P: int, e: int) -> List[int]:
    base = [1] + [0] * (P - 1) + [-1]
    out = [1]
    for _ in range(e):
        out = _mul(out, base)
    return out


@dataclass(frozen=True)
class RationalSeries:
    numerator: Tuple[int, ...]
    denominator: Tuple[int, ...]
    den_pow: Optional[Tuple[int, int]] = None
    variable: str = "z"

    @classmethod
    def structured(cls, numerator: Sequence[int], P: int, e: int, variable: str = "z"):
        """numerator / (1 - variable^P)^e, reduced."""
        return cls._reduced(list(numerator), one_minus_power(P, e), (P, e), variable)

    @classmethod
    def _reduced(cls, num, den, den_pow, variable):
        num, den = _trim(num), _trim(den)
        g = _gcd(num, den) if num else den
        if len(g) > 1:
            num = _divmod(num, g)[0]
            den = _divmod(den, g)[0]
            num, den = _integerize(num, den)
            den_pow = _match_power(den)
        if den[0] < 0:
            num, den = [-c for c in num], [-c for c in den]
        return cls(tuple(int(c) for c in num), tuple(int(c) for c in den), den_pow, variable)

    def series(self, N: int) -> List[int]:
        """First N Taylor coefficients at 0."""
        num, den = self.numerator, self.denominator
        if den[0] not in (1, -1):
            raise GenfunError("denominator constant term is not a unit")
        out: List[int] = []
        for n in range(N):
            c = num[n] if n < len(num) else 0
            for i in range(1, min(n, len(den) - 1) + 1):
                c -= den[i] * out[n - i]
            out.append(c * den[0])
        return out

    def to_json(self) -> dict:
        d = {"num": [str(c) for c in self.numerator]}
        if self.den_pow is not None:
            d["den_pow"] = {"P": self.den_pow[0], "e": self.den_pow[1]}
        else:
            d["den"] = [str(c) for c in self.denominator]
        return d

    @classmethod
    def from_json(cls, d: dict, variable: str = "z") -> "RationalSeries":
        num = [int(c) for c in d["num"]]
        if "den_pow" in d:
            P, e = d["den_pow"]["P"], d["den_pow"]["e"]
            return cls(tuple(num), tuple(one_minus_power(P, e)), (P, e), variable)
        return cls(tuple(num), tuple(int(c) for c in d["den"]), None, variable)

    def __str__(self):
        def fmt(poly):
            terms = []
            for i, c in enumerate(poly):
                if c:
                    mono = "" if i == 0 else self.variable if i == 1 else f"{self.variable}^{i}"
                    coef = str(c) if (c not in (1, -1) or i == 0) else ("-" if c < 0 else "")
                    terms.append(coef + mono)
            return " + ".join(terms).replace("+ -", "- ") or "0"

        if self.den_pow is not None:
            P, e = self.den_pow
            z = self.variable if P == 1 else f"{self.variable}^{P}"
            den = f"(1 - {z})" + (f"^{e}" if e > 1 else "")
        else:
            den = f"({fmt(self.denominator)})"
        return f"({fmt(self.numerator)}) / {den}"


def _match_power(den) -> Optional[Tuple[int, int]]:
    deg = len(den) - 1
    for e in (1, 2):
        if deg % e == 0 and deg:
            P = deg // e
            if list(den) == one_minus_power(P, e) or [-c for c in den] == one_minus_power(P, e):
                return (P, e)
    return None


# -- m-th iterate generating functions ---------------------------------------


@dataclass(frozen=True)
class AffineClassTable:
    """For each a in [0, 2^m): number of odd steps e(a) among the first m
    iterates of a, and T^m(a). Then T^m(a + j 2^m) = 3^e(a) j + T^m(a)."""

    m: int
    rows: Tuple[Tuple[int, int], ...]

    def predict(self, n: int) -> int:
        j, a = divmod(n, 1 << self.m)
        e, end = self.rows[a]
        return 3**e * j + end


def affine_class_table(p: MapParam, m: int) -> AffineClassTable:
    rows = []
    for a in range(1 << m):
        x, e = a, 0
        for _ in range(m):
            if x & 1:
                e += 1
            x = t_apply(p, x)
        rows.append((e, x))
    return AffineClassTable(m, tuple(rows))


def iterate_power(p: MapParam, n: int, m: int) -> int:
    for _ in range(m):
        n = t_apply(p, n)
    return n


def iterate_gf(p: MapParam, m: int, max_classes: int = 1 << 16, check: int = 512) -> RationalSeries:
    """sum_{n >= 1} T^m(n) z^n as a reduced rational function.

    Summing the affine law over each class a mod 2^m with Z = z^(2^m):
    z^a [T^m(a) / (1 - Z) + 3^e(a) Z / (1 - Z)^2]. The first ``check``
    coefficients are compared with direct iteration before returning.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    P = 1 << m
    if P > max_classes:
        raise ValueError(f"2^{m} residue classes exceed the budget of {max_classes}")
    table = affine_class_table(p, m)
    num = [0] * (2 * P)
    for a, (e, end) in enumerate(table.rows):
        num[a] += end
        num[a + P] += 3**e - end
    g = RationalSeries.structured(num, P, 2)
    expected = [iterate_power(p, n, m) for n in range(check)]
    if g.series(check) != expected:
        raise GenfunError(f"iterate_gf(k={p.k}, m={m}) disagrees with direct iteration")
    if not verify_pole_structure(g, m):
        raise GenfunError(f"iterate_gf(k={p.k}, m={m}) has an unexpected denominator")
    return g


def verify_pole_structure(g: RationalSeries, m: int) -> bool:
    """True iff the denominator divides (1 - z^(2^m))^2 exactly."""
    _, r = _divmod(one_minus_power(1 << m, 2), list(g.denominator))
    return not r


# -- forward orbit generating functions --------------------------------------


def forward_gf(p: MapParam, n: int) -> Optional[RationalSeries]:
    """sum_j T^j(n) w^j for an eventually periodic orbit; None if capped."""
    traj = iterate(p, n)
    if not traj.resolved:
        return None
    pre = traj.entry_index
    vals = traj.states[:-1]
    q = len(vals) - pre
    num = [0] * len(vals)
    for j, v in enumerate(vals):
        num[j] += v
        if j < pre:
            num[j + q] -= v
    return RationalSeries.structured(num, q, 1, variable="w")


# -- backward orbit coefficient windows --------------------------------------


def backward_gf_window(p: MapParam, m: int, N: int, node_cap: int = 200_000) -> MembershipWindow:
    """0/1 coefficients of f_{k,m} on [1, N]; exact below ``exact_below``."""
    if m == 0:
        raise ValueError("the orbit of 0 is the fixed set {0}")
    sample = enumerate_backward(p, m, max(N, abs(m)), node_cap)
    members = set(sample.positive_members)
    bits = tuple(int(n in members) for n in range(1, N + 1))
    return MembershipWindow(p.k, 1, N, bits, min(sample.frontier_exhausted_below, N + 1))
