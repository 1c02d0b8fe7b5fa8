"""The 3x+k map, its multivalued inverse and capped forward iteration.

All arithmetic is on Python ints, so iterates never overflow; runaway
trajectories are stopped by the step and bit caps carried in MapParam.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

ENTERED_CYCLE = "entered_cycle"
CAP_EXCEEDED = "cap_exceeded"


@dataclass(frozen=True)
class MapParam:
    """Parameter k of T_k together with iteration caps."""

    k: int
    max_steps: int = 100_000
    max_bits: int = 4096

    def __post_init__(self):
        if abs(self.k) % 6 not in (1, 5):
            raise ValueError(f"k must be congruent to +-1 mod 6, got {self.k}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.max_bits < 8:
            raise ValueError("max_bits must be >= 8")

    @property
    def modulus(self) -> int:
        return abs(self.k)


def as_param(p) -> MapParam:
    """Accept a MapParam or a bare k."""
    if isinstance(p, MapParam):
        return p
    return MapParam(int(p))


def t_apply(p: MapParam, n: int) -> int:
    if n & 1:
        return (3 * n + p.k) >> 1
    return n >> 1


def inverse_step(p: MapParam, n: int) -> Tuple[int, ...]:
    """All m with T_k(m) = n, doubling preimage first.

    The odd preimage (2n - k)/3 exists iff 3 divides 2n - k; it is then odd
    automatically because 2n - k is odd.
    """
    q, r = divmod(2 * n - p.k, 3)
    if r == 0 and q & 1:
        return (2 * n, q)
    return (2 * n,)


@dataclass(frozen=True)
class Trajectory:
    """Forward iterates of ``start`` until a repeat or a cap.

    When the outcome is ENTERED_CYCLE the last recorded state repeats
    ``states[entry_index]``, so ``states[entry_index:-1]`` is one period.
    """

    start: int
    states: Tuple[int, ...]
    outcome: str
    entry_index: Optional[int] = None

    @property
    def resolved(self) -> bool:
        return self.outcome == ENTERED_CYCLE

    @property
    def cycle(self) -> Tuple[int, ...]:
        if not self.resolved:
            return ()
        return self.states[self.entry_index:-1]

    @property
    def cycle_id(self) -> Optional[int]:
        # same rule as cycles.canonical_cycle, kept local to avoid an import cycle
        if not self.resolved:
            return None
        return min(self.cycle, key=lambda x: (abs(x), x < 0))

    @property
    def orbit(self) -> frozenset:
        """The forward orbit as a set (all distinct states seen)."""
        return frozenset(self.states)


def iterate(p: MapParam, n: int) -> Trajectory:
    seen = {n: 0}
    states = [n]
    x = n
    for step in range(1, p.max_steps + 1):
        x = t_apply(p, x)
        states.append(x)
        if x in seen:
            return Trajectory(n, tuple(states), ENTERED_CYCLE, seen[x])
        if x.bit_length() > p.max_bits:
            break
        seen[x] = step
    return Trajectory(n, tuple(states), CAP_EXCEEDED)


def conjugacy_negation_check(k: int, lo: int, hi: int) -> bool:
    """Check T_k(-n) == -T_{-k}(n) for every n in [lo, hi]."""
    p, q = MapParam(k), MapParam(-k)
    return all(t_apply(p, -n) == -t_apply(q, n) for n in range(lo, hi + 1))
