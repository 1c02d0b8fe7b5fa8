"""Backward orbits: bounded enumeration, trichotomy verdicts, refinement.

Membership below the reported watermark is exact. A pruned breadth-first
search alone cannot promise that, because the odd preimage (2n - k)/3 is
smaller than n and a member can hide behind an excursion above the cap.
Two facts close the gap:

* a node divisible by 3 has only doubling preimages, so a pruned node
  that is a multiple of 3 hides nothing below the cap;
* otherwise a window forest (forward successor of every |x| <= W,
  jumping over excursions) decides membership by forward iteration.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from orbitkit.mapkernel import MapParam, Trajectory, inverse_step, iterate, t_apply

_TERMINAL = "terminal"  # resolved, but never returns to the window


@dataclass(frozen=True)
class OrbitSample:
    root: int
    positive_members: Tuple[int, ...]
    negative_members: Tuple[int, ...]
    frontier_exhausted_below: int
    depth_used: int
    n_cap: int

    @property
    def members(self) -> frozenset:
        return frozenset(self.positive_members) | frozenset(self.negative_members)

    @property
    def exact(self) -> bool:
        return self.frontier_exhausted_below > self.n_cap

    def contains(self, x: int) -> Optional[bool]:
        """Membership of x in the orbit; None when x is beyond the watermark."""
        if x in self.members:
            return True
        if abs(x) < self.frontier_exhausted_below:
            return False
        return None


class _WindowForest:
    """Forward successors of every 0 < |x| <= width, compressed so that the
    successor of x is its next iterate back inside the window."""

    def __init__(self, p: MapParam, width: int):
        self.width = width
        succ: Dict[int, object] = {}
        back: Dict[int, object] = {}  # out-of-window state -> return point
        for x in range(1, width + 1):
            for s in (x, -x):
                succ[s] = self._next_inside(p, s, back)
        self.children: Dict[int, List[int]] = {}
        stuck = []
        for x, y in succ.items():
            if y is None:
                stuck.append(x)
            elif y is not _TERMINAL:
                self.children.setdefault(y, []).append(x)
        self.unresolved_reach = self._descendants(stuck)

    def _next_inside(self, p, x, back):
        w = self.width
        y = t_apply(p, x)
        if abs(y) <= w:
            return y
        trail = []
        seen = set()
        result = None
        while True:
            if abs(y) <= w:
                result = y
                break
            if y in back:
                result = back[y]
                break
            if y in seen:
                result = _TERMINAL
                break
            if len(trail) >= p.max_steps or y.bit_length() > p.max_bits:
                result = None
                break
            seen.add(y)
            trail.append(y)
            y = t_apply(p, y)
        if result is not None:
            for z in trail:
                back[z] = result
        return result

    def _descendants(self, roots) -> set:
        out = set(roots)
        queue = deque(roots)
        while queue:
            y = queue.popleft()
            for x in self.children.get(y, ()):
                if x not in out:
                    out.add(x)
                    queue.append(x)
        return out

    def members(self, m: int) -> set:
        return self._descendants([m])


@lru_cache(maxsize=8)
def _forest(p: MapParam, width: int) -> _WindowForest:
    return _WindowForest(p, width)


def _degenerate_zero(n_cap: int) -> OrbitSample:
    return OrbitSample(0, (), (), n_cap + 1, 0, n_cap)


def enumerate_backward(
    p: MapParam, m: int, n_cap: int, node_cap: int = 200_000
) -> OrbitSample:
    """Members of the backward orbit of ``m`` with |x| <= n_cap.

    Breadth-first by increasing |x|. If every pruned node is a multiple of
    3 the search is already exhaustive; otherwise membership is certified
    on the window |x| <= min(n_cap, node_cap // 2) by forward iteration.
    """
    if n_cap < abs(m):
        raise ValueError("n_cap must be >= |m|")
    if node_cap < 1:
        raise ValueError("node_cap must be >= 1")
    if m == 0:
        return _degenerate_zero(n_cap)

    found = {m}
    depth = {m: 0}
    heap = [(abs(m), m < 0, m)]
    live = False
    expanded = 0
    while heap:
        if expanded >= node_cap:
            live = live or any(x % 3 for _, _, x in heap)
            break
        _, _, y = heapq.heappop(heap)
        expanded += 1
        for x in inverse_step(p, y):
            if x in found:
                continue
            if abs(x) > n_cap:
                live = live or x % 3 != 0
                continue
            found.add(x)
            depth[x] = depth[y] + 1
            heapq.heappush(heap, (abs(x), x < 0, x))

    watermark = n_cap + 1
    if live:
        width = min(n_cap, node_cap // 2)
        forest = _forest(p, width)
        inside = forest.members(m)
        found |= inside
        unknown = forest.unresolved_reach - inside
        watermark = min([abs(x) for x in unknown] + [width + 1])

    pos = tuple(sorted(x for x in found if x > 0))
    neg = tuple(sorted(x for x in found if x < 0))
    return OrbitSample(m, pos, neg, watermark, max(depth.values()), n_cap)


class Relation(str, Enum):
    DISJOINT = "Disjoint"
    NESTED_FIRST_IN_SECOND = "NestedFirstInSecond"
    NESTED_SECOND_IN_FIRST = "NestedSecondInFirst"
    EQUAL = "Equal"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class DisjointnessVerdict:
    m1: int
    m2: int
    relation: Relation
    path1: Tuple[int, ...] = ()
    path2: Tuple[int, ...] = ()

    @property
    def witness(self) -> str:
        def show(path):
            if len(path) > 12:
                return " -> ".join(map(str, path[:6])) + " -> ... -> " + " -> ".join(map(str, path[-3:]))
            return " -> ".join(map(str, path))

        return f"O+({self.m1}): {show(self.path1)}; O+({self.m2}): {show(self.path2)}"


def trichotomy(p: MapParam, m1: int, m2: int) -> DisjointnessVerdict:
    """Decide how the backward orbits of m1 and m2 sit relative to each other.

    m1 lies in the backward orbit of m2 exactly when m2 is a forward iterate
    of m1, so only the two (finite, resolved) forward orbits are needed.
    """
    t1, t2 = iterate(p, m1), iterate(p, m2)
    paths = (t1.states, t2.states)
    if not (t1.resolved and t2.resolved):
        return DisjointnessVerdict(m1, m2, Relation.UNRESOLVED, *paths)
    first_in_second = m2 in t1.orbit
    second_in_first = m1 in t2.orbit
    if first_in_second and second_in_first:
        rel = Relation.EQUAL
    elif first_in_second:
        rel = Relation.NESTED_FIRST_IN_SECOND
    elif second_in_first:
        rel = Relation.NESTED_SECOND_IN_FIRST
    else:
        rel = Relation.DISJOINT
    return DisjointnessVerdict(m1, m2, rel, *paths)


def fabry_case_check(p: MapParam, m: int, n_cap: int) -> bool:
    """True iff the backward orbit of m below n_cap is exactly {m * 2^j}."""
    if m <= 0 or m % 3:
        raise ValueError("m must be a positive multiple of 3")
    sample = enumerate_backward(p, m, n_cap)
    chain = []
    x = m
    while x <= n_cap:
        chain.append(x)
        x *= 2
    return sample.exact and sample.positive_members == tuple(chain) and not sample.negative_members


def refine_step(p: MapParam, m: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Split O^-(m) into disjoint sub-orbits plus a finite remainder.

    Returns (children, removed). For m off its cycle this is the preimage
    set of m and {m}. For m on a cycle the whole period is removed and the
    children are the off-cycle preimages of the period's elements.
    """
    traj = iterate(p, m)
    if not traj.resolved:
        raise ValueError(f"forward orbit of {m} is unresolved within caps")
    if traj.entry_index != 0:
        return inverse_step(p, m), (m,)
    period = traj.cycle
    on_cycle = set(period)
    children = tuple(x for y in period for x in inverse_step(p, y) if x not in on_cycle)
    return children, period


def partition_refine(p: MapParam, collection: Sequence[int], index: int = 0) -> List[int]:
    """Replace collection[index] by the roots of its refinement."""
    roots = list(collection)
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            rel = trichotomy(p, roots[i], roots[j]).relation
            if rel == Relation.UNRESOLVED:
                raise ValueError(f"trichotomy of {roots[i]}, {roots[j]} is unresolved")
            if rel != Relation.DISJOINT:
                raise ValueError(f"orbits of {roots[i]} and {roots[j]} are not disjoint")
    children, _ = refine_step(p, roots[index])
    return roots[:index] + list(children) + roots[index + 1:]
