"""Bounded cycle search and classification of integers by attractor."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from orbitkit.mapkernel import MapParam, t_apply

POSITIVE = "positive"
ALL_INTEGERS = "all_integers"


def _generator_key(x: int):
    return (abs(x), x < 0)


@dataclass(frozen=True)
class Cycle:
    """One period of T_k, rotated to start at its generator."""

    elements: Tuple[int, ...]

    @property
    def generator(self) -> int:
        return self.elements[0]

    @property
    def cycle_id(self) -> int:
        return self.elements[0]

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.elements

    def is_closed(self, p: MapParam) -> bool:
        els = self.elements
        if len(set(els)) != len(els):
            return False
        return all(t_apply(p, els[i]) == els[(i + 1) % len(els)] for i in range(len(els)))


def canonical_cycle(elements: Sequence[int]) -> Cycle:
    """Rotate a period so it starts at the element of least |x|, positive on ties."""
    els = tuple(elements)
    if not els:
        raise ValueError("empty cycle")
    i = min(range(len(els)), key=lambda j: _generator_key(els[j]))
    return Cycle(els[i:] + els[:i])


@dataclass(frozen=True)
class CycleSearch:
    cycles: Tuple[Cycle, ...]
    capped: Tuple[int, ...] = ()

    def __iter__(self) -> Iterator[Cycle]:
        return iter(self.cycles)

    def __len__(self):
        return len(self.cycles)

    @property
    def generators(self) -> Tuple[int, ...]:
        return tuple(c.generator for c in self.cycles)


def _starts(bound: int, domain: str) -> Iterable[int]:
    if domain == POSITIVE:
        return range(1, bound + 1)
    if domain == ALL_INTEGERS:
        return sorted(range(-bound, bound + 1), key=_generator_key)
    raise ValueError(f"unknown domain {domain!r}")


def find_cycles(p: MapParam, search_bound: int, domain: str = POSITIVE) -> CycleSearch:
    """Every cycle reached from a start in the domain with |n| <= search_bound."""
    if search_bound < 1:
        raise ValueError("search_bound must be >= 1")
    done: Dict[int, int] = {}  # value -> generator of the cycle it falls into
    found: Dict[int, Cycle] = {}
    capped = []
    for n in _starts(search_bound, domain):
        if n in done:
            continue
        path = [n]
        index = {n: 0}
        x = n
        gen = None
        for _ in range(p.max_steps):
            x = t_apply(p, x)
            if x in done:
                gen = done[x]
                break
            if x in index:
                cyc = canonical_cycle(path[index[x]:])
                found[cyc.generator] = cyc
                gen = cyc.generator
                break
            if x.bit_length() > p.max_bits:
                break
            index[x] = len(path)
            path.append(x)
        if gen is None:
            capped.append(n)
            continue
        for y in path:
            done[y] = gen
    cycles = tuple(sorted(found.values(), key=lambda c: _generator_key(c.generator)))
    for c in cycles:
        assert c.is_closed(p), c
    return CycleSearch(cycles, tuple(capped))


@dataclass(frozen=True)
class ClassifyOutcome:
    n: int
    cycle_id: Optional[int] = None
    steps_to_entry: Optional[int] = None

    @property
    def attracted(self) -> bool:
        return self.cycle_id is not None


def _cycle_index(known: Iterable[Cycle]) -> Dict[int, int]:
    return {x: c.cycle_id for c in known for x in c.elements}


def classify(
    p: MapParam,
    n: int,
    known: Iterable[Cycle] = (),
    discovered: Optional[List[Cycle]] = None,
) -> ClassifyOutcome:
    """Forward-iterate ``n`` until it meets a known cycle.

    A cycle closed by the iteration that is not among ``known`` is
    appended to ``discovered`` (when given) and reported as the attractor.
    """
    return _classify(p, n, _cycle_index(known), discovered)


def _classify(p, n, cycle_of, discovered) -> ClassifyOutcome:
    if n in cycle_of:
        return ClassifyOutcome(n, cycle_of[n], 0)
    seen = {n: 0}
    path = [n]
    x = n
    for step in range(1, p.max_steps + 1):
        x = t_apply(p, x)
        if x.bit_length() > p.max_bits:
            break
        if x in cycle_of:
            return ClassifyOutcome(n, cycle_of[x], step)
        if x in seen:
            cyc = canonical_cycle(path[seen[x]:])
            for y in cyc.elements:
                cycle_of[y] = cyc.cycle_id
            if discovered is not None:
                discovered.append(cyc)
            return ClassifyOutcome(n, cyc.cycle_id, seen[x])
        seen[x] = step
        path.append(x)
    return ClassifyOutcome(n)


def classify_range(
    p: MapParam,
    lo: int,
    hi: int,
    known: Iterable[Cycle] = (),
    discovered: Optional[List[Cycle]] = None,
) -> List[ClassifyOutcome]:
    """classify() for every n in [lo, hi], sharing work between trajectories.

    The result equals independent classification against the known cycles
    plus any discovered along the way.
    """
    if hi < lo:
        raise ValueError("empty range")
    cycle_of = _cycle_index(known)
    if discovered is None:
        discovered = []
    memo: Dict[int, Tuple[int, int]] = {x: (cid, 0) for x, cid in cycle_of.items()}
    out = []
    for n in range(lo, hi + 1):
        if n in memo:
            cid, s = memo[n]
            out.append(ClassifyOutcome(n, cid, s))
            continue
        path = [n]
        seen = {n: 0}
        x = n
        hit = None
        for step in range(1, p.max_steps + 1):
            x = t_apply(p, x)
            if x.bit_length() > p.max_bits:
                break
            if x in memo:
                cid, s = memo[x]
                if step + s <= p.max_steps:
                    hit = (cid, step + s)
                break
            if x in seen:
                cyc = canonical_cycle(path[seen[x]:])
                discovered.append(cyc)
                for y in cyc.elements:
                    memo[y] = (cyc.cycle_id, 0)
                hit = (cyc.cycle_id, seen[x])
                break
            seen[x] = step
            path.append(x)
        if hit is None:
            out.append(ClassifyOutcome(n))
            continue
        cid, total = hit
        for j, y in enumerate(path):
            if y not in memo:
                memo[y] = (cid, total - j)
        out.append(ClassifyOutcome(n, cid, total))
    return out
