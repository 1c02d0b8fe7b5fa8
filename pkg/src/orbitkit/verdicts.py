"""Rationality verdicts on finite windows, SML zero patterns, natural
boundary certificates and the exceptional-set semi-algorithm.

Every verdict here is either a finite-window statement or a certificate
built from resolved forward orbits; nothing claims more than that.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from orbitkit.cycles import Cycle, classify, classify_range
from orbitkit.inverse import DisjointnessVerdict, Relation, trichotomy
from orbitkit.mapkernel import MapParam, inverse_step, iterate, t_apply
from orbitkit.residues import ResidueSet, closure_check, component_partition

CONSISTENT = "ConsistentWithRational"
INCONSISTENT = "InconsistentWithinWindow"
INCONCLUSIVE = "Inconclusive"

CERTIFIED = "certified"
UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class MembershipWindow:
    """Indicator of a set S on [lo, hi]; entries below exact_below are exact."""

    k: int
    lo: int
    hi: int
    bits: Tuple[int, ...]
    exact_below: int

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise ValueError("need 1 <= lo <= hi")
        if len(self.bits) != self.hi - self.lo + 1:
            raise ValueError("bits length does not match [lo, hi]")

    @classmethod
    def from_set(cls, k: int, members: Iterable[int], lo: int, hi: int, exact_below=None):
        s = set(members)
        bits = tuple(int(n in s) for n in range(lo, hi + 1))
        return cls(k, lo, hi, bits, hi + 1 if exact_below is None else exact_below)

    def bit(self, n: int) -> int:
        return self.bits[n - self.lo]

    @property
    def exact(self) -> bool:
        return self.exact_below > self.hi


@dataclass(frozen=True)
class RationalityVerdict:
    status: str
    X: Optional[ResidueSet] = None
    k0: Optional[int] = None
    witness_pair: Optional[Tuple[int, int]] = None
    closure_ok: bool = False

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "X": self.X.sorted() if self.X is not None else [],
            "k0": self.k0,
            "witness": list(self.witness_pair) if self.witness_pair else None,
            "closure_ok": self.closure_ok,
        }


def rationality_check(
    w: MembershipWindow, min_periods: int = 10, tail_fraction: float = 0.5
) -> RationalityVerdict:
    """Test whether the window looks like a union of classes mod |k| eventually.

    A class counts as eventually constant when its final constant run spans
    at least max(min_periods * |k|, tail_fraction * window length). The
    fractional part matters for sets closed under doubling: their last
    member below hi is always above hi / 2, so a sparse set never passes
    as eventually empty.
    """
    mod = abs(w.k)
    top = min(w.hi, w.exact_below - 1)
    length = top - w.lo + 1
    if length < min_periods * mod:
        return RationalityVerdict(INCONCLUSIVE)
    need = max(min_periods * mod, ceil(tail_fraction * length))

    final: Dict[int, int] = {}
    failed = None
    for a in range(mod):
        n = top - (top - a) % mod
        v = w.bit(n)
        final[a] = v
        while n - mod >= w.lo and w.bit(n - mod) == v:
            n -= mod
        # the constant run of this class covers [n, top]
        if top - n + 1 < need and n - mod >= w.lo:
            if failed is None or n > failed[1]:
                failed = (n - mod, n)
    if failed is not None:
        if w.exact:
            return RationalityVerdict(INCONSISTENT, witness_pair=failed)
        return RationalityVerdict(INCONCLUSIVE)

    X = ResidueSet.of(mod, (a for a, v in final.items() if v))
    k0 = w.lo
    for n in range(top, w.lo - 1, -1):
        if w.bit(n) != (n % mod in X.members):
            k0 = n + 1
            break
    return RationalityVerdict(CONSISTENT, X, k0, closure_ok=closure_check(X))


@dataclass(frozen=True)
class SMLMatch:
    d: int
    progressions: Tuple[int, ...]
    n0: int
    exceptions: FrozenSet[int]


def sml_pattern(
    zero_indices: Iterable[int], N: int, d_max: int, tail_fraction: float = 0.5
) -> Optional[SMLMatch]:
    """Least modulus d <= d_max for which the zero set on [1, N] is a union
    of full classes mod d above some n0; None when no modulus fits.

    The periodic part must cover at least tail_fraction of [1, N].
    """
    if N < 4 * d_max:
        raise ValueError("need N >= 4 * d_max")
    zeros = {n for n in zero_indices if 1 <= n <= N}
    floor_n0 = N - ceil(tail_fraction * N) + 1
    for d in range(1, d_max + 1):
        tops = {}
        for a in range(d):
            n = N - (N - a) % d
            if n >= 1:
                tops[a] = n in zeros
        n0 = 1
        ok = True
        for n in range(N, 0, -1):
            if (n in zeros) != tops[n % d]:
                if n >= floor_n0:
                    ok = False
                n0 = n + 1
                break
        if not ok:
            continue
        progs = tuple(sorted(a for a, z in tops.items() if z))
        below = {n for n in range(1, n0) if n % d in progs}
        exceptions = frozenset(below ^ {n for n in zeros if n < n0})
        return SMLMatch(d, progs, n0, exceptions)
    return None


# -- certificates and the exceptional set ------------------------------------


@dataclass(frozen=True)
class ComponentReport:
    component: ResidueSet
    status: str
    attractors: Tuple[int, ...] = ()
    exceptional: Tuple[int, ...] = ()
    branch: Optional[int] = None
    children: Tuple[int, ...] = ()
    representatives: Tuple[int, ...] = ()
    reason: str = ""

    @property
    def certificate_pairs(self) -> Tuple[Tuple[int, int], ...]:
        c = self.children
        return tuple((c[i], c[j]) for i in range(len(c)) for j in range(i + 1, len(c)))

    @property
    def label(self) -> int:
        return min(self.component.members)


@dataclass(frozen=True)
class ExceptionalSetReport:
    k: int
    components: Tuple[ComponentReport, ...]

    @property
    def E(self) -> Optional[Tuple[int, ...]]:
        if any(c.status != CERTIFIED for c in self.components):
            return None
        return tuple(sorted(x for c in self.components for x in c.exceptional))

    def to_json(self) -> dict:
        branched = [c for c in self.components if c.branch is not None]
        E = self.E
        return {
            "k": self.k,
            "E": list(E) if E is not None else None,
            "branch": branched[0].branch if len(branched) == 1 else None,
            "children": list(branched[0].children) if len(branched) == 1 else [],
            "components": [
                {
                    "residues": c.component.sorted(),
                    "status": c.status,
                    "attractors": list(c.attractors),
                    "exceptional": list(c.exceptional),
                    "branch": c.branch,
                    "children": list(c.children),
                    "reason": c.reason,
                }
                for c in self.components
            ],
        }


def _crossing_points(p: MapParam) -> Tuple[Tuple[int, int], ...]:
    """Pairs (x, T(x)) with x > 0 and T(x) < 0: the only places a forward
    path leaves the positive integers."""
    if p.k > 0:
        return ()
    return tuple(
        (x, t_apply(p, x)) for x in range(1, -p.k // 3 + 1, 2) if 3 * x + p.k < 0
    )


def positive_representative(p: MapParam, c: int) -> Optional[int]:
    """A positive element of the backward orbit of c, 0 if there is none,
    None if undecided within caps.

    For c < 0 the backward orbit meets the positives iff c is a forward
    iterate of some crossing point T(x), 0 < x < -k/3, which is a finite
    check.
    """
    if c > 0:
        return c
    undecided = False
    for x, q in _crossing_points(p):
        traj = iterate(p, q)
        if c in traj.orbit:
            return x
        if not traj.resolved:
            undecided = True
    return None if undecided else 0


def _component_report(p, comp, attractors, cycles, reps, bound) -> ComponentReport:
    if not attractors:
        return ComponentReport(comp, UNRESOLVED, reason="no attractor found below cycle_bound")
    if len(attractors) >= 2:
        return ComponentReport(
            comp,
            CERTIFIED,
            attractors=attractors,
            children=attractors,
            representatives=tuple(reps[a] for a in attractors),
        )

    (gen,) = attractors
    period = cycles[gen].elements
    on_cycle = set(period)
    exceptional = [x for x in period if x > 0]
    roots = [x for y in period for x in inverse_step(p, y) if x not in on_cycle]

    def positive_ones(nodes):
        out = []
        for x in nodes:
            r = positive_representative(p, x)
            if r is None:
                return None
            if r:
                out.append((x, r))
        return out

    pos = positive_ones(roots)
    if pos is None:
        return ComponentReport(comp, UNRESOLVED, (gen,), reason="subtree positivity undecided")
    branch = None
    while len(pos) == 1:
        node = pos[0][0]
        if abs(node) > bound:
            return ComponentReport(comp, UNRESOLVED, (gen,), reason="spine exceeds partner_search_bound")
        if node > 0:
            exceptional.append(node)
        branch = node
        pos = positive_ones(inverse_step(p, node))
        if pos is None:
            return ComponentReport(comp, UNRESOLVED, (gen,), reason="subtree positivity undecided")
    if not pos:
        return ComponentReport(comp, UNRESOLVED, (gen,), reason="no positive subtree found")
    if any(abs(x) > bound for x, _ in pos):
        return ComponentReport(comp, UNRESOLVED, (gen,), reason="branch children exceed partner_search_bound")
    return ComponentReport(
        comp,
        CERTIFIED,
        attractors=(gen,),
        exceptional=tuple(sorted(exceptional)),
        branch=branch,
        children=tuple(x for x, _ in pos),
        representatives=tuple(r for _, r in pos),
    )


@lru_cache(maxsize=32)
def _analyse(p: MapParam, cycle_bound: int, bound: int):
    discovered: List[Cycle] = []
    outcomes = classify_range(p, 1, cycle_bound, (), discovered)
    cycles = {c.cycle_id: c for c in discovered}
    reps: Dict[int, int] = {}
    for o in outcomes:
        if o.attracted and o.cycle_id not in reps:
            reps[o.cycle_id] = o.n
    partition = component_partition(p.k)
    reports = []
    for comp in partition.components:
        attractors = tuple(
            sorted((g for g in reps if g in comp), key=lambda g: (abs(g), g < 0))
        )
        reports.append(_component_report(p, comp, attractors, cycles, reps, bound))
    return ExceptionalSetReport(p.k, tuple(reports)), cycles


def exceptional_set(
    p: MapParam, cycle_bound: int = 1000, partner_search_bound: int = 1000
) -> ExceptionalSetReport:
    """Run the exceptional-set semi-algorithm with explicit caps.

    Per residue component: two or more attractors (reached from positive
    starts) certify every positive m; a single attractor forces a walk up
    the inverse tree to the first node with two positive subtrees, and the
    positive cycle and spine elements form the exceptional set.
    """
    if cycle_bound < 1 or partner_search_bound < 1:
        raise ValueError("bounds must be >= 1")
    return _analyse(p, cycle_bound, partner_search_bound)[0]


@dataclass(frozen=True)
class Certificate:
    m: int
    partner: int
    verdict: DisjointnessVerdict


def _structural_partners(p, m, report: ExceptionalSetReport, cycles) -> List[int]:
    comp_report = next(c for c in report.components if m in c.component)
    if comp_report.status != CERTIFIED:
        return []
    if len(comp_report.attractors) >= 2:
        own = classify(p, m, cycles.values()).cycle_id
        return [r for a, r in zip(comp_report.attractors, comp_report.representatives) if a != own]
    orbit = iterate(p, m).orbit
    children = comp_report.children
    for i, c in enumerate(children):
        if c in orbit:
            return [r for j, r in enumerate(comp_report.representatives) if j != i]
    return []


def natural_boundary_certificate(
    p: MapParam, m: int, partner_search_bound: int = 1000, cycle_bound: int = 1000
) -> Optional[Certificate]:
    """Find a positive m' in the same residue component whose backward orbit
    is disjoint from that of m; None when no partner is found.

    Partners suggested by the exceptional-set structure are tried first,
    then every m' <= partner_search_bound in increasing order.
    """
    if m < 1:
        raise ValueError("m must be positive")
    report, cycles = _analyse(p, cycle_bound, partner_search_bound)
    comp = next(c.component for c in report.components if m in c.component)
    tried = set()
    candidates = _structural_partners(p, m, report, cycles)
    candidates += range(1, partner_search_bound + 1)
    for c in candidates:
        if c == m or c in tried or c > partner_search_bound or c not in comp:
            continue
        tried.add(c)
        v = trichotomy(p, m, c)
        if v.relation == Relation.DISJOINT:
            return Certificate(m, c, v)
    return None
