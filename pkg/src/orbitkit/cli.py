"""Command line entry point: ``orbitkit <command> --k <int> ...``.

Exit status: 0 on success, 1 on a precondition violation or usage error,
2 when --strict is set and some result is cap-limited (Unresolved).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import List, Optional

from orbitkit.census import CacheError, RunConfig, cache_load, cache_store, census
from orbitkit.cycles import ALL_INTEGERS, POSITIVE, classify_range, find_cycles
from orbitkit.genfun import backward_gf_window, forward_gf, iterate_gf, verify_pole_structure
from orbitkit.inverse import enumerate_backward, partition_refine, refine_step, trichotomy
from orbitkit.mapkernel import MapParam
from orbitkit.residues import commutator_check, component_partition, residue_component
from orbitkit.verdicts import (
    CERTIFIED,
    INCONCLUSIVE,
    MembershipWindow,
    exceptional_set,
    natural_boundary_certificate,
    rationality_check,
    sml_pattern,
)

CACHE_ENV = "ORBITKIT_CACHE"


class _Unresolved(Exception):
    pass


def _int_list(text: str) -> List[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _common() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--max-steps", type=int, default=100_000)
    g.add_argument("--max-bits", type=int, default=4096)
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("--out")
    g.add_argument("--cache")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--strict", action="store_true")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="orbitkit", description="Experiments with 3x+k maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        return sub.add_parser(name, parents=[common], help=help)

    s = add("cycles", "bounded cycle search")
    s.add_argument("--bound", type=int, default=1000)
    s.add_argument("--domain", choices=(POSITIVE, ALL_INTEGERS), default=POSITIVE)

    s = add("classify", "attractor of each n in [lo, hi]")
    s.add_argument("--lo", type=int, default=1)
    s.add_argument("--hi", type=int, default=100)

    s = add("inverse-orbit", "enumerate a backward orbit")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n-cap", type=int, default=1000)
    s.add_argument("--node-cap", type=int, default=200_000)

    s = add("trichotomy", "relation between two backward orbits")
    s.add_argument("--m1", type=int, required=True)
    s.add_argument("--m2", type=int, required=True)

    s = add("residues", "bi-invariant residue components mod |k|")
    s.add_argument("--a", type=int)

    for name, help in (("rationality-check", "finite-window rationality verdict"),
                       ("sml", "zero-pattern detector on a backward-orbit window")):
        s = add(name, help)
        s.add_argument("--m", type=_int_list, required=True, help="orbit roots, comma separated")
        s.add_argument("--n", type=int, default=10_000, help="window [1, n]")
        if name == "rationality-check":
            s.add_argument("--min-periods", type=int, default=10)
        else:
            s.add_argument("--d-max", type=int, default=64)

    s = add("certify", "natural-boundary certificate for f_{k,m}")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--bound", type=int, default=1000)

    s = add("exceptional-set", "run the exceptional-set semi-algorithm")
    s.add_argument("--cycle-bound", type=int, default=1000)
    s.add_argument("--partner-bound", type=int, default=1000)

    s = add("genfun-iterate", "m-th iterate generating function")
    s.add_argument("--m", type=int, required=True)

    s = add("genfun-forward", "forward orbit generating function")
    s.add_argument("--n", type=int, required=True)

    s = add("orbit-window", "0/1 coefficient window of f_{k,m}")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, default=1000)

    s = add("census", "attractor census with block statistics")
    s.add_argument("--lo", type=int, default=1)
    s.add_argument("--hi", type=int, default=1000)
    s.add_argument("--block", type=int, default=1000)
    s.add_argument("--workers", type=int, default=1)

    s = add("refine", "split one root of a disjoint collection")
    s.add_argument("--roots", type=_int_list, required=True)
    s.add_argument("--index", type=int, default=0)
    return parser


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _union_window(p: MapParam, roots, n: int) -> MembershipWindow:
    windows = [backward_gf_window(p, m, n) for m in roots]
    bits = tuple(int(any(b)) for b in zip(*(w.bits for w in windows)))
    return MembershipWindow(p.k, 1, n, bits, min(w.exact_below for w in windows))


def run(args) -> tuple:
    """Execute a parsed command; returns (payload, csv_text or None)."""
    p = MapParam(args.k, args.max_steps, args.max_bits)
    cmd = args.command
    unresolved = False

    if cmd == "cycles":
        res = find_cycles(p, args.bound, args.domain)
        payload = [{"generator": str(c.generator), "elements": [str(x) for x in c.elements]} for c in res]
        unresolved = bool(res.capped)
        text = _rows_csv(["generator", "length", "elements"],
                         [[c.generator, len(c), " ".join(map(str, c.elements))] for c in res])
    elif cmd == "classify":
        outs = classify_range(p, args.lo, args.hi)
        payload = [{"n": o.n, "cycle": None if o.cycle_id is None else str(o.cycle_id),
                    "steps_to_entry": o.steps_to_entry} for o in outs]
        unresolved = any(not o.attracted for o in outs)
        text = _rows_csv(["n", "cycle", "steps_to_entry"],
                         [[o.n, "Unresolved" if o.cycle_id is None else o.cycle_id, o.steps_to_entry] for o in outs])
    elif cmd == "inverse-orbit":
        s = enumerate_backward(p, args.m, args.n_cap, args.node_cap)
        payload = {"root": str(s.root),
                   "positive": [str(x) for x in s.positive_members],
                   "negative": [str(x) for x in s.negative_members],
                   "exact_below": s.frontier_exhausted_below, "depth": s.depth_used}
        unresolved = not s.exact
        text = None
    elif cmd == "trichotomy":
        v = trichotomy(p, args.m1, args.m2)
        payload = {"m1": v.m1, "m2": v.m2, "relation": v.relation.value, "witness": v.witness}
        unresolved = v.relation.value == "Unresolved"
        text = None
    elif cmd == "residues":
        if args.a is not None:
            comps = [residue_component(p.k, args.a)]
        else:
            comps = list(component_partition(p.k).components)
        payload = {"modulus": p.modulus, "components": [c.sorted() for c in comps],
                   "commutator_ok": commutator_check(p.k, 0, depth=100, seed=args.seed)}
        text = None
    elif cmd == "rationality-check":
        w = _union_window(p, args.m, args.n)
        v = rationality_check(w, args.min_periods)
        payload = v.to_json()
        payload["exact_below"] = w.exact_below
        unresolved = v.status == INCONCLUSIVE
        text = None
    elif cmd == "sml":
        w = _union_window(p, args.m, args.n)
        top = min(w.hi, w.exact_below - 1)
        zeros = [n for n in range(1, top + 1) if not w.bit(n)]
        match = sml_pattern(zeros, top, args.d_max)
        if match is None:
            payload = {"status": "NoMatch"}
        else:
            payload = {"status": "Match", "d": match.d, "progressions": list(match.progressions),
                       "n0": match.n0, "exceptions": sorted(match.exceptions)}
        text = None
    elif cmd == "certify":
        cert = natural_boundary_certificate(p, args.m, args.bound)
        if cert is None:
            payload = {"m": args.m, "status": "NoCertificateFound"}
        else:
            payload = {"m": args.m, "status": "Certificate", "partner": cert.partner,
                       "witness": cert.verdict.witness}
        text = None
    elif cmd == "exceptional-set":
        report = exceptional_set(p, args.cycle_bound, args.partner_bound)
        payload = report.to_json()
        unresolved = any(c.status != CERTIFIED for c in report.components)
        text = None
    elif cmd == "genfun-iterate":
        g = iterate_gf(p, args.m)
        payload = g.to_json()
        payload["poles_ok"] = verify_pole_structure(g, args.m)
        payload["text"] = str(g)
        text = None
    elif cmd == "genfun-forward":
        h = forward_gf(p, args.n)
        if h is None:
            payload = {"status": "Unresolved"}
            unresolved = True
        else:
            payload = h.to_json()
            payload["text"] = str(h)
        text = None
    elif cmd == "orbit-window":
        w = backward_gf_window(p, args.m, args.n)
        payload = {"k": p.k, "m": args.m, "n": args.n, "exact_below": w.exact_below,
                   "coefficients": list(w.bits)}
        unresolved = not w.exact
        text = _rows_csv(["n", "coefficient"], [[n, w.bit(n)] for n in range(1, args.n + 1)])
    elif cmd == "census":
        cfg = RunConfig(p.k, args.lo, args.hi, args.block, p.max_steps, p.max_bits,
                        args.format, args.cache, args.workers)
        table = _census_cached(cfg, os.environ.get(CACHE_ENV) or args.cache)
        payload = table.to_json()
        unresolved = any(l is None for l in table.labels)
        text = table.to_csv()
    elif cmd == "refine":
        new = partition_refine(p, args.roots, args.index)
        _, removed = refine_step(p, args.roots[args.index])
        payload = {"roots": new, "removed": list(removed)}
        text = None
    else:  # pragma: no cover - argparse rejects unknown commands
        raise ValueError(f"unknown command {cmd}")
    if unresolved and args.strict:
        raise _Unresolved(payload, text)
    return payload, text


def _census_cached(cfg: RunConfig, path: Optional[str]):
    caps = (cfg.max_steps, cfg.max_bits)
    if path and os.path.exists(path):
        table = cache_load(path, cfg.k, caps)
        if (table.lo, table.hi, table.block_size) == (cfg.lo, cfg.hi, cfg.block_size):
            return table
    table = census(cfg)
    if path:
        cache_store(path, table)
    return table


def _emit(payload, text, args):
    if args.format == "csv":
        if text is None:
            raise ValueError(f"--format csv is not available for {args.command}")
        out = text
    else:
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        payload, text = run(args)
    except _Unresolved as exc:
        _emit(*exc.args, args)
        return 2
    except (ValueError, CacheError) as exc:
        print(f"orbitkit: error: {exc}", file=sys.stderr)
        return 1
    try:
        _emit(payload, text, args)
    except ValueError as exc:
        print(f"orbitkit: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
