"""Attractor census over a range of integers, with block statistics and a
versioned on-disk cache.

Per block we report, for each attractor, its count and density, plus two
interlacing measures: the number of maximal constant-label runs and the
number of adjacent label changes (runs = changes + 1).
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from orbitkit.cycles import classify_range
from orbitkit.mapkernel import MapParam

FORMAT_VERSION = 1
UNRESOLVED_LABEL = "Unresolved"


class CacheError(ValueError):
    """A cache file is corrupt, truncated, or built under other parameters."""


@dataclass(frozen=True)
class RunConfig:
    k: int
    lo: int = 1
    hi: int = 1000
    block_size: int = 1000
    max_steps: int = 100_000
    max_bits: int = 4096
    fmt: str = "json"
    cache: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError("empty range")
        if min(self.block_size, self.max_steps, self.max_bits, self.workers) < 1:
            raise ValueError("caps, block size and workers must be positive")
        self.param  # validates k

    @property
    def param(self) -> MapParam:
        return MapParam(self.k, self.max_steps, self.max_bits)


@dataclass(frozen=True)
class BlockStats:
    start: int
    end: int
    counts: Tuple[Tuple[int, int], ...]
    unresolved: int
    runs: int
    alternations: int

    @property
    def size(self) -> int:
        return self.end - self.start + 1

    @property
    def densities(self) -> Dict[int, float]:
        return {label: c / self.size for label, c in self.counts}

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "counts": {str(l): c for l, c in self.counts},
            "densities": {str(l): d for l, d in self.densities.items()},
            "unresolved": self.unresolved,
            "runs": self.runs,
            "alternations": self.alternations,
        }


def block_stats(start: int, labels: Sequence[Optional[int]]) -> BlockStats:
    counts: Dict[int, int] = {}
    unresolved = 0
    for lab in labels:
        if lab is None:
            unresolved += 1
        else:
            counts[lab] = counts.get(lab, 0) + 1
    changes = sum(1 for a, b in zip(labels, labels[1:]) if a != b)
    return BlockStats(
        start,
        start + len(labels) - 1,
        tuple(sorted(counts.items(), key=lambda kv: (abs(kv[0]), kv[0] < 0))),
        unresolved,
        changes + 1,
        changes,
    )


@dataclass(frozen=True)
class CensusTable:
    k: int
    lo: int
    hi: int
    block_size: int
    labels: Tuple[Optional[int], ...]
    per_block: Tuple[BlockStats, ...]
    caps: Tuple[int, int] = (100_000, 4096)

    @classmethod
    def build(cls, k, lo, block_size, labels, caps=(100_000, 4096)):
        labels = tuple(labels)
        blocks = tuple(
            block_stats(lo + i, labels[i:i + block_size])
            for i in range(0, len(labels), block_size)
        )
        return cls(k, lo, lo + len(labels) - 1, block_size, labels, blocks, tuple(caps))

    def block_of(self, n: int) -> int:
        return (n - self.lo) // self.block_size

    def rows(self):
        for i, lab in enumerate(self.labels):
            n = self.lo + i
            yield n, lab, self.block_of(n)

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "k": self.k,
            "range": [self.lo, self.hi],
            "caps": {"max_steps": self.caps[0], "max_bits": self.caps[1]},
            "block_size": self.block_size,
            "labels": [UNRESOLVED_LABEL if l is None else str(l) for l in self.labels],
            "per_block": [b.to_json() for b in self.per_block],
        }

    @classmethod
    def from_json(cls, d: dict) -> "CensusTable":
        labels = [None if l == UNRESOLVED_LABEL else int(l) for l in d["labels"]]
        caps = (d["caps"]["max_steps"], d["caps"]["max_bits"])
        return cls.build(d["k"], d["range"][0], d["block_size"], labels, caps)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "label", "block"])
        for n, lab, blk in self.rows():
            w.writerow([n, UNRESOLVED_LABEL if lab is None else lab, blk])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, k: int, caps=(100_000, 4096)) -> "CensusTable":
        reader = csv.DictReader(io.StringIO(text))
        rows = [(int(r["n"]), r["label"], int(r["block"])) for r in reader]
        if not rows:
            raise ValueError("empty census CSV")
        lo = rows[0][0]
        block_size = sum(1 for r in rows if r[2] == 0)
        labels = [None if lab == UNRESOLVED_LABEL else int(lab) for _, lab, _ in rows]
        return cls.build(k, lo, block_size, labels, caps)


def _labels(args) -> List[Optional[int]]:
    p, lo, hi = args
    return [o.cycle_id for o in classify_range(p, lo, hi)]


def census(cfg: RunConfig) -> CensusTable:
    p = cfg.param
    if cfg.workers == 1:
        labels = _labels((p, cfg.lo, cfg.hi))
    else:
        total = cfg.hi - cfg.lo + 1
        step = -(-total // cfg.workers)
        shards = [(p, a, min(a + step - 1, cfg.hi)) for a in range(cfg.lo, cfg.hi + 1, step)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            labels = [lab for part in pool.map(_labels, shards) for lab in part]
    return CensusTable.build(cfg.k, cfg.lo, cfg.block_size, labels, (cfg.max_steps, cfg.max_bits))


# -- cache: one record per line, "<byte length>:<json>" ----------------------


def _record(obj) -> str:
    data = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return f"{len(data.encode())}:{data}\n"


def cache_store(path: str, table: CensusTable) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "k": table.k,
        "caps": {"max_steps": table.caps[0], "max_bits": table.caps[1]},
        "range": [table.lo, table.hi],
        "block_size": table.block_size,
    }
    lines = [_record(header)]
    lines += [_record([n, lab]) for n, lab, _ in table.rows()]
    lines += [_record({"block": b.to_json()}) for b in table.per_block]
    lines.append(_record({"end": {"rows": len(table.labels), "blocks": len(table.per_block)}}))
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.writelines(lines)
    os.replace(tmp, path)


def _read_records(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CacheError(f"cannot read cache {path}: {exc}") from exc
    if not raw.endswith("\n"):
        raise CacheError("cache truncated: missing final newline")
    out = []
    for i, line in enumerate(raw[:-1].split("\n")):
        size, sep, data = line.partition(":")
        if not sep or not size.isdigit() or int(size) != len(data.encode()):
            raise CacheError(f"cache record {i} is corrupt")
        try:
            out.append(json.loads(data))
        except json.JSONDecodeError as exc:
            raise CacheError(f"cache record {i} is not valid JSON") from exc
    return out


def cache_load(
    path: str,
    k: Optional[int] = None,
    caps: Optional[Tuple[int, int]] = None,
) -> CensusTable:
    """Load a cached table, refusing one built for another k or other caps."""
    records = _read_records(path)
    if len(records) < 2 or not isinstance(records[0], dict) or "end" not in records[-1]:
        raise CacheError("cache truncated or missing header/footer")
    header, footer = records[0], records[-1]["end"]
    if header.get("format_version") != FORMAT_VERSION:
        raise CacheError(f"unsupported cache format {header.get('format_version')}")
    if k is not None and header["k"] != k:
        raise CacheError(f"cache built for k={header['k']}, not k={k}")
    stored_caps = (header["caps"]["max_steps"], header["caps"]["max_bits"])
    if caps is not None and tuple(caps) != stored_caps:
        raise CacheError(f"cache built under caps {stored_caps}, not {tuple(caps)}")
    rows = [r for r in records[1:-1] if isinstance(r, list)]
    blocks = [r["block"] for r in records[1:-1] if isinstance(r, dict) and "block" in r]
    if len(rows) != footer["rows"] or len(blocks) != footer["blocks"]:
        raise CacheError("cache row/block count does not match footer")
    lo, hi = header["range"]
    if [n for n, _ in rows] != list(range(lo, hi + 1)):
        raise CacheError("cache rows do not cover the stated range")
    table = CensusTable.build(header["k"], lo, header["block_size"], [lab for _, lab in rows], stored_caps)
    if [b.to_json() for b in table.per_block] != blocks:
        raise CacheError("cached block statistics disagree with labels")
    return table
