"""Replay access sequences through a structure and audit measured costs.

A run streams one trace row per access to CSV. Audited rows additionally
carry oracle values (working-set number and the fresh-finger bound terms),
and for fresh-finger structures the dictionary invariants are checked on
every audited row.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .baselines import SplayTree, StaticBST
from .hierarchy import EvictionPolicy, FreshFingerDict
from .oracle import IncrementalOracle
from .sequences import read_file, read_header_spec

__all__ = [
    "STRUCTURES",
    "FULL_AUDIT_LIMIT",
    "MIN_AUDIT_ROWS",
    "RunConfig",
    "TraceRow",
    "FitReport",
    "RunResult",
    "ConfigError",
    "InvariantViolationError",
    "InsufficientRowsError",
    "make_structure",
    "run",
    "fit",
    "audit",
    "read_trace",
    "compare",
    "format_table",
]

STRUCTURES = ("ff", "ff_p1", "ff_p3", "bst", "splay")
POLICIES = {
    "ff": EvictionPolicy.SKIP_REQUEUE,
    "ff_p1": EvictionPolicy.STRICT_FIFO,
    "ff_p3": EvictionPolicy.FULL_REFRESH,
}
FULL_AUDIT_LIMIT = 10_000
MIN_AUDIT_ROWS = 100


class ConfigError(ValueError):
    pass


class InvariantViolationError(RuntimeError):
    def __init__(self, index: int, violations):
        self.index = index
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations)
        super().__init__(f"invariant violation after access {index}:\n{lines}")


class InsufficientRowsError(ValueError):
    pass


@dataclass
class RunConfig:
    structure: str
    sequence: Optional[Sequence[int]] = None
    n: Optional[int] = None
    seq_path: Optional[str] = None
    audit_every: int = 1
    audit_head: int = 0
    trace_path: Optional[str] = None
    summary_path: Optional[str] = None
    check_invariants: bool = True
    sequence_spec: Optional[dict] = None

    def load(self) -> tuple[int, list[int], dict]:
        if self.structure not in STRUCTURES:
            raise ConfigError(f"unknown structure {self.structure!r}; expected one of {STRUCTURES}")
        if self.audit_every < 1:
            raise ConfigError(f"audit_every must be >= 1, got {self.audit_every}")
        if self.seq_path is not None:
            n, seq = read_file(self.seq_path)
            spec = dict(read_header_spec(self.seq_path) or {})
            spec.setdefault("path", str(self.seq_path))
        elif self.sequence is not None and self.n is not None:
            n, seq = self.n, list(self.sequence)
            spec = {}
        else:
            raise ConfigError("need either seq_path or both sequence and n")
        if self.sequence_spec:
            spec.update(self.sequence_spec)
        if len(seq) <= FULL_AUDIT_LIMIT and self.audit_every != 1:
            raise ConfigError(
                f"m={len(seq)} <= {FULL_AUDIT_LIMIT} requires a full audit (audit_every=1)"
            )
        spec.update(n=n, m=len(seq), sha256=_digest(n, seq))
        return n, seq, spec


def _digest(n: int, seq: Sequence[int]) -> str:
    h = hashlib.sha256(f"{n} {len(seq)}\n".encode())
    h.update(np.asarray(seq, dtype=np.int64).tobytes())
    return h.hexdigest()


@dataclass
class TraceRow:
    i: int
    key: int
    found_level: Optional[int]
    cmp_descent: int
    cmp_final: int
    cmp_restructure: int
    cmp_total: int
    w_i: Optional[int] = None
    su: Optional[float] = None
    additive: Optional[float] = None
    theorem2_bound: Optional[float] = None

    @property
    def audited(self) -> bool:
        return self.theorem2_bound is not None


TRACE_FIELDS = [f.name for f in fields(TraceRow)]
_INT_FIELDS = {"i", "key", "found_level", "cmp_descent", "cmp_final", "cmp_restructure", "cmp_total", "w_i"}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class FitReport:
    c1: Optional[float]
    c2: Optional[float]
    max_ratio: float
    rows: int
    avg_cost: float
    avg_bound: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    summary: dict
    audited: list[TraceRow]
    max_restructure_ratio: Optional[float]


def make_structure(name: str, n: int):
    if name in POLICIES:
        return FreshFingerDict(n, POLICIES[name])
    if name == "bst":
        return StaticBST(n)
    if name == "splay":
        return SplayTree(n)
    raise ConfigError(f"unknown structure {name!r}")


def fit(costs: Sequence[float], bounds: Sequence[float]) -> FitReport:
    """OLS of cost ~ c1 * bound + c2 plus the worst cost/bound ratio.

    ``c1``/``c2`` are ``None`` when all bounds coincide and the slope is
    undetermined.
    """
    cost = np.asarray(costs, dtype=float)
    bound = np.asarray(bounds, dtype=float)
    if len(cost) == 0:
        raise InsufficientRowsError("no audited rows")
    if np.ptp(bound) > 0:
        design = np.column_stack([bound, np.ones_like(bound)])
        (c1, c2), *_ = np.linalg.lstsq(design, cost, rcond=None)
        c1, c2 = float(c1), float(c2)
    else:
        c1 = c2 = None
    return FitReport(
        c1=c1,
        c2=c2,
        max_ratio=float(np.max(cost / bound)),
        rows=len(cost),
        avg_cost=float(cost.mean()),
        avg_bound=float(bound.mean()),
    )


def run(config: RunConfig) -> RunResult:
    """Replay the configured sequence; writes trace/summary files if paths are set."""
    n, seq, spec = config.load()
    name = config.structure
    ds = make_structure(name, n)
    is_ff = isinstance(ds, FreshFingerDict)
    oracle = IncrementalOracle(n)
    every, head = config.audit_every, config.audit_head

    totals = dict(
        accesses=0, comparisons=0, cmp_descent=0, cmp_final=0, cmp_restructure=0,
        restructure_steps=0, found_level_sum=0, audited_rows=0, invariant_checks=0,
        subset_violations=0,
    )
    audited: list[TraceRow] = []
    max_restructure_ratio = 0.0 if is_ff else None
    invariants_ok = True

    out = None
    writer = None
    if config.trace_path is not None:
        out = open(config.trace_path, "w", newline="", encoding="utf-8")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(TRACE_FIELDS)
    try:
        for i, x in enumerate(seq, start=1):
            is_audited = i <= head or i % every == 0
            bound = oracle.bound(x) if is_audited else None
            if is_ff:
                rec = ds.access(x)
                row = TraceRow(i, x, rec.found_level, rec.cmp_descent, rec.cmp_final,
                               rec.cmp_restructure, rec.cmp_total)
                totals["restructure_steps"] += rec.restructure_steps
                totals["found_level_sum"] += rec.found_level
                ratio = (rec.cmp_restructure + rec.restructure_steps) / rec.found_level
                if ratio > max_restructure_ratio:
                    max_restructure_ratio = ratio
            else:
                c = ds.access(x)
                row = TraceRow(i, x, None, 0, c, 0, c)
            oracle.observe(x)
            totals["accesses"] += 1
            totals["comparisons"] += row.cmp_total
            totals["cmp_descent"] += row.cmp_descent
            totals["cmp_final"] += row.cmp_final
            totals["cmp_restructure"] += row.cmp_restructure
            if bound is not None:
                row.w_i = bound.w
                row.su = bound.su
                row.additive = bound.additive
                row.theorem2_bound = bound.theorem2
                audited.append(row)
                totals["audited_rows"] += 1
                if is_ff and config.check_invariants:
                    totals["invariant_checks"] += 1
                    violations = ds.check_invariants()
                    if violations:
                        invariants_ok = False
                        subset = [v for v in violations if v.kind == "subset"]
                        fatal = [v for v in violations if v.kind != "subset"]
                        if name == "ff_p1":
                            totals["subset_violations"] += len(subset)
                        else:
                            fatal = violations
                        if fatal:
                            raise InvariantViolationError(i, fatal)
            if writer is not None:
                writer.writerow([_cell(getattr(row, f)) for f in TRACE_FIELDS])
    finally:
        if out is not None:
            out.close()

    m = max(totals["accesses"], 1)
    averages = {
        "avg_cmp": totals["comparisons"] / m,
        "avg_cmp_descent": totals["cmp_descent"] / m,
        "avg_cmp_final": totals["cmp_final"] / m,
        "avg_cmp_restructure": totals["cmp_restructure"] / m,
    }
    if is_ff:
        averages["avg_found_level"] = totals["found_level_sum"] / m
        averages["avg_restructure_steps"] = totals["restructure_steps"] / m
        totals["max_restructure_per_level"] = max_restructure_ratio
    if audited:
        averages["avg_theorem2_bound"] = float(np.mean([r.theorem2_bound for r in audited]))
        averages["avg_su"] = float(np.mean([r.su for r in audited]))
    if len(audited) >= MIN_AUDIT_ROWS:
        report = fit([r.cmp_total for r in audited], [r.theorem2_bound for r in audited])
        fit_dict = {"c1": report.c1, "c2": report.c2, "max_ratio": report.max_ratio}
    else:
        fit_dict = {"c1": None, "c2": None, "max_ratio": None}
    summary = {
        "structure": name,
        "sequence_spec": spec,
        "totals": totals,
        "averages": averages,
        "fit": fit_dict,
        "invariants_ok": invariants_ok if is_ff else None,
    }
    if config.summary_path is not None:
        Path(config.summary_path).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return RunResult(summary, audited, max_restructure_ratio)


def read_trace(path) -> list[TraceRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRACE_FIELDS:
            raise ValueError(f"{path}: unexpected trace header {reader.fieldnames}")
        for rec in reader:
            kw = {}
            for name in TRACE_FIELDS:
                cell = rec[name]
                if cell == "":
                    kw[name] = None
                elif name in _INT_FIELDS:
                    kw[name] = int(cell)
                else:
                    kw[name] = float(cell)
            rows.append(TraceRow(**kw))
    return rows


def audit(trace) -> FitReport:
    """Fit report over the audited rows of a trace file (or rows)."""
    rows = read_trace(trace) if isinstance(trace, (str, Path)) else list(trace)
    audited = [r for r in rows if r.audited]
    if len(audited) < MIN_AUDIT_ROWS:
        raise InsufficientRowsError(
            f"{len(audited)} audited rows; at least {MIN_AUDIT_ROWS} are needed"
        )
    return fit([r.cmp_total for r in audited], [r.theorem2_bound for r in audited])


def compare(summaries: Iterable[dict]) -> list[dict]:
    """Side-by-side averages; ratios are relative to the first summary."""
    summaries = list(summaries)
    if len(summaries) < 2:
        raise ValueError("compare needs at least two summaries")
    digests = {s["sequence_spec"].get("sha256") for s in summaries}
    if len(digests) != 1:
        raise ValueError("summaries were produced from different sequences")
    base = summaries[0]["averages"]["avg_cmp"]
    table = []
    for s in summaries:
        avg = s["averages"]["avg_cmp"]
        table.append({
            "structure": s["structure"],
            "avg_cmp": avg,
            "ratio": avg / base if base else math.nan,
            "max_ratio": s["fit"].get("max_ratio"),
            "invariants_ok": s.get("invariants_ok"),
        })
    return table


def format_table(table: list[dict]) -> str:
    head = f"{'structure':<10} {'avg_cmp':>10} {'ratio':>8} {'max_ratio':>10} {'invariants':>10}"
    lines = [head, "-" * len(head)]
    for row in table:
        mr = row["max_ratio"]
        lines.append(
            f"{row['structure']:<10} {row['avg_cmp']:>10.4f} {row['ratio']:>8.4f} "
            f"{'-' if mr is None else format(mr, '.4f'):>10} {str(row['invariants_ok']):>10}"
        )
    return "\n".join(lines)
