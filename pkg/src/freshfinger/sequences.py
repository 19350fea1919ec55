"""Benchmark access sequences and the plain-text sequence file format.

File layout (UTF-8, LF)::

    n m
    # optional comment lines anywhere
    key_1
    ...
    key_m

Random kinds draw from numpy's PCG64 generator seeded with ``SequenceSpec.seed``,
which produces the same stream on every platform.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "KINDS",
    "PRNG_NAME",
    "SequenceSpec",
    "SequenceError",
    "generate",
    "write_file",
    "read_file",
    "read_header_spec",
]

KINDS = ("interleaved", "strided", "warmup_uniform", "uniform", "round_robin", "file")
PRNG_NAME = "numpy.random.PCG64"


class SequenceError(ValueError):
    pass


@dataclass(frozen=True)
class SequenceSpec:
    kind: str
    n: int
    m: int
    K: Optional[int] = None
    r: Optional[int] = None
    seed: int = 0
    path: Optional[str] = None

    def validate(self) -> None:
        kind, n, m = self.kind, self.n, self.m
        if kind not in KINDS:
            raise SequenceError(f"unknown kind {kind!r}; expected one of {KINDS}")
        if kind == "file":
            if not self.path:
                raise SequenceError("kind 'file' needs a path")
            return
        if n < 1:
            raise SequenceError(f"n must be positive, got {n}")
        if m < 0:
            raise SequenceError(f"m must be non-negative, got {m}")
        if kind == "interleaved":
            if n % 2:
                raise SequenceError(f"interleaved needs even n, got {n}")
            if m % n:
                raise SequenceError(f"interleaved needs n | m, got n={n}, m={m}")
        elif kind == "strided":
            K = self.K
            if K is None or K < 1:
                raise SequenceError("strided needs a positive K")
            if n % 2:
                raise SequenceError(f"strided needs even n, got {n}")
            if (n // 2) % K:
                raise SequenceError(f"strided needs K | n/2 (so K | n), got n={n}, K={K}")
            if (m * K) % n:
                raise SequenceError(f"strided needs n | m*K, got n={n}, m={m}, K={K}")
            if not n ** 0.25 <= K <= math.sqrt(n):
                warnings.warn(
                    f"K={K} outside the range n^(1/4) <= K <= sqrt(n) for n={n}",
                    stacklevel=3,
                )
        elif kind == "warmup_uniform":
            r = self.r
            if r is None or not 1 <= r <= n:
                raise SequenceError(f"warmup_uniform needs 1 <= r <= n, got r={r}")
            if m < 2 * r * math.log2(n):
                raise SequenceError(
                    f"warmup_uniform needs m >= 2 r log2 n = {2 * r * math.log2(n):g}, got m={m}"
                )

    def to_json(self) -> str:
        return json.dumps({k: v for k, v in asdict(self).items() if v is not None}, sort_keys=True)


def _repeat(cycle: Sequence[int], m: int) -> list[int]:
    reps = -(-m // len(cycle))
    return (list(cycle) * reps)[:m]


def generate(spec: SequenceSpec) -> list[int]:
    spec.validate()
    kind, n, m = spec.kind, spec.n, spec.m
    if kind == "file":
        return read_file(spec.path)[1]
    if kind == "interleaved":
        half = n // 2
        cycle = [v for i in range(1, half + 1) for v in (i, half + i)]
        return _repeat(cycle, m)
    if kind == "strided":
        half, K = n // 2, spec.K
        cycle = [v for i in range(K, half + 1, K) for v in (i, half + i)]
        return _repeat(cycle, m)
    if kind == "round_robin":
        return _repeat(range(1, n + 1), m)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if kind == "uniform":
        return rng.integers(1, n + 1, size=m).tolist()
    r = spec.r
    head = list(range(1, min(r, m) + 1))
    return head + rng.integers(1, r + 1, size=m - len(head)).tolist()


def write_file(path, n: int, sequence: Sequence[int], spec: Optional[SequenceSpec] = None) -> None:
    for x in sequence:
        if not 1 <= x <= n:
            raise SequenceError(f"key {x} outside [1, {n}]")
    lines = [f"{n} {len(sequence)}", f"# prng: {PRNG_NAME}"]
    if spec is not None:
        lines.append(f"# spec: {spec.to_json()}")
    lines.extend(str(x) for x in sequence)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _data_lines(text: str):
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def read_file(path) -> tuple[int, list[int]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = _data_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise SequenceError(f"{path}: missing 'n m' header") from None
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise SequenceError(f"{path}:{lineno}: malformed header {header!r}")
    n, m = int(parts[0]), int(parts[1])
    seq = []
    for lineno, line in lines:
        try:
            x = int(line)
        except ValueError:
            raise SequenceError(f"{path}:{lineno}: not an integer: {line!r}") from None
        if not 1 <= x <= n:
            raise SequenceError(f"{path}:{lineno}: key {x} outside [1, {n}]")
        seq.append(x)
    if len(seq) != m:
        raise SequenceError(f"{path}: header announces {m} keys, found {len(seq)}")
    return n, seq


def read_header_spec(path) -> Optional[dict]:
    """The generator spec recorded in a ``# spec:`` comment, if any."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# spec:"):
                return json.loads(line[len("# spec:"):])
            if line.strip() and not line.startswith("#") and " " not in line.strip():
                break
    return None
