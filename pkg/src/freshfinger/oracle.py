"""Ground-truth bound quantities computed from an access history.

Two independent routes are provided:

* module-level functions follow the definitions literally (window scans,
  explicit sets) and are meant for small inputs and tests;
* :class:`IncrementalOracle` keeps last-occurrence timestamps while a
  sequence is replayed and evaluates every key at once with numpy, which is
  what the harness uses at scale.

Conventions: time ``i`` is the index of the access being served, the
history holds ``a_1 .. a_{i-1}`` and the current key ``x = a_i`` is passed
separately. Working-set windows include ``a_i``. Logarithms are base 2 with
values at or below one clamped to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "History",
    "BoundBreakdown",
    "ff_log",
    "last_occurrence",
    "working_set_number",
    "working_set",
    "rank_distance",
    "finger_choice",
    "su_term",
    "rejected_bound",
    "theorem2_bound",
    "su_sum",
    "IncrementalOracle",
]


def ff_log(v: float) -> float:
    if v < 0:
        raise ValueError(f"ff_log of negative value {v}")
    if v <= 1:
        return 1.0
    return math.log2(v)


@dataclass(frozen=True)
class History:
    n: int
    accesses: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "accesses", tuple(self.accesses))
        for a in self.accesses:
            if not 1 <= a <= self.n:
                raise ValueError(f"access {a} outside [1, {self.n}]")

    @property
    def time(self) -> int:
        """Index of the next access."""
        return len(self.accesses) + 1

    def extend(self, x: int) -> "History":
        return History(self.n, self.accesses + (x,))


@dataclass(frozen=True)
class BoundBreakdown:
    w: int
    W_small: frozenset
    W_big: frozenset
    y: int
    su: float
    additive: float
    theorem2: float


def last_occurrence(h: History, x: int) -> float:
    """Steps back from time ``i`` to the previous access of ``x`` (inf if none)."""
    acc = h.accesses
    i = len(acc) + 1
    for j in range(1, i):
        if acc[i - j - 1] == x:
            return j
    return math.inf


def working_set_number(h: History, current: int, key: Optional[int] = None) -> int:
    """Working-set number of ``key`` (default: the current key) at time ``i``."""
    if key is None:
        key = current
    l = last_occurrence(h, key)
    if l == math.inf:
        return h.n
    i = h.time
    window = h.accesses[i - l:] + (current,)  # a_{i-l+1} .. a_i
    return len(set(window))


def working_set(h: History, current: int, j: float) -> frozenset:
    """All keys of S whose working-set number is at most ``j``."""
    return frozenset(
        z for z in range(1, h.n + 1) if working_set_number(h, current, z) <= j
    )


def rank_distance(T: Iterable[int], x: int, y: int) -> int:
    if x < y:
        return sum(1 for z in T if x < z <= y)
    return sum(1 for z in T if y < z <= x)


def finger_choice(h: History, current: int, T: Iterable[int], x: Optional[int] = None) -> int:
    """Argmin over ``T`` of ``w(y) + d_T(x, y)``; ties go to smaller w, then key."""
    if x is None:
        x = current
    T = frozenset(T)
    if not T:
        raise ValueError("finger_choice over an empty set")
    best = None
    for y in sorted(T):
        wy = working_set_number(h, current, y)
        cand = (wy + rank_distance(T, x, y), wy, y)
        if best is None or cand < best:
            best = cand
    return best[2]


def _value(h: History, current: int, T: frozenset) -> tuple[int, int]:
    y = finger_choice(h, current, T)
    return y, working_set_number(h, current, y) + rank_distance(T, current, y)


def su_term(h: History, x: int) -> float:
    w = working_set_number(h, x)
    big = working_set(h, x, min(w * w, h.n))
    return ff_log(_value(h, x, big)[1])


def rejected_bound(h: History, x: int) -> float:
    """The too-strong variant that measures distance inside W_i(w_i(x))."""
    w = working_set_number(h, x)
    small = working_set(h, x, w)
    return ff_log(_value(h, x, small)[1])


def theorem2_bound(h: History, x: int) -> BoundBreakdown:
    w = working_set_number(h, x)
    small = working_set(h, x, w)
    big = working_set(h, x, min(w * w, h.n))
    y, val = _value(h, x, big)
    su = ff_log(val)
    additive = ff_log(rank_distance(small, x, y)) * ff_log(ff_log(w))
    return BoundBreakdown(w, small, big, y, su, additive, su + additive)


def su_sum(n: int, sequence: Sequence[int]) -> float:
    total = 0.0
    h = History(n)
    for x in sequence:
        total += su_term(h, x)
        h = h.extend(x)
    return total


class IncrementalOracle:
    """Replays a sequence keeping, per key, the time of its latest access.

    The working-set number of ``y`` at time ``i`` is the number of keys whose
    latest access (counting ``a_i`` itself) is later than ``y``'s previous
    access; keys never seen get ``n``. Everything is evaluated over all of S
    in O(n log n) numpy work per query.
    """

    def __init__(self, n: int):
        self.n = n
        self.time = 0
        self._last = np.zeros(n + 1, dtype=np.int64)  # index 0 unused

    def observe(self, x: int) -> None:
        self.time += 1
        self._last[x] = self.time

    def working_set_numbers(self, x: int) -> np.ndarray:
        """w_i(y) for y = 1..n (index y-1) at the time ``x`` is accessed."""
        n = self.n
        prev = self._last[1:]
        current = prev.copy()
        current[x - 1] = self.time + 1
        ordered = np.sort(current)
        later = n - np.searchsorted(ordered, prev, side="right")
        return np.where(prev == 0, n, later)

    def bound(self, x: int, *, with_sets: bool = False) -> BoundBreakdown:
        """Breakdown for accessing ``x`` now; call before :meth:`observe`."""
        n = self.n
        w_all = self.working_set_numbers(x)
        w = int(w_all[x - 1])
        keys = np.arange(1, n + 1)
        big_mask = w_all <= min(w * w, n)
        small_mask = w_all <= w
        y, val = self._argmin(x, w_all, big_mask, keys)
        su = ff_log(val)
        cum_small = np.cumsum(small_mask)
        d_small = abs(int(cum_small[y - 1]) - int(cum_small[x - 1]))
        additive = ff_log(d_small) * ff_log(ff_log(w))
        if with_sets:
            small = frozenset(int(k) for k in keys[small_mask])
            big = frozenset(int(k) for k in keys[big_mask])
        else:
            small = big = frozenset()
        return BoundBreakdown(w, small, big, y, su, additive, su + additive)

    def rejected(self, x: int) -> float:
        w_all = self.working_set_numbers(x)
        w = int(w_all[x - 1])
        _, val = self._argmin(x, w_all, w_all <= w, np.arange(1, self.n + 1))
        return ff_log(val)

    @staticmethod
    def _argmin(x, w_all, mask, keys) -> tuple[int, int]:
        # d_T(x, y) = |#T<=y - #T<=x| for the half-open interval definition
        cum = np.cumsum(mask)
        d = np.abs(cum - cum[x - 1])
        # lexicographic (value, w, key) packed into one int64; all parts < 2n + 1
        base = 2 * len(keys) + 1
        packed = ((w_all + d) * base + w_all) * base + keys
        best = int(np.argmin(np.where(mask, packed, np.iinfo(np.int64).max)))
        return int(keys[best]), int(w_all[best] + d[best])
