"""The fresh-finger dictionary: a stack of finger search trees with FIFO eviction.

Level ``j`` holds a tree ``T_j`` of capacity ``2**(2**j)`` (the last level
holds all of S) and, below the top, a queue ``Q_j`` recording the order in
which keys entered ``T_j``. An access searches the levels bottom-up, each
level starting from the predecessor/successor bracket found one level down,
then copies the key into every level it was missing from and evicts the
oldest queue entries that no longer fit.
"""

from __future__ import annotations

import enum
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .finger_tree import LEFT, RIGHT, FingerTree, Leaf

__all__ = [
    "EvictionPolicy",
    "LevelConfig",
    "AccessRecord",
    "Violation",
    "FreshFingerDict",
]


class EvictionPolicy(enum.Enum):
    STRICT_FIFO = "p1"
    """Dequeue the oldest entry, whatever lower levels still hold."""
    SKIP_REQUEUE = "p2"
    """Re-enqueue entries still resident one level down; refresh the found level."""
    FULL_REFRESH = "p3"
    """Move the accessed key to the back of every queue holding it (LRU levels)."""


@dataclass(frozen=True)
class LevelConfig:
    n: int
    k: int
    capacities: tuple[int, ...]

    @classmethod
    def for_n(cls, n: int) -> "LevelConfig":
        if n < 2:
            raise ValueError(f"n must be at least 2, got {n}")
        k = 1
        while 2 ** (2**k) < n:
            k += 1
        caps = tuple(2 ** (2**j) for j in range(1, k)) + (n,)
        return cls(n, k, caps)

    def capacity(self, j: int) -> int:
        if not 1 <= j <= self.k:
            raise ValueError(f"level {j} outside [1, {self.k}]")
        return self.capacities[j - 1]


@dataclass
class AccessRecord:
    index: int
    key: int
    found_level: int
    cmp_descent: int
    cmp_final: int
    cmp_restructure: int
    restructure_steps: int

    @property
    def cmp_total(self) -> int:
        return self.cmp_descent + self.cmp_final + self.cmp_restructure


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


class FreshFingerDict:
    """Static dictionary over {1..n} with the fresh-finger access procedure.

    Lower levels start empty and fill lazily. ``members`` is the key
    directory's level bitset (bit ``j-1`` for level ``j``); per-level handle
    maps give each resident key's leaf, and the queue entries are the keys
    themselves inside an ``OrderedDict``.
    """

    def __init__(self, n: int, policy: EvictionPolicy = EvictionPolicy.SKIP_REQUEUE):
        self.config = LevelConfig.for_n(n)
        self.policy = EvictionPolicy(policy)
        self.n = n
        k = self.k = self.config.k
        if k > 8:
            raise ValueError(f"n={n} needs {k} levels; at most 8 are supported")
        self.trees = [FingerTree() for _ in range(k - 1)]
        top = FingerTree.build(range(1, n + 1))
        self.trees.append(top)
        self.queues: list[OrderedDict] = [OrderedDict() for _ in range(k - 1)]
        self.handles: list[dict[int, Leaf]] = [{} for _ in range(k - 1)]
        self.top_handles: list[Optional[Leaf]] = [None, *top.leaves()]
        self.members = bytearray([1 << (k - 1)]) * (n + 1)
        self.members[0] = 0
        self.time = 0

    def _handle(self, j: int, key: int) -> Optional[Leaf]:
        if j == self.k:
            return self.top_handles[key]
        return self.handles[j - 1].get(key)

    def found_level_floor(self, j: int) -> int:
        """Working-set floor implied by finding a key first at level ``j``."""
        if not 2 <= j <= self.k:
            raise ValueError(f"level {j} outside [2, {self.k}]")
        return self.config.capacity(j - 1)

    def access(self, x: int) -> AccessRecord:
        if not 1 <= x <= self.n:
            raise ValueError(f"key {x} outside [1, {self.n}]")
        self.time += 1
        k = self.k
        descent = final = 0
        pred_key = succ_key = None
        path = []
        found_level = k
        for j in range(1, k + 1):
            tree = self.trees[j - 1]
            if tree.root is None:
                path.append((j, None, None))
                continue
            ph = self._handle(j, pred_key) if pred_key is not None else None
            sh = self._handle(j, succ_key) if succ_key is not None else None
            if ph is not None and sh is not None:
                res = tree.dovetail_search(ph, sh, x, bracketed=True)
            elif ph is not None:
                res = tree.finger_search(ph, x, RIGHT)
            elif sh is not None:
                res = tree.finger_search(sh, x, LEFT)
            else:
                res = tree.finger_search(tree.any_handle(), x)
            if res.found is not None:
                final = res.comparisons
                found_level = j
                break
            descent += res.comparisons
            path.append((j, res.pred, res.succ))
            pred_key = res.pred.key if res.pred is not None else None
            succ_key = res.succ.key if res.succ is not None else None
        else:
            raise AssertionError(f"key {x} missing from the top level")
        steps = self._restructure(x, found_level, path)
        return AccessRecord(self.time, x, found_level, descent, final, 0, steps)

    def _restructure(self, x: int, found_level: int, path) -> int:
        steps = 0
        members = self.members
        lower = self.trees[: found_level - 1]
        rebalanced = sum(t.rebalance_steps for t in lower)
        for j, pred, succ in path:
            tree = self.trees[j - 1]
            if pred is not None:
                leaf = tree.insert_after(pred, x)
            elif succ is not None:
                leaf = tree.insert_before(succ, x)
            else:
                leaf = tree.insert_first(x)
            self.handles[j - 1][x] = leaf
            members[x] |= 1 << (j - 1)
            self.queues[j - 1][x] = None
            steps += 2

        policy = self.policy
        if found_level < self.k:
            if policy is EvictionPolicy.SKIP_REQUEUE:
                self.queues[found_level - 1].move_to_end(x)
                steps += 1
            elif policy is EvictionPolicy.FULL_REFRESH:
                for j in range(found_level, self.k):
                    self.queues[j - 1].move_to_end(x)
                    steps += 1

        guarded = policy is not EvictionPolicy.STRICT_FIFO
        for j in range(1, found_level):
            queue = self.queues[j - 1]
            cap = self.config.capacities[j - 1]
            if len(queue) <= cap:
                continue
            tree = self.trees[j - 1]
            below = 1 << (j - 2) if j >= 2 else 0
            bit = 1 << (j - 1)
            while len(queue) > cap:
                y, _ = queue.popitem(last=False)
                steps += 1
                if guarded and members[y] & below:
                    queue[y] = None
                    continue
                tree.delete(self.handles[j - 1].pop(y))
                members[y] &= ~bit
                steps += 1
        return steps + sum(t.rebalance_steps for t in lower) - rebalanced

    def check_invariants(self, deep: bool = False) -> list[Violation]:
        """Audit capacities, queue/tree agreement, subset chain and directory.

        The top tree is static, so only its size is checked unless ``deep``.
        Subset-chain breaches are reported under kind ``"subset"`` for every
        policy; strict FIFO is expected to produce them.
        """
        out: list[Violation] = []
        k, n = self.k, self.n
        members = np.frombuffer(bytes(self.members), dtype=np.uint8)
        keysets = []
        for j in range(1, k):
            tree = self.trees[j - 1]
            cap = self.config.capacity(j)
            if tree.size() > cap:
                out.append(Violation("capacity", f"|T_{j}| = {tree.size()} > {cap}"))
            tree_keys = tree.keys()
            keyset = set(tree_keys)
            keysets.append(keyset)
            if keyset != set(self.queues[j - 1]):
                out.append(Violation("queue", f"Q_{j} and T_{j} hold different keys"))
            handles = self.handles[j - 1]
            if set(handles) != keyset:
                out.append(Violation("directory", f"handle map of level {j} disagrees with T_{j}"))
            for key, leaf in handles.items():
                if leaf.tree is not tree or leaf.key != key:
                    out.append(Violation("directory", f"stale handle for {key} at level {j}"))
            flagged = set(np.flatnonzero(members & (1 << (j - 1))).tolist())
            if flagged != keyset:
                bad = sorted(flagged ^ keyset)[:5]
                out.append(Violation("directory", f"level {j} bit wrong for keys {bad}"))
            for problem in tree.validate():
                out.append(Violation("structure", f"T_{j}: {problem}"))
        for j in range(1, k - 1):
            extra = keysets[j - 1] - keysets[j]
            if extra:
                out.append(
                    Violation("subset", f"T_{j} has {len(extra)} keys missing from T_{j + 1}, e.g. {min(extra)}")
                )
        top = self.trees[-1]
        top_bit = 1 << (k - 1)
        if not np.all(members[1:] & top_bit):
            out.append(Violation("directory", f"level {k} bit cleared for some key"))
        if top.size() != n:
            out.append(Violation("top", f"|T_{k}| = {top.size()} != {n}"))
        if deep:
            if top.keys() != list(range(1, n + 1)):
                out.append(Violation("top", f"T_{k} differs from S"))
            for problem in top.validate():
                out.append(Violation("structure", f"T_{k}: {problem}"))
        return out

    def level_keys(self, j: int) -> list[int]:
        return self.trees[j - 1].keys()
