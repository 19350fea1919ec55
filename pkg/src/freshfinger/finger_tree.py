"""Level-linked (2,4)-tree with finger search and comparison accounting.

Keys live in leaves. Every node knows its parent, its neighbours on the same
level and the smallest/largest key below it, which is what lets a search
start at an arbitrary leaf and climb only as high as the rank distance to the
target requires.

Cost model: one charged comparison is one three-way comparison between the
target and a stored key. Pointer chasing, range bookkeeping and precondition
checks on handles are free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

__all__ = ["FingerTree", "Leaf", "SearchResult", "HandleError"]

RIGHT = 1
LEFT = -1


class HandleError(ValueError):
    """Raised for stale handles or handles that belong to another tree."""


class _Node:
    __slots__ = ("height", "lo", "hi", "parent", "children", "prev", "next")

    def __init__(self, height: int, children: list):
        self.height = height
        self.children = children
        self.parent: Optional[_Node] = None
        self.prev: Optional[_Node] = None
        self.next: Optional[_Node] = None
        for ch in children:
            ch.parent = self
        self.lo = children[0].lo
        self.hi = children[-1].hi


class Leaf:
    """A resident key. Instances double as the tree's node handles."""

    __slots__ = ("key", "lo", "hi", "parent", "prev", "next", "tree")
    height = 0

    def __init__(self, key: int, tree: "FingerTree"):
        self.key = key
        self.lo = key
        self.hi = key
        self.parent: Optional[_Node] = None
        self.prev: Optional[Leaf] = None
        self.next: Optional[Leaf] = None
        self.tree: Optional[FingerTree] = tree

    def __repr__(self) -> str:
        state = "" if self.tree is not None else ", stale"
        return f"Leaf({self.key}{state})"


@dataclass
class SearchResult:
    found: Optional[Leaf]
    pred: Optional[Leaf]
    succ: Optional[Leaf]
    comparisons: int


def _min_leaf(v) -> Leaf:
    while v.height:
        v = v.children[0]
    return v


def _max_leaf(v) -> Leaf:
    while v.height:
        v = v.children[-1]
    return v


def _group_sizes(count: int) -> list[int]:
    if count <= 4:
        return [count]
    sizes = [3] * (count // 3)
    rem = count % 3
    if rem == 1:
        sizes[-1] = 2
        sizes.append(2)
    elif rem == 2:
        sizes.append(2)
    return sizes


class FingerTree:
    """Ordered set of distinct integer keys supporting finger searches.

    ``comparisons`` accumulates the charged comparisons of every search and
    ``rebalance_steps`` counts splits, fusions, shares and root changes.
    """

    def __init__(self) -> None:
        self.root: Optional[_Node] = None
        self._size = 0
        self.comparisons = 0
        self.rebalance_steps = 0

    @classmethod
    def build(cls, sorted_keys) -> "FingerTree":
        tree = cls()
        keys = list(sorted_keys)
        for a, b in zip(keys, keys[1:]):
            if not a < b:
                raise ValueError(f"keys must be strictly increasing: {a!r} before {b!r}")
        if not keys:
            return tree
        level: list = [Leaf(k, tree) for k in keys]
        height = 0
        while True:
            for a, b in zip(level, level[1:]):
                a.next = b
                b.prev = a
            if height > 0 and len(level) == 1:
                break
            height += 1
            nodes = []
            pos = 0
            for size in _group_sizes(len(level)):
                nodes.append(_Node(height, level[pos:pos + size]))
                pos += size
            level = nodes
        tree.root = level[0]
        tree._size = len(keys)
        return tree

    # -- introspection -------------------------------------------------

    def size(self) -> int:
        return self._size

    __len__ = size

    def any_handle(self) -> Leaf:
        """Handle to the minimum key; the fixed choice keeps runs reproducible."""
        if self.root is None:
            raise IndexError("any_handle() on an empty tree")
        return _min_leaf(self.root)

    def max_handle(self) -> Leaf:
        if self.root is None:
            raise IndexError("max_handle() on an empty tree")
        return _max_leaf(self.root)

    def leaves(self) -> Iterator[Leaf]:
        if self.root is None:
            return
        leaf: Optional[Leaf] = _min_leaf(self.root)
        while leaf is not None:
            yield leaf
            leaf = leaf.next

    def keys(self) -> list[int]:
        return [leaf.key for leaf in self.leaves()]

    def height(self) -> int:
        return 0 if self.root is None else self.root.height

    def _check_handle(self, handle) -> None:
        if not isinstance(handle, Leaf) or handle.tree is not self:
            raise HandleError(f"{handle!r} is not a live handle of this tree")

    # -- searching -----------------------------------------------------

    def _steps(self, finger: Leaf, target: int, side: int = 0):
        """Generator pausing before every charged comparison.

        The first ``next()`` advances to the first comparison (or finishes
        if none is needed); every later ``next()`` performs exactly one
        comparison and then pauses again or finishes, returning
        ``(found, pred, succ, comparisons)``.

        ``side`` may assert the direction of the target relative to the
        finger (known from an earlier search) so the opening comparison is
        skipped.
        """
        c = 0
        if side == 0:
            yield
            c += 1
            k = finger.key
            if target == k:
                return finger, None, None, c
            side = RIGHT if target > k else LEFT
        v = finger
        if side == RIGHT:
            while True:
                r = v.next
                if r is None:
                    return None, _max_leaf(v), None, c
                yield
                c += 1
                h = r.hi
                if target == h:
                    return _max_leaf(r), None, None, c
                if target < h:
                    break
                v = r
                p = v.parent
                while p is not None and p.children[-1] is v:
                    v = p
                    p = v.parent
            # target lies in (v.hi, r.hi); descend r keeping target < node.hi
            node = r
            while node.height:
                ch = node.children
                last = len(ch) - 1
                nxt = ch[last]
                for idx in range(last):
                    cand = ch[idx]
                    yield
                    c += 1
                    h = cand.hi
                    if target == h:
                        return _max_leaf(cand), None, None, c
                    if target < h:
                        nxt = cand
                        break
                node = nxt
            return None, node.prev, node, c
        while True:
            r = v.prev
            if r is None:
                return None, None, _min_leaf(v), c
            yield
            c += 1
            lo = r.lo
            if target == lo:
                return _min_leaf(r), None, None, c
            if target > lo:
                break
            v = r
            p = v.parent
            while p is not None and p.children[0] is v:
                v = p
                p = v.parent
        node = r
        while node.height:
            ch = node.children
            nxt = ch[0]
            for idx in range(len(ch) - 1, 0, -1):
                cand = ch[idx]
                yield
                c += 1
                lo = cand.lo
                if target == lo:
                    return _min_leaf(cand), None, None, c
                if target > lo:
                    nxt = cand
                    break
            node = nxt
        return None, node, node.next, c

    def finger_search(self, finger: Leaf, target: int, side: int = 0) -> SearchResult:
        """Locate ``target`` starting from ``finger``.

        Returns the target's leaf when resident, otherwise its in-tree
        predecessor and successor (``None`` past either end). Uses
        O(log d) comparisons where d is the rank distance from the finger.
        """
        self._check_handle(finger)
        gen = self._steps(finger, target, side)
        try:
            while True:
                next(gen)
        except StopIteration as stop:
            found, pred, succ, c = stop.value
        self.comparisons += c
        return SearchResult(found, pred, succ, c)

    def dovetail_search(
        self,
        finger_a: Leaf,
        finger_b: Leaf,
        target: int,
        bracketed: bool = False,
    ) -> SearchResult:
        """Run two finger searches in strict alternation, ``finger_a`` first.

        The first search to finish wins and the other is abandoned, so the
        charge is at most ``2 * min(cost_a, cost_b)``; on a tie ``finger_a``
        wins. With ``bracketed=True`` the caller guarantees
        ``finger_a.key < target < finger_b.key`` and neither search spends a
        comparison rediscovering its direction.
        """
        self._check_handle(finger_a)
        self._check_handle(finger_b)
        if bracketed:
            ga = self._steps(finger_a, target, RIGHT)
            gb = self._steps(finger_b, target, LEFT)
        else:
            ga = self._steps(finger_a, target)
            gb = self._steps(finger_b, target)
        # priming reaches each search's first comparison without charging
        for gen in (ga, gb):
            try:
                next(gen)
            except StopIteration as stop:
                found, pred, succ, _ = stop.value
                return SearchResult(found, pred, succ, 0)
        paused_a = paused_b = 0
        while True:
            try:
                next(ga)
                paused_a += 1
            except StopIteration as stop:
                found, pred, succ, c = stop.value
                total = c + paused_b
                break
            try:
                next(gb)
                paused_b += 1
            except StopIteration as stop:
                found, pred, succ, c = stop.value
                total = paused_a + c
                break
        ga.close()
        gb.close()
        self.comparisons += total
        return SearchResult(found, pred, succ, total)

    def search(self, target: int) -> SearchResult:
        """Finger search from ``any_handle()``; empty trees cost nothing."""
        if self.root is None:
            return SearchResult(None, None, None, 0)
        return self.finger_search(self.any_handle(), target)

    def find(self, key: int) -> Optional[Leaf]:
        """Uncharged lookup for tests and audits."""
        node = self.root
        if node is None:
            return None
        while node.height:
            for ch in node.children:
                if key <= ch.hi:
                    node = ch
                    break
            else:
                return None
        return node if node.key == key else None

    # -- updates -------------------------------------------------------

    def insert_first(self, key: int) -> Leaf:
        if self.root is not None:
            raise ValueError("insert_first() requires an empty tree")
        leaf = Leaf(key, self)
        self.root = _Node(1, [leaf])
        self._size = 1
        return leaf

    def insert_after(self, pred: Leaf, key: int) -> Leaf:
        """Insert ``key`` as the immediate successor of ``pred``.

        Adjacency is verified with uncharged checks: the caller learnt the
        position from a search that was already paid for.
        """
        self._check_handle(pred)
        nxt = pred.next
        if not pred.key < key or (nxt is not None and not key < nxt.key):
            raise ValueError(f"{pred!r} is not the predecessor position of {key}")
        leaf = Leaf(key, self)
        leaf.prev = pred
        leaf.next = nxt
        pred.next = leaf
        if nxt is not None:
            nxt.prev = leaf
        parent = pred.parent
        parent.children.insert(parent.children.index(pred) + 1, leaf)
        leaf.parent = parent
        self._after_insert(parent)
        return leaf

    def insert_before(self, succ: Leaf, key: int) -> Leaf:
        """Insert ``key`` as the immediate predecessor of ``succ``."""
        self._check_handle(succ)
        prv = succ.prev
        if not key < succ.key or (prv is not None and not prv.key < key):
            raise ValueError(f"{succ!r} is not the successor position of {key}")
        leaf = Leaf(key, self)
        leaf.next = succ
        leaf.prev = prv
        succ.prev = leaf
        if prv is not None:
            prv.next = leaf
        parent = succ.parent
        parent.children.insert(parent.children.index(succ), leaf)
        leaf.parent = parent
        self._after_insert(parent)
        return leaf

    def insert_near(self, finger: Leaf, key: int) -> Leaf:
        """Insert next to ``finger``, which must be the key's pred or succ.

        Deciding the side costs one charged comparison; callers that already
        know it should use :meth:`insert_after` / :meth:`insert_before`.
        """
        self._check_handle(finger)
        self.comparisons += 1
        if key == finger.key:
            raise ValueError(f"duplicate key {key}")
        if key > finger.key:
            return self.insert_after(finger, key)
        return self.insert_before(finger, key)

    def _after_insert(self, node: _Node) -> None:
        self._size += 1
        while len(node.children) > 4:
            node = self._split(node)
        self._refresh(node)

    def _split(self, node: _Node) -> _Node:
        self.rebalance_steps += 1
        right = _Node(node.height, node.children[3:])
        del node.children[3:]
        node.lo = node.children[0].lo
        node.hi = node.children[-1].hi
        right.prev = node
        right.next = node.next
        if node.next is not None:
            node.next.prev = right
        node.next = right
        parent = node.parent
        if parent is None:
            self.rebalance_steps += 1
            self.root = _Node(node.height + 1, [node, right])
            return self.root
        parent.children.insert(parent.children.index(node) + 1, right)
        right.parent = parent
        return parent

    @staticmethod
    def _refresh(node: Optional[_Node]) -> None:
        while node is not None:
            lo = node.children[0].lo
            hi = node.children[-1].hi
            if lo == node.lo and hi == node.hi:
                return
            node.lo = lo
            node.hi = hi
            node = node.parent

    def delete(self, handle: Leaf) -> int:
        """Remove the key behind ``handle`` and invalidate the handle."""
        self._check_handle(handle)
        prv, nxt = handle.prev, handle.next
        if prv is not None:
            prv.next = nxt
        if nxt is not None:
            nxt.prev = prv
        parent = handle.parent
        parent.children.remove(handle)
        handle.parent = handle.prev = handle.next = None
        handle.tree = None
        self._size -= 1
        self._fix_underflow(parent)
        return handle.key

    def _fix_underflow(self, node: _Node) -> None:
        while True:
            if node is self.root:
                if not node.children:
                    self.root = None
                    return
                while node.height > 1 and len(node.children) == 1:
                    self.rebalance_steps += 1
                    node = node.children[0]
                    node.parent = None
                    self.root = node
                self._refresh(node)
                return
            if len(node.children) >= 2:
                self._refresh(node)
                return
            parent = node.parent
            idx = parent.children.index(node)
            if idx + 1 < len(parent.children):
                sib = parent.children[idx + 1]
                take_front = True
            else:
                sib = parent.children[idx - 1]
                take_front = False
            self.rebalance_steps += 1
            if len(sib.children) >= 3:
                moved = sib.children.pop(0 if take_front else -1)
                if take_front:
                    node.children.append(moved)
                else:
                    node.children.insert(0, moved)
                moved.parent = node
                for v in (node, sib):
                    v.lo = v.children[0].lo
                    v.hi = v.children[-1].hi
                self._refresh(parent)
                return
            # fuse node into its sibling
            orphans = node.children
            if take_front:
                sib.children[0:0] = orphans
            else:
                sib.children.extend(orphans)
            for ch in orphans:
                ch.parent = sib
            sib.lo = sib.children[0].lo
            sib.hi = sib.children[-1].hi
            if node.prev is not None:
                node.prev.next = node.next
            if node.next is not None:
                node.next.prev = node.prev
            parent.children.pop(idx)
            node.parent = node.prev = node.next = None
            node = parent

    # -- auditing ------------------------------------------------------

    def validate(self) -> list[str]:
        """Structural self-check; returns a list of problems (empty = sound)."""
        problems: list[str] = []
        if self.root is None:
            if self._size:
                problems.append(f"empty root but size {self._size}")
            return problems
        if self.root.parent is not None:
            problems.append("root has a parent")
        level = [self.root]
        count = 0
        while level:
            for a, b in zip(level, level[1:]):
                if a.next is not b or b.prev is not a:
                    problems.append(f"broken level link at height {a.height}")
                    break
            if level[0].prev is not None or level[-1].next is not None:
                problems.append(f"dangling level link at height {level[0].height}")
            nxt = []
            for v in level:
                if v.height == 0:
                    count += 1
                    if v.tree is not self:
                        problems.append(f"{v!r} not owned by tree")
                    continue
                n = len(v.children)
                if v is not self.root and not 2 <= n <= 4:
                    problems.append(f"node at height {v.height} has {n} children")
                for ch in v.children:
                    if ch.parent is not v:
                        problems.append("child/parent mismatch")
                    if ch.height != v.height - 1:
                        problems.append("uneven leaf depth")
                if v.lo != v.children[0].lo or v.hi != v.children[-1].hi:
                    problems.append(f"stale range at height {v.height}")
                nxt.extend(v.children)
            level = nxt
        keys = self.keys()
        if any(not a < b for a, b in zip(keys, keys[1:])):
            problems.append("in-order traversal not strictly increasing")
        if count != self._size or len(keys) != self._size:
            problems.append(f"size {self._size} but {count} leaves")
        return problems
