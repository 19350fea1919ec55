"""Reference dictionaries over S = {1..n} with the same comparison accounting.

Both count one comparison per three-way comparison between the query and a
stored key.
"""

from __future__ import annotations

__all__ = ["StaticBST", "SplayTree"]


def _check_key(n: int, x: int) -> None:
    if not 1 <= x <= n:
        raise ValueError(f"key {x} outside [1, {n}]")


class StaticBST:
    """Binary search on the sorted array 1..n.

    Probes the upper median of the live range, so for power-of-two n the
    keys that are multiples of large powers of two sit on the deepest level
    instead of the shallowest.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.keys = list(range(1, n + 1))
        self.comparisons = 0

    def access(self, x: int) -> int:
        _check_key(self.n, x)
        keys = self.keys
        lo, hi = 0, self.n - 1
        c = 0
        while lo <= hi:
            mid = (lo + hi + 1) // 2
            c += 1
            k = keys[mid]
            if x == k:
                break
            if x < k:
                hi = mid - 1
            else:
                lo = mid + 1
        self.comparisons += c
        return c


class SplayTree:
    """Bottom-up splay tree over 1..n, initially perfectly balanced.

    Nodes are stored in parallel arrays indexed by key; 0 means "no node".
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.left = [0] * (n + 1)
        self.right = [0] * (n + 1)
        self.parent = [0] * (n + 1)
        self.comparisons = 0
        self.rotations = 0
        self.root = self._build(1, n, 0)

    def _build(self, lo: int, hi: int, par: int) -> int:
        root = (lo + hi + 1) // 2
        self.parent[root] = par
        stack = [(lo, hi, root)]
        while stack:
            lo, hi, mid = stack.pop()
            if lo < mid:
                c = (lo + mid) // 2
                self.left[mid] = c
                self.parent[c] = mid
                stack.append((lo, mid - 1, c))
            if mid < hi:
                c = (mid + hi + 2) // 2
                self.right[mid] = c
                self.parent[c] = mid
                stack.append((mid + 1, hi, c))
        return root

    def access(self, x: int) -> int:
        _check_key(self.n, x)
        node = self.root
        c = 0
        while True:
            c += 1
            if x == node:
                break
            node = self.left[node] if x < node else self.right[node]
        self._splay(node)
        self.comparisons += c
        return c

    def _rotate(self, x: int) -> None:
        left, right, parent = self.left, self.right, self.parent
        p = parent[x]
        g = parent[p]
        if left[p] == x:
            b = right[x]
            left[p] = b
            right[x] = p
        else:
            b = left[x]
            right[p] = b
            left[x] = p
        if b:
            parent[b] = p
        parent[p] = x
        parent[x] = g
        if g == 0:
            self.root = x
        elif left[g] == p:
            left[g] = x
        else:
            right[g] = x
        self.rotations += 1

    def _splay(self, x: int) -> None:
        parent, left = self.parent, self.left
        while parent[x]:
            p = parent[x]
            g = parent[p]
            if g == 0:
                self._rotate(x)  # zig
            elif (left[g] == p) == (left[p] == x):
                self._rotate(p)  # zig-zig
                self._rotate(x)
            else:
                self._rotate(x)  # zig-zag
                self._rotate(x)

    def inorder(self) -> list[int]:
        out, stack, node = [], [], self.root
        while stack or node:
            while node:
                stack.append(node)
                node = self.left[node]
            node = stack.pop()
            out.append(node)
            node = self.right[node]
        return out
