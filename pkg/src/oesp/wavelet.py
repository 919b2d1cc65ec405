"""Growable wavelet tree over a sequence of non-negative integers.

Supports pushback, access, rank and select while the alphabet expands.
Nodes are explicit linked objects, each holding an append-only bitvector;
a value v pushed at a node covering [lo, hi] goes left (bit 0) iff
v <= (lo + hi) // 2.  When a value reaches beyond the current capacity the
tree grows by installing new roots whose left subtree is the old root and
whose bit content is "length zeros", stored as an implicit leading-zeros
counter so growth is O(1) and never copies.
"""

from .bits import AppendBitVector
from .errors import RangeError


class _Node:
    __slots__ = ("lo", "hi", "zeros_prefix", "bits", "left", "right")

    def __init__(self, lo, hi, zeros_prefix=0):
        self.lo = lo
        self.hi = hi
        self.zeros_prefix = zeros_prefix
        self.bits = AppendBitVector()
        self.left = None
        self.right = None

    # The node's logical bit string is zeros_prefix 0-bits followed by the
    # stored bits; all helpers below take logical positions.

    def length(self):
        return self.zeros_prefix + len(self.bits)

    def bit(self, i):
        return 0 if i < self.zeros_prefix else self.bits.access(i - self.zeros_prefix)

    def rank(self, c, i):
        z = self.zeros_prefix
        if i < z:
            return (i + 1) if c == 0 else 0
        r = self.bits.rank(c, i - z)
        return r + z if c == 0 else r

    def select(self, c, j):
        z = self.zeros_prefix
        if c == 0:
            if j <= z:
                return j - 1
            return z + self.bits.select(0, j - z)
        return z + self.bits.select(1, j)


class DynamicWaveletTree:
    """Sequence of ints in [0, capacity) with append, access, rank, select."""

    def __init__(self, initial_capacity=512):
        cap = 1
        while cap < max(2, initial_capacity):
            cap <<= 1
        self._root = _Node(0, cap - 1)
        self._len = 0

    def __len__(self):
        return self._len

    @property
    def capacity(self):
        return self._root.hi + 1

    def _grow(self, v):
        while v > self._root.hi:
            old = self._root
            cap = old.hi + 1
            root = _Node(0, 2 * cap - 1, zeros_prefix=self._len)
            root.left = old
            self._root = root

    def push(self, v):
        if v < 0:
            raise RangeError(f"negative value {v}")
        if v > self._root.hi:
            self._grow(v)
        node = self._root
        while node.lo != node.hi:
            mid = (node.lo + node.hi) >> 1
            if v <= mid:
                node.bits.push(0)
                if node.left is None:
                    node.left = _Node(node.lo, mid)
                node = node.left
            else:
                node.bits.push(1)
                if node.right is None:
                    node.right = _Node(mid + 1, node.hi)
                node = node.right
        self._len += 1

    def access(self, i):
        if not 0 <= i < self._len:
            raise RangeError(f"access({i}) out of range for length {self._len}")
        node = self._root
        while node.lo != node.hi:
            if node.bit(i) == 0:
                i = node.rank(0, i) - 1
                node = node.left
            else:
                i = node.rank(1, i) - 1
                node = node.right
        return node.lo

    def rank(self, v, i):
        """Occurrences of v in positions [0, i]; v beyond capacity gives 0."""
        if not 0 <= i < self._len:
            raise RangeError(f"rank({v}, {i}) out of range for length {self._len}")
        if v < 0 or v > self._root.hi:
            return 0
        node = self._root
        while node.lo != node.hi:
            mid = (node.lo + node.hi) >> 1
            c = 0 if v <= mid else 1
            cnt = node.rank(c, i)
            if cnt == 0:
                return 0
            i = cnt - 1
            node = node.left if c == 0 else node.right
            if node is None:
                return 0
        return i + 1

    def select(self, v, j):
        """0-based position of the j-th occurrence of v, or None if absent.

        Absence is a value rather than an error: callers iterate ordinals
        until None to enumerate all occurrences.
        """
        if j < 1:
            raise RangeError(f"select ordinal must be >= 1, got {j}")
        if v < 0 or v > self._root.hi or self._len == 0:
            return None
        # descend to the leaf, recording the path
        path = []
        node = self._root
        while node.lo != node.hi:
            mid = (node.lo + node.hi) >> 1
            c = 0 if v <= mid else 1
            path.append((node, c))
            node = node.left if c == 0 else node.right
            if node is None:
                return None
        # count of elements reaching the leaf = rank at the deepest parent
        parent, c = path[-1]
        plen = parent.length()
        if plen == 0 or parent.rank(c, plen - 1) < j:
            return None
        pos = j - 1
        for node, c in reversed(path):
            pos = node.select(c, pos + 1)
        return pos
