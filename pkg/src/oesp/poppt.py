"""Succinct post-order tree shape with parent/children navigation.

The shape is a bit string in post-order: 0 for a leaf, 1 for an internal
node, closed by one extra 1-bit (a virtual super-root) at finalize.  With
weight +1 per 0-bit and -1 per 1-bit, the running sum over any prefix is
the number of unattached subtree roots, so it stays positive; each internal
node consumes exactly the two most recently completed subtrees.

Navigation works by excess search over that weight sequence:

  parent(i)   = first j > i whose excess drops to excess(i) or below;
                i is the right child iff the drop goes one unit below.
  children(i) = right child ends at i-1; the left child ends just before
                the right child's subtree starts (backward excess search).

Excess queries run on min/max segment trees over the finalized bit string,
giving O(lg n) per navigation step.  Navigation is only available once the
tree is finalized; the builder appends strictly left-to-right before that.
"""

import numpy as np

from .bits import AppendBitVector
from .errors import NotFoundError, RangeError, StateError, StructureError


class PostOrderTree:
    def __init__(self):
        self.bits = AppendBitVector()
        self.internal_count = 0
        self._roots = 0          # unattached subtree roots in the pending forest
        self._finalized = False
        self._excess = None      # numpy int64 prefix sums, built lazily
        self._min_tree = None
        self._max_tree = None
        self._tree_base = 0

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @property
    def finalized(self):
        return self._finalized

    def __len__(self):
        return len(self.bits)

    def append_node(self, internal):
        """Append one node in post-order; returns the new rank for internal nodes."""
        if self._finalized:
            raise StateError("cannot append to a finalized tree")
        if internal:
            if self._roots < 2:
                raise StructureError(
                    "internal node needs two completed subtrees, "
                    f"only {self._roots} pending"
                )
            self.bits.push(1)
            self._roots -= 1
            self.internal_count += 1
            return self.internal_count
        self.bits.push(0)
        self._roots += 1
        return None

    def append_leaf(self):
        self.append_node(False)

    def append_internal(self):
        return self.append_node(True)

    def finalize(self):
        """Close the shape with the virtual 1-bit and enable navigation."""
        if self._finalized:
            raise StateError("tree already finalized")
        if self._roots != 1:
            raise StructureError(
                f"finalize requires exactly one pending root, found {self._roots}"
            )
        self.bits.push(1)
        self._finalized = True

    @classmethod
    def from_bits(cls, bitvec, internal_count):
        """Adopt an already-complete shape (deserialization path)."""
        t = cls()
        n = len(bitvec)
        if n < 2 or bitvec.access(n - 1) != 1:
            raise StructureError("shape must end with the virtual 1-bit")
        if n != 2 * internal_count + 2:
            raise StructureError("bit count does not match internal node count")
        t.bits = bitvec
        t.internal_count = internal_count
        t._roots = 0
        t._finalized = True
        return t

    # ------------------------------------------------------------------
    # navigation
    # ------------------------------------------------------------------

    @property
    def root(self):
        """Position of the real root (the bit before the virtual one)."""
        self._require_nav()
        return len(self.bits) - 2

    def _require_nav(self):
        if not self._finalized:
            raise StateError("navigation requires a finalized tree")
        if self._excess is None:
            self._build_excess()

    def _build_excess(self):
        raw = np.frombuffer(self.bits.to_bytes(), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[: len(self.bits)]
        weights = 1 - 2 * bits.astype(np.int64)
        self._excess = np.cumsum(weights)
        m = len(self._excess)
        base = 1
        while base < m:
            base <<= 1
        self._tree_base = base
        mn = np.full(2 * base, np.iinfo(np.int64).max, dtype=np.int64)
        mx = np.full(2 * base, np.iinfo(np.int64).min, dtype=np.int64)
        mn[base : base + m] = self._excess
        mx[base : base + m] = self._excess
        for i in range(base - 1, 0, -1):
            mn[i] = min(mn[2 * i], mn[2 * i + 1])
            mx[i] = max(mx[2 * i], mx[2 * i + 1])
        self._min_tree = mn
        self._max_tree = mx

    def _first_leq_after(self, i, v):
        """Smallest j > i with excess(j) <= v, or None."""
        mn = self._min_tree
        base = self._tree_base
        m = len(self._excess)
        if i + 1 >= m:
            return None
        node = base + i + 1
        while True:
            if mn[node] <= v:
                while node < base:
                    node = 2 * node if mn[2 * node] <= v else 2 * node + 1
                j = node - base
                return j if j < m else None
            # step to the next subtree to the right
            while node & 1:
                node >>= 1
                if node == 0:
                    return None
            node += 1

    def _last_eq_before(self, i, v):
        """Largest j < i with excess(j) == v, or None.

        Excess changes by exactly 1 per step, so a subtree contains the
        value v iff min <= v <= max over its range.
        """
        if i <= 0:
            return None
        mn, mx = self._min_tree, self._max_tree
        base = self._tree_base
        node = base + i - 1
        while True:
            if mn[node] <= v <= mx[node]:
                while node < base:
                    r = 2 * node + 1
                    node = r if mn[r] <= v <= mx[r] else 2 * node
                return node - base
            # step to the next subtree to the left
            while node & 1 == 0:
                node >>= 1
                if node == 0:
                    return None
            if node == 1:
                return None
            node -= 1

    def excess(self, i):
        self._require_nav()
        return int(self._excess[i])

    def is_internal(self, i):
        if not 0 <= i < len(self.bits):
            raise RangeError(f"position {i} out of range")
        return self.bits.access(i) == 1

    def parent(self, i):
        """Position of i's parent; raises NotFoundError at the root."""
        self._require_nav()
        n = len(self.bits)
        if not 0 <= i < n - 1:
            raise RangeError(f"position {i} is not a navigable node")
        j = self._first_leq_after(i, int(self._excess[i]))
        if j is None or j == n - 1:
            raise NotFoundError(f"node {i} is the root")
        return j

    def direction(self, i):
        """'L' or 'R': which child of its parent node i is."""
        p = self.parent(i)
        return "R" if self._excess[p] == self._excess[i] - 1 else "L"

    def parent_and_direction(self, i):
        self._require_nav()
        n = len(self.bits)
        if not 0 <= i < n - 1:
            raise RangeError(f"position {i} is not a navigable node")
        j = self._first_leq_after(i, int(self._excess[i]))
        if j is None or j == n - 1:
            return None, None
        return j, ("R" if self._excess[j] == self._excess[i] - 1 else "L")

    def subtree_start(self, i):
        """First bit position of the subtree whose root sits at i."""
        self._require_nav()
        if self.bits.access(i) == 0:
            return i
        t = self._last_eq_before(i, int(self._excess[i]) - 1)
        return 0 if t is None else t + 1

    def children(self, i):
        """(left, right) child positions of internal node i."""
        self._require_nav()
        if not 0 <= i < len(self.bits) - 1:
            raise RangeError(f"position {i} is not a navigable node")
        if self.bits.access(i) != 1:
            raise StructureError(f"node {i} is a leaf")
        right = i - 1
        left = self.subtree_start(right) - 1
        return left, right

    def node_of_variable(self, k):
        """Position of the internal node with post-order rank k (1-based)."""
        if not 1 <= k <= self.internal_count:
            raise RangeError(
                f"variable rank {k} out of range 1..{self.internal_count}"
            )
        return self.bits.select(1, k)

    def variable_of_node(self, i):
        """Post-order rank of the internal node at position i."""
        if self.bits.access(i) != 1:
            raise StructureError(f"node {i} is a leaf")
        return self.bits.rank(1, i)

    def leaf_ordinal(self, i):
        """0-based index of leaf i in left-to-right leaf order."""
        if self.bits.access(i) != 0:
            raise StructureError(f"node {i} is internal")
        return self.bits.rank(0, i) - 1
