"""Online edit-sensitive parsing of a byte stream into a binary grammar.

The parser consumes one terminal at a time and maintains one buffer per
parse level.  Each level's pending symbols are segmented into three kinds:

  type1  a run of one repeated symbol, length >= 2
  type2  a repetition-free stretch longer than the threshold theta
  type3  anything else (short stretches; a lone symbol merged into the
         run that follows it)

type1/type3 segments are parsed left-aligned: pairs from the left, with a
trigram (X -> a.Y, Y -> b.c) absorbing an odd tail.  type2 segments are cut
into blocks of length 2 or 3 by alphabet reduction: positions are relabeled
by the lowest differing bit against their left neighbor (a fixed number of
rounds, so the round count never depends on context), the label alphabet is
squeezed from {0..5} to {0,1,2} by three replacement passes, and local
extrema of the final labels become landmarks whose midpoints are the block
boundaries.  Every decision depends on a bounded window of neighbors, so a
level can commit its leftmost blocks as soon as no continuation of the
stream could change them; that keeps each level buffer below a fixed
watermark and makes byte-at-a-time and whole-string feeding produce the
same grammar.

Equal subtrees are shared through a hash-consed node table, so "the same
variable" is decidable during parsing by object identity.  Variable ids are
post-order ranks of the final parse tree, which are only known once the
whole tree exists; emit_structure() assigns them in a single post-order
walk at finalize, expanding the first occurrence of every node and turning
repeats into labeled leaves.
"""

from collections import deque
from dataclasses import dataclass

from .errors import EmptyInputError, StateError, StructureError

_MASK = (1 << 64) - 1

# Fixed relabeling rounds: from a 64-bit value space the label bound shrinks
# 2^64 -> 128 -> 14 -> 8 -> 6, so four rounds always land in {0..5}.  Using a
# fixed count (not the observed alphabet) keeps the labels of a position
# independent of far-away stream content.
_ROUNDS = 4


@dataclass(frozen=True)
class EspParams:
    """Tunables for the parser; defaults match the shipped index format."""

    theta: int = 10          # type2 threshold: 2 * lg*(upper text bound)
    window: int = 18         # per-level pending watermark (asserted, not enforced)


@dataclass(frozen=True)
class Segment:
    kind: str                # "type1" | "type2" | "type3"
    start: int
    stop: int                # exclusive


class Node:
    """One grammar symbol: a terminal byte or a binary rule over two nodes.

    skey is a structural 64-bit fingerprint (byte value for terminals) used
    as the symbol's stand-in value during parsing, before post-order ids
    exist.  vid is assigned by emit_structure; children are dropped after
    the defining occurrence has been written out.
    """

    __slots__ = ("uid", "byte", "left", "right", "length", "skey", "vid")

    def __init__(self, uid, byte, left, right, length, skey):
        self.uid = uid
        self.byte = byte
        self.left = left
        self.right = right
        self.length = length
        self.skey = skey
        self.vid = None

    def __repr__(self):
        if self.byte is not None:
            return f"<t{self.byte}>"
        return f"<n{self.uid} len={self.length} vid={self.vid}>"


def _mix_skey(a, b):
    h = (a * 0xC2B2AE3D27D4EB4F + b * 0x9E3779B97F4A7C15 + 0x165667B19E3779F9) & _MASK
    h ^= h >> 29
    h = (h * 0xBF58476D1CE4E5B9) & _MASK
    h ^= h >> 32
    return h | (1 << 63)     # keep composite fingerprints out of the byte range


def _label(prev, cur):
    """2j + bit_j(cur), j = lowest bit where prev and cur differ."""
    x = prev ^ cur
    if x == 0:
        return 131           # only reachable through a fingerprint collision
    j = (x & -x).bit_length() - 1
    return 2 * j + ((cur >> j) & 1)


def _labels_final(values):
    """Final-round labels per position; None where no label exists (p < rounds)."""
    cur = list(values)
    for _ in range(_ROUNDS):
        nxt = [None] * len(cur)
        for i in range(1, len(cur)):
            a, b = cur[i - 1], cur[i]
            if a is not None and b is not None:
                nxt[i] = _label(a, b)
        cur = nxt
    return cur


def _run_passes(seq):
    """Squeeze labels to {0,1,2}: replace 3, 4, 5 in three ascending passes.

    Each value is replaced by the least of {0,1,2} not held by its current
    neighbors; adjacent labels always differ, so replacements within one
    pass never interact and every final value depends on a +-3 window only.
    """
    out = list(seq)
    n = len(out)
    for v in (3, 4, 5):
        for i in range(n):
            if out[i] == v:
                left = out[i - 1] if i > 0 else None
                right = out[i + 1] if i + 1 < n else None
                for c in (0, 1, 2):
                    if c != left and c != right:
                        out[i] = c
                        break
    return out


def _is_landmark(pl, x, hi):
    """Landmark test at position x; pl(y) gives the squeezed label of y.

    Positions 5..hi-1 are eligible (labels exist from position _ROUNDS on,
    and both neighbors are needed).  Local maxima are landmarks; local
    minima count only when no neighbor is a maximum.
    """

    def mx(y):
        if y < 5 or y > hi - 1:
            return False
        c = pl(y)
        return c > pl(y - 1) and c > pl(y + 1)

    if mx(x):
        return True
    c = pl(x)
    return c < pl(x - 1) and c < pl(x + 1) and not mx(x - 1) and not mx(x + 1)


def chunk_lengths(n):
    """Left-aligned split of a segment of length n into 2s and a final 3.

    Even lengths become pairs; odd lengths become pairs plus one trailing
    trigram.  Length 1 cannot be parsed here: segmentation must never hand
    a lone symbol to the block parser except as a finalize promotion.
    """
    if n == 1:
        raise StructureError("cannot block-parse a segment of length 1")
    if n <= 0:
        return []
    if n % 2 == 0:
        return [2] * (n // 2)
    return [2] * ((n - 3) // 2) + [3]


def type2_blocks_with_cuts(values):
    """Block spans plus the cut positions for a complete type2 segment.

    Landmarks are computed from the reduced labels; each block boundary
    (cut) is the midpoint between consecutive landmarks, ties to the left.
    The stretch before the first cut and after the last one is split
    left-aligned.  Returns (spans, cuts): spans are (start, length) pairs of
    length 2 or 3 concatenating to the whole segment; cuts[t] is the last
    position of the region around landmark t.
    """
    m = len(values)
    labs = _labels_final(values)
    pl_list = [None] * min(_ROUNDS, m) + _run_passes(labs[_ROUNDS:])
    pl = pl_list.__getitem__
    hi = m - 1
    lands = [x for x in range(5, m - 1) if _is_landmark(pl, x, hi)]
    blocks = []
    start = 0
    if len(lands) < 2:
        for ln in chunk_lengths(m):
            blocks.append((start, ln))
            start += ln
        return blocks, []
    cuts = []
    for t in range(len(lands) - 1):
        cut = lands[t] + (lands[t + 1] - lands[t]) // 2
        cuts.append(cut)
        for ln in chunk_lengths(cut - start + 1):
            blocks.append((start, ln))
            start += ln
    for ln in chunk_lengths(m - start):
        blocks.append((start, ln))
        start += ln
    return blocks, cuts


def type2_blocks(values):
    """Block spans (start, length) for a complete type2 segment."""
    return type2_blocks_with_cuts(values)[0]


def classify(symbols, theta=None):
    """Partition a complete symbol sequence into segments.

    Maximal runs (length >= 2) are type1.  Maximal repetition-free
    stretches are type2 when longer than theta, else type3.  A stretch of
    length 1 followed by a run is merged into that run as a type3 segment;
    a trailing lone symbol stays a type3 segment of length 1 for the
    caller to promote.
    """
    if theta is None:
        theta = EspParams().theta
    n = len(symbols)
    segs = []
    i = 0
    while i < n:
        # maximal repetition-free stretch [i, k)
        k = i + 1
        while k < n and symbols[k] != symbols[k - 1]:
            k += 1
        if k < n:
            k -= 1               # symbols[k] opens a run
        stretch = k - i
        if stretch == 0:
            j = i + 1
            while j < n and symbols[j] == symbols[i]:
                j += 1
            segs.append(Segment("type1", i, j))
            i = j
        elif stretch == 1 and k < n:
            j = k + 1
            while j < n and symbols[j] == symbols[k]:
                j += 1
            segs.append(Segment("type3", i, j))
            i = j
        else:
            kind = "type2" if stretch > theta else "type3"
            segs.append(Segment(kind, i, k))
            i = k
    return segs


class _Tail:
    """List with a sliding base offset; front entries can be dropped."""

    __slots__ = ("base", "data")

    def __init__(self):
        self.base = 0
        self.data = []

    def append(self, v):
        self.data.append(v)

    def get(self, i):
        return self.data[i - self.base]

    def drop_below(self, i):
        cut = i - self.base
        if cut > 0:
            del self.data[:cut]
            self.base = i


class _T2:
    """Incremental type2 state for one open segment of one level."""

    __slots__ = ("n", "chain", "labs", "flag_next", "last_land", "nland",
                 "qpos", "end")

    def __init__(self):
        self.n = 0               # segment symbols ingested
        self.chain = (None, None, None, None)
        self.labs = _Tail()
        self.flag_next = 5
        self.last_land = None
        self.nland = 0
        self.qpos = 0            # segment position of the level's q[0]
        self.end = None

    def ingest(self, value):
        p = self.n
        raw, l1, l2, l3 = self.chain
        a = _label(raw, value) if p >= 1 else None
        b = _label(l1, a) if p >= 2 else None
        c = _label(l2, b) if p >= 3 else None
        d = _label(l3, c) if p >= 4 else None
        self.chain = (value, a, b, c)
        self.labs.append(d)
        self.n += 1

    def is_landmark(self, x):
        hi = (self.end - 1) if self.end is not None else (self.n - 1)
        lo = max(_ROUNDS, x - 5)
        top = min(hi, x + 5)
        window = [self.labs.get(i) for i in range(lo, top + 1)]
        pl_win = _run_passes(window)

        def pl(y):
            return pl_win[y - lo]

        return _is_landmark(pl, x, hi)

    def trim(self):
        self.labs.drop_below(max(0, self.flag_next - 8))


class _Level:
    """Pending buffer and commit logic for one parse level."""

    __slots__ = ("parser", "q", "dups", "pushed", "popped", "t2",
                 "produced", "last_out", "max_fill")

    def __init__(self, parser):
        self.parser = parser
        self.q = deque()
        self.dups = deque()      # absolute push indexes i with q[i-1] is q[i]
        self.pushed = 0
        self.popped = 0
        self.t2 = None
        self.produced = 0
        self.last_out = None
        self.max_fill = 0

    def push(self, rec):
        q = self.q
        if q and rec is q[-1]:
            self.dups.append(self.pushed)
        q.append(rec)
        self.pushed += 1
        if len(q) > self.max_fill:
            self.max_fill = len(q)

    def _first_dup(self):
        dups = self.dups
        popped = self.popped
        while dups and dups[0] - popped < 1:
            dups.popleft()
        return (dups[0] - popped) if dups else None

    def _pop(self):
        self.popped += 1
        return self.q.popleft()

    def _emit_block(self, out, size):
        cons = self.parser._cons
        if size == 2:
            a = self._pop()
            b = self._pop()
            out.append(cons(a, b))
        else:
            a = self._pop()
            b = self._pop()
            c = self._pop()
            out.append(cons(a, cons(b, c)))

    def _emit_chunks(self, out, seg_len):
        for size in chunk_lengths(seg_len):
            self._emit_block(out, size)

    def _run_extent(self, start):
        q = self.q
        head = q[start]
        ext = 1
        while start + ext < len(q) and q[start + ext] is head:
            ext += 1
        return ext, start + ext < len(q)

    def pump(self, closing):
        out = []
        q = self.q
        theta = self.parser.params.theta
        while True:
            if self.t2 is not None:
                if not self._t2_step(out, closing):
                    break
                continue
            n = len(q)
            if n == 0:
                break
            fd = self._first_dup()
            if fd is None:
                if closing:
                    if n == 1:
                        out.append(self._pop())      # finalize promotion
                    elif n <= theta:
                        self._emit_chunks(out, n)
                    else:
                        self._t2_begin()
                        continue
                    continue
                # the newest symbol is provisional (the next push may reveal
                # it as a run start), so only n-1 symbols certainly belong to
                # the open stretch
                if n - 1 > theta:
                    self._t2_begin()
                    continue
                break
            if fd >= 3:
                stretch = fd - 1
                if stretch <= theta:
                    self._emit_chunks(out, stretch)
                else:
                    self._t2_begin()
                continue
            # fd == 1: run at the front; fd == 2: lone symbol + run, merged
            run_start = fd - 1
            ext, bounded = self._run_extent(run_start)
            seg = run_start + ext
            if bounded or closing:
                self._emit_chunks(out, seg)
                continue
            while seg >= 4:
                self._emit_block(out, 2)
                seg -= 2
            break
        if closing and (q or self.t2 is not None):
            raise StructureError("level buffer not drained at finalize")
        return out

    # -- type2 streaming ------------------------------------------------

    def _t2_begin(self):
        self.t2 = _T2()

    def _t2_region(self, out, upto):
        t2 = self.t2
        count = upto - t2.qpos + 1
        self._emit_chunks(out, count)
        t2.qpos = upto + 1

    def _t2_step(self, out, closing):
        t2 = self.t2
        q = self.q
        fd = self._first_dup()
        if fd is not None:
            t2.end = t2.qpos + fd - 1
        elif closing:
            t2.end = t2.qpos + len(q)
        avail = (t2.end - t2.qpos) if t2.end is not None else len(q)
        while t2.n - t2.qpos < avail:
            t2.ingest(q[t2.n - t2.qpos].skey)
        # While the segment is open its last ingested symbol is provisional
        # (the next push may reveal it as a run start), so flags stop one
        # window short of it; that keeps them identical to the flags a whole
        # completed segment would produce.
        limit = (t2.end - 2) if t2.end is not None else (t2.n - 7)
        while t2.flag_next <= limit:
            x = t2.flag_next
            if t2.is_landmark(x):
                if t2.last_land is not None:
                    cut = t2.last_land + (x - t2.last_land) // 2
                    self._t2_region(out, cut)
                t2.last_land = x
                t2.nland += 1
            t2.flag_next = x + 1
        t2.trim()
        if t2.end is None:
            return False
        if t2.end - t2.qpos > 0:
            self._t2_region(out, t2.end - 1)
        self.t2 = None
        return True


class EspParser:
    """Streaming grammar builder: feed bytes, then finalize to the root node."""

    def __init__(self, params=None):
        self.params = params or EspParams()
        self._terminals = [None] * 256
        self._seen = {}
        self._uid = 256
        self.levels = []
        self.fed = 0
        self.finalized = False
        self.root = None

    # -- structure sharing ----------------------------------------------

    def _terminal(self, byte):
        rec = self._terminals[byte]
        if rec is None:
            rec = Node(byte, byte, None, None, 1, byte)
            self._terminals[byte] = rec
        return rec

    def _cons(self, a, b):
        key = (a.uid, b.uid)
        rec = self._seen.get(key)
        if rec is None:
            rec = Node(self._uid, None, a, b, a.length + b.length,
                       _mix_skey(a.skey, b.skey))
            self._uid += 1
            self._seen[key] = rec
        return rec

    @property
    def rule_count(self):
        return len(self._seen)

    # -- feeding ----------------------------------------------------------

    def _level(self, i):
        while len(self.levels) <= i:
            self.levels.append(_Level(self))
        return self.levels[i]

    def feed(self, byte):
        if self.finalized:
            raise StateError("parser already finalized")
        if not 0 <= byte <= 255:
            raise StructureError(f"terminal {byte} outside byte range")
        self.fed += 1
        self._cascade(0, (self._terminal(byte),))

    def feed_bytes(self, data):
        for b in data:
            self.feed(b)

    def _cascade(self, i, recs):
        """Push records into level i, pumping after every push, rippling up."""
        while recs:
            lvl = self._level(i)
            outs = []
            for r in recs:
                lvl.push(r)
                outs.extend(lvl.pump(False))
            if outs:
                lvl.produced += len(outs)
                lvl.last_out = outs[-1]
            recs = outs
            i += 1

    def finalize(self):
        if self.finalized:
            raise StateError("parser already finalized")
        if self.fed == 0:
            raise EmptyInputError("cannot finalize an empty stream")
        self.finalized = True
        i = 0
        while True:
            lvl = self._level(i)
            outs = lvl.pump(True)
            if outs:
                lvl.produced += len(outs)
                lvl.last_out = outs[-1]
            if lvl.produced == 1:
                # sole lifetime output of this level: the parse tree root
                self.root = lvl.last_out
                break
            self._cascade(i + 1, outs)
            i += 1
        return self.root


def emit_structure(root, tree, push_label, lengths):
    """Write the grammar reachable from root into a post-order shape.

    Walks the final parse tree in post-order.  The first time a rule node
    is reached it is expanded (children first, then its internal 1-bit) and
    receives its post-order rank as variable id; every later occurrence and
    every terminal becomes a leaf 0-bit with the symbol id pushed to the
    label sequence.  lengths[k-1] collects the expansion length of rule k.
    """
    CLOSE = object()
    stack = [root]
    while stack:
        node = stack.pop()
        if node is CLOSE:
            rec = stack.pop()
            rec.vid = tree.append_internal()
            lengths.append(rec.length)
            rec.left = rec.right = None
            continue
        if node.byte is not None:
            tree.append_leaf()
            push_label(node.byte)
            continue
        if node.vid is not None:
            tree.append_leaf()
            push_label(256 + node.vid)
            continue
        stack.append(node)
        stack.append(CLOSE)
        stack.append(node.right)
        stack.append(node.left)
