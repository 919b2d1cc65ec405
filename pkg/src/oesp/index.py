"""The self-index facade: streaming construction, queries, serialization.

A finalized index holds four structures: the post-order tree shape, the
leaf-label sequence (a growable wavelet tree), the reverse dictionary from
digrams to rule ids, and the per-rule expansion lengths.  The plain text is
never retained; extraction and match verification walk the grammar.

The serialized form (all little-endian) is:

    magic "OESP", version byte 0x01
    N (u64)            text length
    n (u64)            rule count
    sigma_offset (u32) always 256; rule k appears in labels as 256 + k
    bit count (u64) followed by the tree shape bits packed LSB-first
    n + 1 leaf labels packed at ceil(lg(256 + n + 1)) bits each
    n expansion lengths packed at ceil(lg(N + 1)) bits each

The reverse dictionary is not stored: it is rebuilt on load by resolving
every rule's digram through tree navigation, which is also how lookups
re-derive digrams instead of storing 2n symbol copies.
"""

import io
import struct
from dataclasses import dataclass, field

from . import search
from .bits import AppendBitVector
from .errors import (EmptyInputError, FormatError, NotFoundError, RangeError,
                     StateError)
from .esp import EspParams, EspParser, emit_structure
from .poppt import PostOrderTree
from .rdict import ReverseDict
from .wavelet import DynamicWaveletTree

_MAGIC = b"OESP"
_VERSION = 1
SIGMA_OFFSET = 256


@dataclass
class IndexConfig:
    load_factor: float = 0.8
    stability_margin: int = 10        # per-level token margin for core picking
    parser: EspParams = field(default_factory=EspParams)


def _pack_values(values, width):
    """Pack ints at a fixed bit width, little-endian bit order."""
    acc = 0
    nbits = 0
    out = bytearray()
    for v in values:
        acc |= v << nbits
        nbits += width
        while nbits >= 8:
            out.append(acc & 0xFF)
            acc >>= 8
            nbits -= 8
    if nbits:
        out.append(acc & 0xFF)
    return bytes(out)


def _unpack_values(data, count, width):
    acc = 0
    nbits = 0
    pos = 0
    mask = (1 << width) - 1
    out = []
    for _ in range(count):
        while nbits < width:
            if pos >= len(data):
                raise FormatError("truncated value block")
            acc |= data[pos] << nbits
            pos += 1
            nbits += 8
        out.append(acc & mask)
        acc >>= width
        nbits -= width
    if acc:
        raise FormatError("nonzero padding in value block")
    return out, pos


class OespIndex:
    """Online grammar-compressed self-index over a byte stream."""

    def __init__(self, config=None):
        self.config = config or IndexConfig()
        self._parser = EspParser(self.config.parser)
        self.text_length = 0
        self.tree = None              # PostOrderTree
        self.labels = None            # DynamicWaveletTree over leaf labels
        self.lengths = []             # lengths[k-1] = |expansion of rule k|
        self.rules = None             # ReverseDict
        self.build_stats = None
        self._label_list = []
        self._digrams = {}            # rule id -> (x, y), filled lazily
        self._parents = {}            # node position -> (parent, 'L'/'R')
        self._positions = None        # leaf label -> [node positions]

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @property
    def finalized(self):
        return self.tree is not None

    @property
    def rule_count(self):
        return len(self.lengths)

    def append(self, byte):
        if self.finalized:
            raise StateError("index already finalized")
        self._parser.feed(byte)
        self.text_length += 1

    def append_bytes(self, data):
        if self.finalized:
            raise StateError("index already finalized")
        self._parser.feed_bytes(data)
        self.text_length += len(data)

    def finalize(self):
        """Close the stream; afterwards the index answers queries."""
        if self.finalized:
            raise StateError("index already finalized")
        if self.text_length == 0:
            raise EmptyInputError("no input appended")
        parser = self._parser
        root = parser.finalize()
        self.build_stats = {
            "levels": len(parser.levels),
            "max_fill": [lvl.max_fill for lvl in parser.levels],
            "window": parser.params.window,
        }
        tree = PostOrderTree()
        labels = DynamicWaveletTree()
        label_list = []

        def push_label(v):
            labels.push(v)
            label_list.append(v)

        lengths = []
        emit_structure(root, tree, push_label, lengths)
        tree.finalize()
        self.tree = tree
        self.labels = labels
        self._label_list = label_list
        self.lengths = lengths
        self._parser = None
        self._build_rules()
        return 256 + len(lengths) if lengths else label_list[0]

    @classmethod
    def build(cls, data, config=None):
        idx = cls(config)
        idx.append_bytes(data)
        idx.finalize()
        return idx

    def _build_rules(self):
        self.rules = ReverseDict(self.symbol_digram_of_rule,
                                 load_factor=self.config.load_factor)
        for k in range(1, self.rule_count + 1):
            x, y = self.symbol_digram_of_rule(k)
            got, created = self.rules.lookup_or_insert(x, y, k)
            if not created:
                raise FormatError(f"rules {got} and {k} share a digram")

    # ------------------------------------------------------------------
    # structure access
    # ------------------------------------------------------------------

    def _require(self):
        if not self.finalized:
            raise StateError("index not finalized")

    def symbol_digram_of_rule(self, k):
        """(x, y) symbol ids of rule k, resolved through tree navigation."""
        got = self._digrams.get(k)
        if got is None:
            tree = self.tree
            left, right = tree.children(tree.node_of_variable(k))
            got = (self.node_symbol(left), self.node_symbol(right))
            self._digrams[k] = got
        return got

    def symbol_digram(self, sym):
        return self.symbol_digram_of_rule(sym - SIGMA_OFFSET)

    def node_symbol(self, pos):
        """Unified symbol id of the node at a tree position."""
        tree = self.tree
        if tree.bits.access(pos) == 1:
            return SIGMA_OFFSET + tree.variable_of_node(pos)
        return self._label_list[tree.leaf_ordinal(pos)]

    def symbol_length(self, sym):
        return 1 if sym < SIGMA_OFFSET else self.lengths[sym - SIGMA_OFFSET - 1]

    def node_length(self, pos):
        return self.symbol_length(self.node_symbol(pos))

    def parent_dir(self, pos):
        got = self._parents.get(pos)
        if got is None:
            got = self.tree.parent_and_direction(pos)
            self._parents[pos] = got
        return got

    def label_positions(self, label):
        """Tree positions of all leaves carrying a label, left to right.

        Materialized once from the label sequence; equivalent to iterating
        select on the wavelet tree for each ordinal.
        """
        if self._positions is None:
            self._require()
            positions = {}
            bits = self.tree.bits
            ordinal = 0
            for pos in range(len(bits)):
                if bits.access(pos) == 0:
                    positions.setdefault(self._label_list[ordinal], []).append(pos)
                    ordinal += 1
            self._positions = positions
        return self._positions.get(label, ())

    def symbol_occurrence_bound(self, sym):
        """Leaf-label count of a symbol (plus its defining node for rules)."""
        base = len(self.label_positions(sym))
        return base + (1 if sym >= SIGMA_OFFSET else 0)

    @property
    def root_symbol(self):
        self._require()
        n = self.rule_count
        return SIGMA_OFFSET + n if n else self._label_list[0]

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def extract(self, i, j):
        """S[i..j], both ends inclusive."""
        self._require()
        if not (0 <= i <= j < self.text_length):
            raise RangeError(f"extract({i}, {j}) outside text of "
                             f"length {self.text_length}")
        need = j - i + 1
        out = bytearray()
        digram = self.symbol_digram
        length = self.symbol_length
        stack = [(self.root_symbol, i)]
        while stack and need:
            sym, skip = stack.pop()
            if sym < SIGMA_OFFSET:
                out.append(sym)
                need -= 1
                continue
            x, y = digram(sym)
            lx = length(x)
            if skip >= lx:
                stack.append((y, skip - lx))
            else:
                stack.append((y, 0))
                stack.append((x, skip))
        return bytes(out)

    def matches_at(self, pos, pattern):
        """True iff S[pos .. pos+len(pattern)-1] equals the pattern."""
        self._require()
        m = len(pattern)
        if pos < 0 or pos + m > self.text_length:
            return False
        k = 0
        digram = self.symbol_digram
        length = self.symbol_length
        stack = [(self.root_symbol, pos)]
        while stack and k < m:
            sym, skip = stack.pop()
            if sym < SIGMA_OFFSET:
                if sym != pattern[k]:
                    return False
                k += 1
                continue
            x, y = digram(sym)
            lx = length(x)
            if skip >= lx:
                stack.append((y, skip - lx))
            else:
                stack.append((y, 0))
                stack.append((x, skip))
        return k == m

    def pattern_core(self, pattern):
        self._require()
        return search.pattern_core(self, pattern)

    def next_core_occurrences(self, sym):
        self._require()
        return search.core_occurrences(self, sym)

    def node_text_offset(self, occ):
        self._require()
        return search.node_text_offset(self, occ)

    def locate(self, pattern):
        """All starting positions of the pattern, ascending, overlaps included."""
        self._require()
        return search.locate(self, pattern)

    def count(self, pattern):
        return len(self.locate(pattern))

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------

    def save(self, sink):
        self._require()
        if isinstance(sink, (str, bytes)):
            with open(sink, "wb") as fh:
                self.save(fh)
            return
        n = self.rule_count
        sink.write(_MAGIC)
        sink.write(bytes([_VERSION]))
        sink.write(struct.pack("<QQI", self.text_length, n, SIGMA_OFFSET))
        bits = self.tree.bits
        sink.write(struct.pack("<Q", len(bits)))
        sink.write(bits.to_bytes())
        wl = (SIGMA_OFFSET + n).bit_length()
        sink.write(_pack_values(self._label_list, wl))
        wr = self.text_length.bit_length()
        sink.write(_pack_values(self.lengths, wr))

    def to_bytes(self):
        buf = io.BytesIO()
        self.save(buf)
        return buf.getvalue()

    @classmethod
    def load(cls, source, config=None):
        if isinstance(source, (str,)):
            with open(source, "rb") as fh:
                return cls.load(fh, config)
        data = source.read() if hasattr(source, "read") else bytes(source)
        if len(data) < 25:
            raise FormatError("index file too short")
        if data[:4] != _MAGIC:
            raise FormatError("bad magic")
        if data[4] != _VERSION:
            raise FormatError(f"unsupported version {data[4]}")
        n_text, n, sigma = struct.unpack_from("<QQI", data, 5)
        pos = 25
        if sigma != SIGMA_OFFSET:
            raise FormatError(f"unsupported symbol offset {sigma}")
        if n_text < 1:
            raise FormatError("empty text")
        (nbits,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        if nbits != 2 * n + 2:
            raise FormatError("tree bit count does not match rule count")
        nbytes = (nbits + 7) // 8
        if pos + nbytes > len(data):
            raise FormatError("truncated tree bits")
        bv = AppendBitVector.from_bytes(data[pos:pos + nbytes], nbits)
        pos += nbytes
        wl = (SIGMA_OFFSET + n).bit_length()
        labels, used = _unpack_values(data[pos:], n + 1, wl)
        pos += used
        wr = n_text.bit_length()
        lengths, used = _unpack_values(data[pos:], n, wr)
        pos += used
        if pos != len(data):
            raise FormatError("trailing bytes after index payload")
        if bv.ones != n + 1 or bv.zeros != n + 1:
            raise FormatError("tree shape bit counts are inconsistent")

        idx = cls(config)
        idx._parser = None
        idx.text_length = n_text
        try:
            idx.tree = PostOrderTree.from_bits(bv, n)
        except Exception as exc:
            raise FormatError(f"malformed tree shape: {exc}") from exc
        wt = DynamicWaveletTree()
        for v in labels:
            if v > SIGMA_OFFSET + n:
                raise FormatError(f"leaf label {v} beyond rule count")
            wt.push(v)
        idx.labels = wt
        idx._label_list = labels
        idx.lengths = lengths
        root_len = lengths[-1] if n else 1
        if root_len != n_text:
            raise FormatError("root expansion length does not match text length")
        idx._build_rules()
        return idx

    # ------------------------------------------------------------------
    # reporting
    # ------------------------------------------------------------------

    def stats(self):
        self._require()
        n = self.rule_count
        wl = (SIGMA_OFFSET + n).bit_length()
        wr = self.text_length.bit_length()
        info = {
            "text_length": self.text_length,
            "rules": n,
            "tree_bits": len(self.tree.bits),
            "leaf_labels": len(self._label_list),
            "label_bits": wl * (n + 1),
            "length_bits": wr * n,
            "index_bytes": len(self.to_bytes()),
        }
        if self.build_stats:
            info["parse_levels"] = self.build_stats["levels"]
            info["max_level_fill"] = max(self.build_stats["max_fill"], default=0)
        return info
