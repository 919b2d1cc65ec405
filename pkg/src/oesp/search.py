"""Pattern search over a finalized index.

The pattern is parsed with the same segmentation and block rules as the
text, except that rule lookups are read-only: a digram the grammar never
formed blocks consolidation at that spot and the affected span goes dead.
Every consolidated symbol whose position in the parse provably matches the
text parse of any occurrence (see _stable below) is a core candidate; the
candidate with the longest expansion wins, ties going to the rarest.

All occurrences of the core in the parse tree are then enumerated over the
implicit tree: the defining node is the leftmost occurrence, and every leaf
labeled with an ancestor's variable roots a pruned copy that contains
another one.  Each occurrence is an (anchor, path) pair; its text offset
comes from climbing the anchor to the root and walking the path down
through the grammar.  Candidate text positions are verified by extraction,
so a too-conservative core can only cost time, never a wrong answer.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import EmptyPatternError, NotFoundError
from .esp import _mix_skey, chunk_lengths, classify, type2_blocks_with_cuts


class CoreOccurrence(NamedTuple):
    anchor: int          # node position in the tree shape
    path: tuple          # 'L'/'R' steps from the anchor's expansion to the core


@dataclass
class Evidence:
    """Outcome of parsing a pattern against the grammar."""

    levels: list         # per parse level: list of symbol ids (None = dead)
    core_symbol: int     # unified id: byte value or 256 + rule id
    core_offset: int     # char offset of the core's expansion inside the pattern
    core_length: int     # expansion length of the core
    core_level: int


class _Tok(NamedTuple):
    sym: Optional[int]
    skey: int
    start: int
    length: int
    stable: bool


def _parse_pattern(index, pattern, delta):
    """Parse the pattern read-only; returns (levels_of_tokens, candidates).

    Candidates are (token, level) pairs for every consolidated symbol,
    including the inner symbol of each trigram block.
    """
    toks = [_Tok(b, b, i, 1, True) for i, b in enumerate(pattern)]
    levels = [toks]
    cands = [(t, 0) for t in toks]
    dead_seq = 0
    lookup = index.rules.lookup_readonly

    while len(toks) > 1:
        level_no = len(levels)
        m = len(toks)
        keys = []
        for t in toks:
            if t.sym is None:
                keys.append(("dead", dead_seq))
                dead_seq += 1
            else:
                keys.append(t.sym)
        nxt = []
        live_merge = False

        def window_ok(i, j):
            if i - delta < 0 or j + delta > m - 1:
                return False
            for t in toks[i - delta: j + delta + 1]:
                if t.sym is None or not t.stable:
                    return False
            return True

        for seg in classify(keys):
            part = toks[seg.start: seg.stop]
            if len(part) == 1:
                nxt.append(part[0])
                continue
            if seg.kind == "type2":
                spans, cuts = type2_blocks_with_cuts([t.skey for t in part])
            else:
                spans = []
                off = 0
                for ln in chunk_lengths(len(part)):
                    spans.append((off, ln))
                    off += ln
                cuts = []
            seg_end_real = seg.stop < m
            start_real = seg.start > 0
            for st, ln in spans:
                i = seg.start + st
                j = i + ln - 1
                sub = toks[i: j + 1]
                anchored = False
                if cuts and st > cuts[0] and st + ln - 1 <= cuts[-1]:
                    anchored = True      # boundary set by local landmarks only
                elif start_real:
                    if seg_end_real or (st + ln - 1) <= (len(part) - 1 - 4):
                        anchored = True
                stable = (anchored and window_ok(i, j)
                          and all(t.stable and t.sym is not None for t in sub))
                tok = None
                if all(t.sym is not None for t in sub):
                    tok = _merge_block(index, lookup, sub, stable, cands,
                                       level_no)
                if tok is None:
                    tok = _Tok(None, 0, sub[0].start,
                               sum(t.length for t in sub), False)
                else:
                    live_merge = True
                nxt.append(tok)
        toks = nxt
        levels.append(toks)
        if not live_merge:
            break
    return levels, cands


def _merge_block(index, lookup, sub, stable, cands, level_no):
    """Consolidate a 2- or 3-token block; returns the merged token or None."""
    if len(sub) == 3:
        a, b, c = sub
        yid = lookup(b.sym, c.sym)
        if yid is None:
            return None
        y = _Tok(256 + yid, _mix_skey(b.skey, c.skey),
                 b.start, b.length + c.length, stable)
        cands.append((y, level_no))
        xid = lookup(a.sym, y.sym)
        if xid is None:
            return None
        tok = _Tok(256 + xid, _mix_skey(a.skey, y.skey),
                   a.start, a.length + y.length, stable)
    else:
        a, b = sub
        xid = lookup(a.sym, b.sym)
        if xid is None:
            return None
        tok = _Tok(256 + xid, _mix_skey(a.skey, b.skey),
                   a.start, a.length + b.length, stable)
    cands.append((tok, level_no))
    return tok


def pattern_core(index, pattern):
    """Evidence for the pattern, or None when it cannot occur / has no core."""
    if len(pattern) == 0:
        raise EmptyPatternError("empty pattern")
    # a byte that never reaches a leaf label does not occur in the text at all
    for b in set(pattern):
        if index.symbol_occurrence_bound(b) == 0:
            return None
    levels_toks, cands = _parse_pattern(index, pattern,
                                        index.config.stability_margin)
    best = None
    best_key = None
    best_level = 0
    for t, lvl in cands:
        if t.sym is None or not t.stable:
            continue
        key = (-t.length, index.symbol_occurrence_bound(t.sym), t.start, t.sym)
        if best_key is None or key < best_key:
            best, best_key, best_level = t, key, lvl
    if best is None:
        return None
    levels = [[t.sym for t in toks] for toks in levels_toks]
    return Evidence(levels, best.sym, best.start, best.length, best_level)


def core_occurrences(index, sym):
    """All (anchor, path) occurrences of a symbol over the implicit tree."""
    tree = index.tree
    out = []
    if sym >= 256:
        k = sym - 256
        if not 1 <= k <= index.rule_count:
            raise NotFoundError(f"symbol {sym} is not in the grammar")
        v = tree.node_of_variable(k)
        out.append(CoreOccurrence(v, ()))
        _next_core(index, v, (), out)
    else:
        if not 0 <= sym <= 255:
            raise NotFoundError(f"symbol {sym} is not a byte")
        root = tree.root
        for u in index.label_positions(sym):
            out.append(CoreOccurrence(u, ()))
            if u != root:
                par, d = index.parent_dir(u)
                _next_core(index, par, (d,), out)
    return out


def _next_core(index, vpos, path, out):
    """Recursive copy enumeration: vpos with `path` steps down to the core."""
    tree = index.tree
    root = tree.root
    if vpos != root:
        par, d = index.parent_dir(vpos)
        _next_core(index, par, path + (d,), out)
    if tree.is_internal(vpos):
        lbl = 256 + tree.variable_of_node(vpos)
        for u in index.label_positions(lbl):
            out.append(CoreOccurrence(u, path))
            par, d = index.parent_dir(u)
            _next_core(index, par, path + (d,), out)


def node_text_offset(index, occ):
    """Text offset of the core occurrence's expansion."""
    tree = index.tree
    root = tree.root
    off = 0
    cur = occ.anchor
    while cur != root:
        par, d = index.parent_dir(cur)
        if d == "R":
            left, _ = tree.children(par)
            off += index.node_length(left)
        cur = par
    if occ.path:
        # the path is a stack: it was pushed while climbing, so the step at
        # the anchor's expansion root is the last element
        sym = index.node_symbol(occ.anchor)
        for d in reversed(occ.path):
            x, y = index.symbol_digram(sym)
            if d == "R":
                off += index.symbol_length(x)
                sym = y
            else:
                sym = x
    return off


def locate(index, pattern):
    if len(pattern) == 0:
        raise EmptyPatternError("empty pattern")
    m = len(pattern)
    n_text = index.text_length
    if m > n_text:
        return []
    ev = pattern_core(index, pattern)
    if ev is None:
        return []
    hits = set()
    seen = set()
    for occ in core_occurrences(index, ev.core_symbol):
        t = node_text_offset(index, occ) - ev.core_offset
        if t in seen:
            continue
        seen.add(t)
        if 0 <= t <= n_text - m and index.matches_at(t, pattern):
            hits.add(t)
    return sorted(hits)
