"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

import math
import random
import sys
import time

import pytest

from oesp.bits import AppendBitVector
from oesp.index import OespIndex
from oesp.wavelet import DynamicWaveletTree

from conftest import naive_locate


def report(name, ok, detail=""):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"{name} failed: {detail}"


@pytest.fixture(scope="module")
def query_corpus():
    """200 random texts with their indexes (criteria 1 and 2)."""
    rng = random.Random(0xACCE)
    out = []
    for _ in range(200):
        n = rng.randint(1, 2000)
        sigma = rng.choice([2, 4, 26, 256])
        text = bytes(rng.randrange(sigma) for _ in range(n))
        out.append((text, sigma, OespIndex.build(text)))
    return out


@pytest.fixture(scope="module")
def small_corpus():
    """50 random texts with their indexes (criteria 3, 5 and 6)."""
    rng = random.Random(0x50C)
    out = []
    for _ in range(50):
        n = rng.randint(2, 400)
        sigma = rng.choice([2, 4, 26, 256])
        text = bytes(rng.randrange(sigma) for _ in range(n))
        out.append((text, OespIndex.build(text)))
    return out


@pytest.fixture(scope="module")
def copies_index(mutated_copies_corpus):
    return OespIndex.build(mutated_copies_corpus)


def expansion_offsets(idx):
    occ = {}
    sys.setrecursionlimit(400000)

    def rec(sym, off):
        occ.setdefault(sym, []).append(off)
        if sym >= 256:
            x, y = idx.symbol_digram(sym)
            rec(x, off)
            rec(y, off + idx.symbol_length(x))

    rec(idx.root_symbol, 0)
    return occ


def test_criterion_1_locate_oracle(query_corpus):
    rng = random.Random(0xBEEF)
    t0 = time.time()
    checked = 0
    for text, sigma, idx in query_corpus:
        n = len(text)
        for _ in range(20):
            m = rng.randint(1, min(64, n))
            if rng.random() < 0.5:
                start = rng.randrange(n - m + 1)
                pattern = text[start:start + m]
            else:
                pattern = bytes(rng.randrange(sigma) for _ in range(m))
            expected = naive_locate(text, pattern)
            got = idx.locate(pattern)
            assert got == expected, (text, pattern, got[:5], expected[:5])
            assert idx.count(pattern) == len(expected)
            checked += 1
    elapsed = time.time() - t0
    report("1 locate/count oracle equivalence",
           checked == 4000 and elapsed < 60,
           f"({checked} queries, {elapsed:.1f}s)")


def test_criterion_2_extract_round_trip(query_corpus):
    rng = random.Random(0xE27)
    for text, _, idx in query_corpus:
        n = len(text)
        assert idx.extract(0, n - 1) == text
        for _ in range(100):
            i = rng.randrange(n)
            j = rng.randrange(i, n)
            assert idx.extract(i, j) == text[i:j + 1]
    report("2 extract round-trip", True,
           f"({len(query_corpus)} texts x 100 ranges)")


def test_criterion_3_online_determinism(small_corpus):
    for text, bulk_idx in small_corpus:
        stepwise = OespIndex()
        for b in text:
            stepwise.append(b)
        stepwise.finalize()
        assert stepwise.to_bytes() == bulk_idx.to_bytes()
    report("3 online determinism", True, f"({len(small_corpus)} texts)")


def test_criterion_4_compression(mutated_copies_corpus, copies_index):
    s = mutated_copies_corpus
    idx = copies_index
    size = idx.stats()["index_bytes"]
    ok_copies = size < len(s) and idx.rule_count < len(s) / 5
    run_idx = OespIndex.build(b"a" * (1 << 16))
    levels = run_idx.stats()["parse_levels"]
    ok_run = run_idx.rule_count <= 100 and levels <= 16 + 2
    report("4 compression behavior", ok_copies and ok_run,
           f"(copies: {size}B vs {len(s)}B, n={idx.rule_count}; "
           f"run: n={run_idx.rule_count}, levels={levels})")


def test_criterion_5_exactly_once(small_corpus):
    total = 0
    for text, idx in small_corpus:
        oracle = expansion_offsets(idx)
        for k in range(1, idx.rule_count + 1):
            sym = 256 + k
            occs = idx.next_core_occurrences(sym)
            assert len(set(occs)) == len(occs), "duplicate (anchor, path)"
            offs = sorted(idx.node_text_offset(o) for o in occs)
            assert offs == sorted(oracle[sym])
            total += len(occs)
    report("5 exactly-once enumeration", True,
           f"({len(small_corpus)} texts, {total} occurrences)")


def test_criterion_6_structure_invariants(small_corpus):
    for text, idx in small_corpus:
        tree = idx.tree
        n = idx.rule_count
        assert len(tree.bits) == 2 * n + 2
        assert tree.bits.access(len(tree.bits) - 1) == 1
        ordinal = 0
        for pos in range(len(tree.bits) - 1):
            if tree.bits.access(pos) == 0:
                label = idx._label_list[ordinal]
                ordinal += 1
                if label >= 256:
                    assert tree.node_of_variable(label - 256) < pos

        def span(sym):
            if sym < 256:
                return 1
            x, y = idx.symbol_digram(sym)
            return span(x) + span(y)

        for k in range(1, n + 1):
            assert idx.lengths[k - 1] == span(256 + k)
    report("6 structure invariants", True, f"({len(small_corpus)} texts)")


def test_criterion_7_substructure_oracles():
    rng = random.Random(0x0711)
    bv = AppendBitVector()
    bits = []
    ops = 0
    while ops < 100_000:
        action = rng.random()
        if action < 0.5 or not bits:
            b = rng.randint(0, 1)
            bv.push(b)
            bits.append(b)
        elif action < 0.7:
            i = rng.randrange(len(bits))
            assert bv.access(i) == bits[i]
        elif action < 0.9:
            i = rng.randrange(len(bits))
            c = rng.randint(0, 1)
            assert bv.rank(c, i) == bits[:i + 1].count(c)
        else:
            c = rng.randint(0, 1)
            total = bits.count(c)
            if total:
                j = rng.randint(1, total)
                pos = bv.select(c, j)
                assert bits[pos] == c and bits[:pos + 1].count(c) == j
        ops += 1

    wt = DynamicWaveletTree(initial_capacity=2)   # forces repeated growth
    vals = []
    ops = 0
    while ops < 100_000:
        action = rng.random()
        if action < 0.5 or not vals:
            v = rng.randrange(4096)
            wt.push(v)
            vals.append(v)
        elif action < 0.7:
            i = rng.randrange(len(vals))
            assert wt.access(i) == vals[i]
        elif action < 0.9:
            i = rng.randrange(len(vals))
            v = rng.randrange(4300)
            assert wt.rank(v, i) == vals[:i + 1].count(v)
        else:
            v = rng.choice(vals)
            total = vals.count(v)
            j = rng.randint(1, total + 1)
            pos = wt.select(v, j)
            if j > total:
                assert pos is None
            else:
                assert vals[pos] == v and vals[:pos + 1].count(v) == j
        ops += 1
    assert wt.capacity >= 4096
    report("7 substructure oracles", True, "(100k ops each)")


def test_criterion_8_streaming_working_space(mutated_copies_corpus,
                                             copies_index):
    st = copies_index.build_stats
    n = len(mutated_copies_corpus)
    bound = math.log2(n) + 2
    levels_ok = st["levels"] <= bound
    window = st["window"]
    fills_ok = all(fill <= window for fill in st["max_fill"])
    report("8 streaming working space", levels_ok and fills_ok,
           f"(levels={st['levels']} <= {bound:.1f}, "
           f"max fill={max(st['max_fill'])} <= W={window})")
