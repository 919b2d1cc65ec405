import io
import random
import sys

import pytest

from oesp.errors import (EmptyInputError, EmptyPatternError, FormatError,
                         NotFoundError, RangeError, StateError)
from oesp.index import IndexConfig, OespIndex

from conftest import naive_locate, random_text


def expansion_offsets(idx):
    """Brute-force full parse tree expansion: symbol -> sorted text offsets."""
    occ = {}
    sys.setrecursionlimit(200000)

    def rec(sym, off):
        occ.setdefault(sym, []).append(off)
        if sym >= 256:
            x, y = idx.symbol_digram(sym)
            rec(x, off)
            rec(y, off + idx.symbol_length(x))

    rec(idx.root_symbol, 0)
    return {s: sorted(v) for s, v in occ.items()}


@pytest.fixture(scope="module")
def abab():
    return OespIndex.build(b"abab")


# ---------------------------------------------------------------------------
# extraction
# ---------------------------------------------------------------------------

def test_extract_full(abab):
    assert abab.extract(0, 3) == b"abab"


def test_extract_inner(abab):
    assert abab.extract(1, 2) == b"ba"


def test_extract_bad_range(abab):
    with pytest.raises(RangeError):
        abab.extract(3, 1)
    with pytest.raises(RangeError):
        abab.extract(0, 4)
    with pytest.raises(RangeError):
        abab.extract(-1, 2)


def test_extract_random_ranges():
    rng = random.Random(500)
    for _ in range(40):
        text = random_text(rng, 300)
        idx = OespIndex.build(text)
        n = len(text)
        assert idx.extract(0, n - 1) == text
        for _ in range(25):
            i = rng.randrange(n)
            j = rng.randrange(i, n)
            assert idx.extract(i, j) == text[i:j + 1]


# ---------------------------------------------------------------------------
# occurrence enumeration
# ---------------------------------------------------------------------------

def test_next_core_example(abab):
    occs = abab.next_core_occurrences(257)
    offsets = sorted(abab.node_text_offset(o) for o in occs)
    assert offsets == [0, 2]


def test_root_occurs_once(abab):
    occs = abab.next_core_occurrences(abab.root_symbol)
    assert len(occs) == 1
    assert abab.node_text_offset(occs[0]) == 0


def test_unknown_variable(abab):
    with pytest.raises(NotFoundError):
        abab.next_core_occurrences(256 + abab.rule_count + 1)


def test_node_text_offset_anchor_example(abab):
    from oesp.search import CoreOccurrence
    assert abab.node_text_offset(CoreOccurrence(3, ())) == 2


def test_exactly_once_against_expansion():
    rng = random.Random(41)
    for _ in range(30):
        text = random_text(rng, 250, sigmas=(2, 4, 26), min_len=2)
        idx = OespIndex.build(text)
        oracle = expansion_offsets(idx)
        for k in range(1, idx.rule_count + 1):
            occs = idx.next_core_occurrences(256 + k)
            assert len(set(occs)) == len(occs)
            offs = sorted(idx.node_text_offset(o) for o in occs)
            assert offs == oracle[256 + k]
        for b in set(text):
            occs = idx.next_core_occurrences(b)
            offs = sorted(idx.node_text_offset(o) for o in occs)
            assert offs == oracle[b]


def test_expansion_lengths_match_rule_lengths():
    rng = random.Random(43)
    for _ in range(25):
        text = random_text(rng, 250, min_len=2)
        idx = OespIndex.build(text)

        def span(sym):
            if sym < 256:
                return 1
            x, y = idx.symbol_digram(sym)
            return span(x) + span(y)

        for k in range(1, idx.rule_count + 1):
            assert idx.lengths[k - 1] == span(256 + k)
        assert idx.lengths[-1] == len(text) if idx.rule_count else True


def test_leftmost_definition_property():
    rng = random.Random(44)
    for _ in range(25):
        text = random_text(rng, 250, min_len=2)
        idx = OespIndex.build(text)
        tree = idx.tree
        ordinal = 0
        for pos in range(len(tree.bits) - 1):
            if tree.bits.access(pos) == 0:
                label = idx._label_list[ordinal]
                ordinal += 1
                if label >= 256:
                    assert tree.node_of_variable(label - 256) < pos


# ---------------------------------------------------------------------------
# pattern queries
# ---------------------------------------------------------------------------

def test_locate_examples(abab):
    assert abab.locate(b"ab") == [0, 2]
    assert abab.locate(b"abab") == [0]
    assert abab.locate(b"ba") == [1]
    assert abab.count(b"ab") == 2
    assert abab.count(b"zz") == 0


def test_locate_overlapping():
    idx = OespIndex.build(b"aaaa")
    assert idx.locate(b"aa") == [0, 1, 2]


def test_pattern_core_known_digram(abab):
    ev = abab.pattern_core(b"ab")
    assert ev is not None
    assert ev.core_offset + ev.core_length <= 2
    # levels record the read-only parse; the pair digram resolves to rule 1
    assert ev.levels[1] == [257]


def test_pattern_core_unknown_digram(abab):
    assert abab.pattern_core(b"zq") is None


def test_empty_pattern(abab):
    with pytest.raises(EmptyPatternError):
        abab.locate(b"")
    with pytest.raises(EmptyPatternError):
        abab.pattern_core(b"")


def test_pattern_longer_than_text(abab):
    assert abab.locate(b"ababa") == []


def test_single_byte_text():
    idx = OespIndex.build(b"c")
    assert idx.rule_count == 0
    assert idx.extract(0, 0) == b"c"
    assert idx.locate(b"c") == [0]
    assert idx.locate(b"d") == []
    assert idx.count(b"c") == 1


def test_locate_matches_naive_scan():
    rng = random.Random(777)
    for _ in range(50):
        text = random_text(rng, 400)
        idx = OespIndex.build(text)
        n = len(text)
        for _ in range(10):
            m = rng.randint(1, min(32, n))
            if rng.random() < 0.6:
                start = rng.randrange(n - m + 1)
                pattern = text[start:start + m]
            else:
                pattern = bytes(rng.randrange(256) for _ in range(m))
            assert idx.locate(pattern) == naive_locate(text, pattern)


def test_repetitive_text_locate():
    text = b"abcabcabcabc" * 40 + b"xyz" + b"abcabcabcabc" * 40
    idx = OespIndex.build(text)
    for pattern in (b"abc", b"cab", b"xyz", b"cxy", b"abcabc", b"zabc"):
        assert idx.locate(pattern) == naive_locate(text, pattern)


# ---------------------------------------------------------------------------
# lifecycle
# ---------------------------------------------------------------------------

def test_append_after_finalize(abab):
    with pytest.raises(StateError):
        abab.append(97)
    with pytest.raises(StateError):
        abab.finalize()


def test_finalize_empty():
    with pytest.raises(EmptyInputError):
        OespIndex().finalize()


def test_queries_require_finalize():
    idx = OespIndex()
    idx.append(97)
    with pytest.raises(StateError):
        idx.extract(0, 0)
    with pytest.raises(StateError):
        idx.locate(b"a")
    with pytest.raises(StateError):
        idx.save(io.BytesIO())


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_save_load_round_trip(abab):
    blob = abab.to_bytes()
    back = OespIndex.load(blob)
    assert back.to_bytes() == blob
    assert back.locate(b"ab") == [0, 2]
    assert back.extract(0, 3) == b"abab"
    assert back.count(b"b") == 2
    ev = back.pattern_core(b"ab")
    assert ev is not None


def test_round_trip_preserves_structures():
    rng = random.Random(600)
    for _ in range(25):
        text = random_text(rng, 300)
        idx = OespIndex.build(text)
        back = OespIndex.load(idx.to_bytes())
        assert list(back.tree.bits) == list(idx.tree.bits)
        assert back._label_list == idx._label_list
        assert back.lengths == idx.lengths
        assert back.text_length == idx.text_length


def test_corrupt_magic(abab):
    blob = bytearray(abab.to_bytes())
    blob[0] = 0x58
    with pytest.raises(FormatError):
        OespIndex.load(bytes(blob))


def test_bad_version(abab):
    blob = bytearray(abab.to_bytes())
    blob[4] = 9
    with pytest.raises(FormatError):
        OespIndex.load(bytes(blob))


def test_truncation(abab):
    blob = abab.to_bytes()
    for cut in (3, 10, 24, len(blob) - 1):
        with pytest.raises(FormatError):
            OespIndex.load(blob[:cut])


def test_trailing_garbage(abab):
    with pytest.raises(FormatError):
        OespIndex.load(abab.to_bytes() + b"\x00")


def test_load_from_file(tmp_path, abab):
    path = tmp_path / "t.idx"
    abab.save(str(path))
    back = OespIndex.load(str(path))
    assert back.locate(b"ab") == [0, 2]


def test_large_repetitive_round_trip():
    # ~1 MB of repetitive runs-heavy text; structures preserved bit-exactly
    rng = random.Random(321)
    block = bytearray()
    while len(block) < 2048:
        block.extend([rng.randrange(256)] * rng.randint(2, 8))
    data = bytes(block) * 512
    idx = OespIndex.build(data)
    blob = idx.to_bytes()
    back = OespIndex.load(blob)
    assert list(back.tree.bits) == list(idx.tree.bits)
    assert back._label_list == idx._label_list
    assert back.lengths == idx.lengths
    assert back.to_bytes() == blob
    assert len(blob) < len(data)


def test_custom_load_factor():
    idx = OespIndex.build(b"mississippi", config=IndexConfig(load_factor=0.3))
    assert idx.rules.load_factor == 0.3
    assert idx.locate(b"ss") == [2, 5]
    assert idx.locate(b"issi") == [1, 4]


def test_stats_keys(abab):
    st = abab.stats()
    for key in ("text_length", "rules", "tree_bits", "index_bytes",
                "parse_levels", "max_level_fill"):
        assert key in st
    assert st["text_length"] == 4
    assert st["rules"] == 2
    assert st["tree_bits"] == 6
