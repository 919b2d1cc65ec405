"""Append-only bit sequence with rank/select/access.

Storage substrate for the post-order tree shape and for every wavelet-tree
node.  Bits are packed into 64-bit words; a directory of cumulative
popcounts, one entry per 512-bit block, gives O(block) rank and
O(lg blocks + block) select.  Appending never moves or rewrites a bit that
was already readable.
"""

from bisect import bisect_left

from .errors import NotFoundError, RangeError

_WORD = 64
_BLOCK_WORDS = 8          # directory granularity: 8 words = 512 bits
_BLOCK_BITS = _WORD * _BLOCK_WORDS


class AppendBitVector:
    __slots__ = ("_words", "_len", "_ones", "_dir")

    def __init__(self, bits=None):
        self._words = [0]
        self._len = 0
        self._ones = 0
        # _dir[b] = number of ones in blocks 0..b-1 (cumulative at block start)
        self._dir = [0]
        if bits is not None:
            for b in bits:
                self.push(b)

    def __len__(self):
        return self._len

    @property
    def ones(self):
        return self._ones

    @property
    def zeros(self):
        return self._len - self._ones

    def push(self, bit):
        """Append one bit (0 or 1) at position len."""
        i = self._len
        w = i >> 6
        if w == len(self._words):
            self._words.append(0)
            if w % _BLOCK_WORDS == 0:
                self._dir.append(self._ones)
        if bit:
            self._words[w] |= 1 << (i & 63)
            self._ones += 1
        self._len += 1

    def access(self, i):
        if not 0 <= i < self._len:
            raise RangeError(f"access({i}) out of range for length {self._len}")
        return (self._words[i >> 6] >> (i & 63)) & 1

    def __getitem__(self, i):
        return self.access(i)

    def rank(self, c, i):
        """Number of occurrences of c in positions [0, i], inclusive."""
        if not 0 <= i < self._len:
            raise RangeError(f"rank({c}, {i}) out of range for length {self._len}")
        r1 = self._rank1(i)
        return r1 if c else (i + 1 - r1)

    def _rank1(self, i):
        # ones in [0, i]
        w = i >> 6
        blk = w // _BLOCK_WORDS
        count = self._dir[blk]
        words = self._words
        for k in range(blk * _BLOCK_WORDS, w):
            count += words[k].bit_count()
        tail = words[w] & ((1 << ((i & 63) + 1)) - 1)
        return count + tail.bit_count()

    def select(self, c, j):
        """0-based position of the j-th (1-based) occurrence of c."""
        if j < 1:
            raise RangeError(f"select ordinal must be >= 1, got {j}")
        total = self._ones if c else self.zeros
        if j > total:
            raise NotFoundError(f"select({c}, {j}): only {total} occurrences")
        ndir = len(self._dir)
        if c:
            blk = bisect_left(self._dir, j, 1, ndir) - 1
            rem = j - self._dir[blk]
        else:
            # zeros before block b = b*BLOCK_BITS - dir[b]
            lo, hi = 0, ndir
            while lo < hi:
                mid = (lo + hi) // 2
                if mid * _BLOCK_BITS - self._dir[mid] < j:
                    lo = mid + 1
                else:
                    hi = mid
            blk = lo - 1
            rem = j - (blk * _BLOCK_BITS - self._dir[blk])
        words = self._words
        w = blk * _BLOCK_WORDS
        while True:
            word = words[w] if c else ~words[w]
            n = word.bit_count() if c else (word & 0xFFFFFFFFFFFFFFFF).bit_count()
            if n >= rem:
                break
            rem -= n
            w += 1
        word = words[w] if c else (~words[w] & 0xFFFFFFFFFFFFFFFF)
        for _ in range(rem - 1):
            word &= word - 1
        return (w << 6) + ((word & -word).bit_length() - 1)

    def to_bytes(self):
        """Bits packed little-endian within bytes, zero-padded to a byte."""
        nbytes = (self._len + 7) // 8
        out = bytearray(nbytes)
        words = self._words
        for k in range((self._len + 63) // 64):
            chunk = words[k].to_bytes(8, "little")
            start = k * 8
            out[start:start + 8] = chunk[: max(0, min(8, nbytes - start))]
        return bytes(out)

    @classmethod
    def from_bytes(cls, data, nbits):
        if len(data) < (nbits + 7) // 8:
            raise RangeError("bit payload shorter than declared bit count")
        bv = cls()
        for i in range(nbits):
            bv.push((data[i >> 3] >> (i & 7)) & 1)
        return bv

    def __iter__(self):
        for i in range(self._len):
            yield (self._words[i >> 6] >> (i & 63)) & 1
