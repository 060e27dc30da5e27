"""Packed bitvector with constant-time-amortized rank support.

Bits are 1-based and appended LSB-first into 64-bit words.  rank(i) counts
the 1s in positions 1..i.  Two sample levels back the query: an absolute
64-bit counter every 2**16 bits and a relative 16-bit counter every `s`
words, so the overhead is n/1024 + n/(4s) bits.
"""

from __future__ import annotations

import struct
from array import array

WORD_BITS = 64
SUPERBLOCK_WORDS = 1024  # 2**16 bits


def _popcount(x: int) -> int:
    return x.bit_count()


class RankBitvectorBuilder:
    """Append-only builder; finalize() freezes it into a RankBitvector."""

    def __init__(self, s: int = 4):
        if s < 1 or SUPERBLOCK_WORDS % s != 0:
            raise ValueError("sampling rate must divide %d" % SUPERBLOCK_WORDS)
        self.s = s
        self.words: list[int] = []
        self.n = 0
        self._cur = 0
        self._fill = 0
        self._done = False

    def append_bits(self, word: int, count: int) -> None:
        """Append the low `count` bits of `word` (1 <= count <= 64)."""
        if self._done:
            raise RuntimeError("builder already finalized")
        if not 1 <= count <= WORD_BITS:
            raise ValueError("count out of range")
        word &= (1 << count) - 1 if count < WORD_BITS else ~0 & 0xFFFFFFFFFFFFFFFF
        self._cur |= (word << self._fill) & 0xFFFFFFFFFFFFFFFF
        taken = WORD_BITS - self._fill
        if count >= taken:
            self.words.append(self._cur)
            self._cur = word >> taken
            self._fill = count - taken
        else:
            self._fill += count
        self.n += count

    def finalize(self) -> "RankBitvector":
        if self._done:
            raise RuntimeError("builder already finalized")
        self._done = True
        if self._fill:
            self.words.append(self._cur)
        return RankBitvector(self.words, self.n, self.s)


class RankBitvector:
    """Immutable bit sequence B[1..n] answering rank in O(s) word operations."""

    __slots__ = ("words", "n", "s", "superblock_sums", "block_sums")

    def __init__(self, words: list[int], n: int, s: int = 4):
        if SUPERBLOCK_WORDS % s != 0:
            raise ValueError("sampling rate must divide %d" % SUPERBLOCK_WORDS)
        self.words = words
        self.n = n
        self.s = s
        self._build_samples()

    def _build_samples(self) -> None:
        words = self.words
        s = self.s
        nwords = len(words)
        sups = array("Q")
        blocks = array("H")
        total = 0
        rel = 0
        for w in range(nwords + 1):
            if w % SUPERBLOCK_WORDS == 0:
                sups.append(total)
                rel = 0
            if w % s == 0:
                blocks.append(rel)
            if w < nwords:
                c = _popcount(words[w])
                total += c
                rel += c
        self.superblock_sums = sups
        self.block_sums = blocks

    def rank(self, i: int) -> int:
        """Number of 1s in B[1..i]; rank(0) = 0."""
        if not 0 <= i <= self.n:
            raise IndexError("rank position out of range")
        q, r = divmod(i, WORD_BITS)
        blk = q // self.s
        start = blk * self.s
        count = self.superblock_sums[start // SUPERBLOCK_WORDS] + self.block_sums[blk]
        words = self.words
        for w in range(start, q):
            count += _popcount(words[w])
        if r:
            count += _popcount(words[q] & ((1 << r) - 1))
        return count

    def get(self, i: int) -> int:
        """Bit B[i], 1-based."""
        if not 1 <= i <= self.n:
            raise IndexError("bit position out of range")
        return (self.words[(i - 1) >> 6] >> ((i - 1) & 63)) & 1

    def total_ones(self) -> int:
        return self.rank(self.n)

    def words_equal(self, other: "RankBitvector") -> bool:
        return self.n == other.n and self.words == other.words

    # serialization: n as u64, then the raw little-endian word array; the
    # sample arrays are derived data and are rebuilt on load.
    def to_bytes(self) -> bytes:
        arr = array("Q", self.words)
        import sys

        if sys.byteorder != "little":
            arr.byteswap()
        return struct.pack("<Q", self.n) + arr.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, s: int = 4) -> "RankBitvector":
        (n,) = struct.unpack_from("<Q", data, 0)
        nwords = (n + WORD_BITS - 1) // WORD_BITS
        arr = array("Q")
        arr.frombytes(data[8 : 8 + 8 * nwords])
        import sys

        if sys.byteorder != "little":
            arr.byteswap()
        return cls(arr.tolist(), n, s)

    def byte_size(self) -> int:
        return len(self.to_bytes())
