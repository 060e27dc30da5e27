"""Succinct v x v Boolean matrix stored as a levelwise k2-tree bitvector.

The tree (k=2) splits the matrix into quadrants in z-order; every node is
a 4-bit emptiness signature and the last level encodes the 2x2 cell
blocks directly.  Signatures are concatenated level by level into one
RankBitvector; navigation uses rank.  Transposition and the "+ identity"
adjustment are O(1) flags.
"""

from __future__ import annotations

import struct

import numpy as np

from sparseq import kernels as K
from sparseq.bitvec import RankBitvector

_POP_LUT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)

_M1 = np.uint64(0x0000FFFF0000FFFF)
_M2 = np.uint64(0x00FF00FF00FF00FF)
_M3 = np.uint64(0x0F0F0F0F0F0F0F0F)
_M4 = np.uint64(0x3333333333333333)
_M5 = np.uint64(0x5555555555555555)


def _spread_bits(x: np.ndarray) -> np.ndarray:
    """Interleave zeros between the low 32 bits of each value."""
    x = x.astype(np.uint64)
    x = (x | (x << np.uint64(16))) & _M1
    x = (x | (x << np.uint64(8))) & _M2
    x = (x | (x << np.uint64(4))) & _M3
    x = (x | (x << np.uint64(2))) & _M4
    x = (x | (x << np.uint64(1))) & _M5
    return x


def next_pow2(v: int) -> int:
    p = 2
    while p < v:
        p <<= 1
    return p


def _levels_from_coords(rows, cols, nlevels: int) -> list[bytearray]:
    r = np.asarray(rows, dtype=np.uint64)
    c = np.asarray(cols, dtype=np.uint64)
    if r.size == 0:
        return []
    codes = np.unique((_spread_bits(r) << np.uint64(1)) | _spread_bits(c))
    levels = []
    for l in range(nlevels):
        shift = np.uint64(2 * (nlevels - 1 - l))
        uk = np.unique(codes >> shift)
        parent = uk >> np.uint64(2)
        bits = (np.uint64(1) << (uk & np.uint64(3))).astype(np.uint8)
        starts = np.flatnonzero(np.concatenate(([True], parent[1:] != parent[:-1])))
        sigs = np.bitwise_or.reduceat(bits, starts)
        levels.append(bytearray(sigs.tobytes()))
    return levels


def _encode_levels(levels, s: int = 4) -> tuple[RankBitvector, list[int]]:
    offsets = [0]
    for lv in levels:
        offsets.append(offsets[-1] + 4 * len(lv))
    sigs = np.frombuffer(b"".join(bytes(lv) for lv in levels), dtype=np.uint8)
    n = 4 * sigs.size
    if sigs.size % 2:
        sigs = np.concatenate([sigs, np.zeros(1, dtype=np.uint8)])
    packed = (sigs[0::2] | (sigs[1::2] << 4)).tobytes()
    packed += b"\x00" * (-len(packed) % 8)
    words = np.frombuffer(packed, dtype="<u8").tolist()
    return RankBitvector(words, n, s), offsets


def _decode_levels(bitv: RankBitvector, level_offsets) -> list[bytearray]:
    if bitv.n == 0:
        return []
    raw = np.frombuffer(np.array(bitv.words, dtype="<u8").tobytes(), dtype=np.uint8)
    nibbles = np.empty(2 * raw.size, dtype=np.uint8)
    nibbles[0::2] = raw & 0x0F
    nibbles[1::2] = raw >> 4
    levels = []
    for l in range(len(level_offsets) - 1):
        start = level_offsets[l] // 4
        cnt = (level_offsets[l + 1] - level_offsets[l]) // 4
        levels.append(bytearray(nibbles[start : start + cnt].tobytes()))
    return levels


class K2Matrix:
    __slots__ = (
        "side",
        "nlevels",
        "bitv",
        "level_offsets",
        "ones",
        "transposed",
        "plus_identity",
        "_levels",
        "_pre",
        "_full",
    )

    def __init__(self, side, nlevels, bitv, level_offsets, ones, transposed, plus_identity):
        self.side = side
        self.nlevels = nlevels
        self.bitv = bitv
        self.level_offsets = level_offsets
        self.ones = ones
        self.transposed = transposed
        self.plus_identity = plus_identity
        self._levels = None
        self._pre = None
        self._full = None

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def build(cls, coords, side_hint: int) -> "K2Matrix":
        """Build from an iterable of (row, col); side_hint is rounded up
        to the next power of two."""
        if side_hint < 1:
            raise ValueError("side_hint must be >= 1")
        rows = []
        cols = []
        for r, c in coords:
            if not (0 <= r < side_hint and 0 <= c < side_hint):
                raise ValueError("coordinate (%d, %d) out of range" % (r, c))
            rows.append(r)
            cols.append(c)
        side = next_pow2(side_hint)
        nlevels = side.bit_length() - 1
        return cls.from_levels(_levels_from_coords(rows, cols, nlevels), side)

    @classmethod
    def from_levels(cls, levels, side, transposed=False, plus_identity=False) -> "K2Matrix":
        nlevels = side.bit_length() - 1
        bitv, offsets = _encode_levels(levels)
        while len(offsets) < nlevels + 1:
            offsets.append(offsets[-1])
        ones = K.sub_ones(levels)
        m = cls(side, nlevels, bitv, offsets, ones, transposed, plus_identity)
        m._levels = [bytes(lv) for lv in levels]
        return m

    @classmethod
    def empty(cls, side) -> "K2Matrix":
        return cls.from_levels([], side)

    @classmethod
    def identity(cls, side) -> "K2Matrix":
        return cls.from_levels([], side, plus_identity=True)

    def _replace(self, transposed=None, plus_identity=None) -> "K2Matrix":
        m = K2Matrix(
            self.side,
            self.nlevels,
            self.bitv,
            self.level_offsets,
            self.ones,
            self.transposed if transposed is None else transposed,
            self.plus_identity if plus_identity is None else plus_identity,
        )
        m._levels = self._levels
        m._pre = self._pre
        m._full = self._full
        return m

    # ------------------------------------------------------------------
    # lazy derived structures shared by the algebra kernels

    def levels(self):
        if self._levels is None:
            self._levels = _decode_levels(self.bitv, self.level_offsets)
        return self._levels

    def pre(self):
        if self._pre is None:
            pre = []
            for lv in self.levels():
                pc = _POP_LUT[np.frombuffer(lv, dtype=np.uint8)]
                out = np.zeros(len(lv) + 1, dtype=np.int64)
                np.cumsum(pc, out=out[1:])
                pre.append(out.tolist())
            self._pre = pre
        return self._pre

    def fullmask(self):
        """Per node, whether its subtree is a completely full submatrix."""
        if self._full is None:
            levels = self.levels()
            if not levels:
                self._full = []
            else:
                full: list = [None] * len(levels)
                arr = np.frombuffer(levels[-1], dtype=np.uint8)
                cur = (arr == 15).astype(np.uint8)
                full[-1] = bytearray(cur.tobytes())
                for l in range(len(levels) - 2, -1, -1):
                    sigs = np.frombuffer(levels[l], dtype=np.uint8)
                    pc = _POP_LUT[sigs]
                    starts = np.zeros(sigs.size, dtype=np.int64)
                    np.cumsum(pc[:-1], out=starts[1:])
                    cum = np.zeros(cur.size + 1, dtype=np.int64)
                    np.cumsum(cur, out=cum[1:])
                    kids_full = cum[starts + pc] - cum[starts]
                    cur = ((sigs == 15) & (kids_full == 4)).astype(np.uint8)
                    full[l] = bytearray(cur.tobytes())
                self._full = full
        return self._full

    # ------------------------------------------------------------------
    # access

    def _raw_get(self, r: int, c: int) -> int:
        """Stored cell, transposition applied, identity flag ignored."""
        if self.transposed:
            r, c = c, r
        if self.bitv.n == 0:
            return 0
        bitv = self.bitv
        offs = self.level_offsets
        p = 0
        size = self.side
        for l in range(self.nlevels):
            half = size >> 1
            j = (2 if r >= half else 0) | (1 if c >= half else 0)
            pos = offs[l] + 4 * p + j  # 0-based bit index
            if not bitv.get(pos + 1):
                return 0
            if l == self.nlevels - 1:
                return 1
            p = bitv.rank(pos + 1) - bitv.rank(offs[l]) - 1
            r -= (j >> 1) * half
            c -= (j & 1) * half
            size = half
        return 1  # side == 1 never happens; side is always >= 2

    def get(self, r: int, c: int) -> int:
        if not (0 <= r < self.side and 0 <= c < self.side):
            raise IndexError("cell out of range")
        if self.plus_identity and r == c:
            return 1
        return self._raw_get(r, c)

    def transpose(self) -> "K2Matrix":
        """O(1): flips the flag; the signature bitvector is shared."""
        return self._replace(transposed=not self.transposed)

    def materialized(self) -> "K2Matrix":
        """Copy with the transposition baked into the stored tree, so that
        iterated operations keep a stable frame."""
        if not self.transposed:
            return self
        coords = list(K.iter_ones(self.levels(), self.pre(), True, self.side))
        rows = [rc[0] for rc in coords]
        cols = [rc[1] for rc in coords]
        return K2Matrix.from_levels(
            _levels_from_coords(rows, cols, self.nlevels),
            self.side,
            plus_identity=self.plus_identity,
        )

    def with_identity(self) -> "K2Matrix":
        return self if self.plus_identity else self._replace(plus_identity=True)

    def without_identity(self) -> "K2Matrix":
        return self if not self.plus_identity else self._replace(plus_identity=False)

    def enumerate_ones(self, identity_limit=None):
        """Yield every 1-cell once: stored cells in z-order of the tree,
        then the identity diagonal (up to identity_limit) if flagged."""
        diag = set() if self.plus_identity else None
        for rc in K.iter_ones(self.levels(), self.pre(), self.transposed, self.side):
            if diag is not None and rc[0] == rc[1]:
                diag.add(rc[0])
            yield rc
        if diag is not None:
            limit = self.side if identity_limit is None else identity_limit
            for i in range(limit):
                if i not in diag:
                    yield (i, i)

    def count_row(self, r: int) -> int:
        if not 0 <= r < self.side:
            raise IndexError("row out of range")
        n = K.line_count(self.levels(), self.pre(), self.transposed, self.side, r, True)
        if self.plus_identity and not self._raw_get(r, r):
            n += 1
        return n

    def count_col(self, c: int) -> int:
        if not 0 <= c < self.side:
            raise IndexError("column out of range")
        n = K.line_count(self.levels(), self.pre(), self.transposed, self.side, c, False)
        if self.plus_identity and not self._raw_get(c, c):
            n += 1
        return n

    def payload_equal(self, other: "K2Matrix") -> bool:
        """Exact same representation (side, flags, bits)."""
        return (
            self.side == other.side
            and self.transposed == other.transposed
            and self.plus_identity == other.plus_identity
            and self.ones == other.ones
            and self.bitv.words_equal(other.bitv)
        )

    @property
    def bit_length(self) -> int:
        return self.bitv.n

    # ------------------------------------------------------------------
    # serialization

    def to_bytes(self) -> bytes:
        flags = (1 if self.transposed else 0) | (2 if self.plus_identity else 0)
        head = struct.pack(
            "<QQBQ", self.side, self.ones, flags, self.nlevels
        ) + struct.pack("<%dQ" % (self.nlevels + 1), *self.level_offsets)
        return head + self.bitv.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "K2Matrix":
        side, ones, flags, nlevels = struct.unpack_from("<QQBQ", data, 0)
        off = struct.calcsize("<QQBQ")
        offsets = list(struct.unpack_from("<%dQ" % (nlevels + 1), data, off))
        off += 8 * (nlevels + 1)
        bitv = RankBitvector.from_bytes(data[off:])
        return cls(side, nlevels, bitv, offsets, ones, bool(flags & 1), bool(flags & 2))

    def __repr__(self):
        return "K2Matrix(side=%d, ones=%d%s%s)" % (
            self.side,
            self.ones,
            ", transposed" if self.transposed else "",
            ", +I" if self.plus_identity else "",
        )
