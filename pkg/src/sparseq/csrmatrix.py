"""Uncompressed baseline sparse Boolean matrix: CSR and CSC views combined.

Both views (nonempty line ids, offsets, sorted coordinates) are stored, so
transposition is an O(1) view swap and Schoor's product can intersect the
nonempty columns of A with the nonempty rows of B.  The algebra mirrors
k2algebra operation for operation, including the + identity flag.
"""

from __future__ import annotations

import struct
from array import array
from bisect import bisect_left

from sparseq import _closure
from sparseq.k2algebra import Restriction
from sparseq.k2matrix import next_pow2


def _build_view(pairs):
    """pairs: sorted unique (line, pos). Returns (ids, offsets, positions)."""
    ids = []
    offsets = [0]
    positions = []
    last = None
    for line, pos in pairs:
        if line != last:
            ids.append(line)
            offsets.append(len(positions))
            last = line
        positions.append(pos)
    offsets.append(len(positions))
    del offsets[1]  # the first group start duplicated 0
    return ids, offsets, positions


class CsrcMatrix:
    __slots__ = (
        "side",
        "row_ids",
        "row_offsets",
        "cols_of_rows",
        "col_ids",
        "col_offsets",
        "rows_of_cols",
        "ones",
        "plus_identity",
    )

    def __init__(self, side, row_view, col_view, ones, plus_identity=False):
        self.side = side
        self.row_ids, self.row_offsets, self.cols_of_rows = row_view
        self.col_ids, self.col_offsets, self.rows_of_cols = col_view
        self.ones = ones
        self.plus_identity = plus_identity

    @classmethod
    def build(cls, coords, side_hint: int) -> "CsrcMatrix":
        if side_hint < 1:
            raise ValueError("side_hint must be >= 1")
        uniq = sorted(set((r, c) for r, c in coords))
        for r, c in uniq:
            if not (0 <= r < side_hint and 0 <= c < side_hint):
                raise ValueError("coordinate (%d, %d) out of range" % (r, c))
        side = next_pow2(side_hint)
        return cls.from_row_major(uniq, side)

    @classmethod
    def from_row_major(cls, pairs, side, plus_identity=False) -> "CsrcMatrix":
        """pairs must be sorted unique (row, col)."""
        col_major = sorted((c, r) for r, c in pairs)
        return cls(
            side,
            _build_view(pairs),
            _build_view(col_major),
            len(pairs),
            plus_identity,
        )

    @classmethod
    def empty(cls, side) -> "CsrcMatrix":
        return cls.from_row_major([], side)

    @classmethod
    def identity(cls, side) -> "CsrcMatrix":
        return cls.from_row_major([], side, plus_identity=True)

    # ------------------------------------------------------------------

    def _line(self, ids, offsets, positions, x):
        i = bisect_left(ids, x)
        if i == len(ids) or ids[i] != x:
            return []
        return positions[offsets[i] : offsets[i + 1]]

    def row(self, r):
        """Sorted columns of the stored row r."""
        return self._line(self.row_ids, self.row_offsets, self.cols_of_rows, r)

    def col(self, c):
        """Sorted rows of the stored column c."""
        return self._line(self.col_ids, self.col_offsets, self.rows_of_cols, c)

    def get(self, r, c):
        if not (0 <= r < self.side and 0 <= c < self.side):
            raise IndexError("cell out of range")
        if self.plus_identity and r == c:
            return 1
        line = self.row(r)
        i = bisect_left(line, c)
        return 1 if i < len(line) and line[i] == c else 0

    def transpose(self) -> "CsrcMatrix":
        """O(1): exchanges the row-view and the column-view."""
        return CsrcMatrix(
            self.side,
            (self.col_ids, self.col_offsets, self.rows_of_cols),
            (self.row_ids, self.row_offsets, self.cols_of_rows),
            self.ones,
            self.plus_identity,
        )

    def with_identity(self) -> "CsrcMatrix":
        if self.plus_identity:
            return self
        m = self.transpose().transpose()
        m.plus_identity = True
        return m

    def without_identity(self) -> "CsrcMatrix":
        if not self.plus_identity:
            return self
        m = self.transpose().transpose()
        m.plus_identity = False
        return m

    def iter_stored(self):
        offs = self.row_offsets
        cols = self.cols_of_rows
        for i, r in enumerate(self.row_ids):
            for k in range(offs[i], offs[i + 1]):
                yield (r, cols[k])

    def enumerate_ones(self, identity_limit=None):
        diag = set() if self.plus_identity else None
        for rc in self.iter_stored():
            if diag is not None and rc[0] == rc[1]:
                diag.add(rc[0])
            yield rc
        if diag is not None:
            limit = self.side if identity_limit is None else identity_limit
            for i in range(limit):
                if i not in diag:
                    yield (i, i)

    def count_row(self, r):
        if not 0 <= r < self.side:
            raise IndexError("row out of range")
        n = len(self.row(r))
        if self.plus_identity and not self.without_identity().get(r, r):
            n += 1
        return n

    def count_col(self, c):
        if not 0 <= c < self.side:
            raise IndexError("column out of range")
        n = len(self.col(c))
        if self.plus_identity and not self.without_identity().get(c, c):
            n += 1
        return n

    def payload_equal(self, other: "CsrcMatrix") -> bool:
        return (
            self.side == other.side
            and self.plus_identity == other.plus_identity
            and self.ones == other.ones
            and self.row_ids == other.row_ids
            and self.row_offsets == other.row_offsets
            and self.cols_of_rows == other.cols_of_rows
        )

    # ------------------------------------------------------------------
    # serialization

    def to_bytes(self) -> bytes:
        flags = 2 if self.plus_identity else 0
        out = [struct.pack("<QQB", self.side, self.ones, flags)]
        for seq in (
            self.row_ids,
            self.row_offsets,
            self.cols_of_rows,
            self.col_ids,
            self.col_offsets,
            self.rows_of_cols,
        ):
            arr = array("Q", seq)
            import sys

            if sys.byteorder != "little":
                arr.byteswap()
            out.append(struct.pack("<Q", len(seq)))
            out.append(arr.tobytes())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CsrcMatrix":
        side, ones, flags = struct.unpack_from("<QQB", data, 0)
        off = struct.calcsize("<QQB")
        seqs = []
        import sys

        for _ in range(6):
            (n,) = struct.unpack_from("<Q", data, off)
            off += 8
            arr = array("Q")
            arr.frombytes(data[off : off + 8 * n])
            if sys.byteorder != "little":
                arr.byteswap()
            off += 8 * n
            seqs.append(arr.tolist())
        return cls(side, tuple(seqs[0:3]), tuple(seqs[3:6]), ones, bool(flags & 2))

    def __repr__(self):
        return "CsrcMatrix(side=%d, ones=%d%s)" % (
            self.side,
            self.ones,
            ", +I" if self.plus_identity else "",
        )


# ----------------------------------------------------------------------
# algebra


def _check_sides(a, b):
    if a.side != b.side:
        raise ValueError("side mismatch: %d vs %d" % (a.side, b.side))


def _merge_sorted(xs, ys):
    """Union of two sorted unique lists of pairs, O(len(xs)+len(ys))."""
    out = []
    i = j = 0
    nx, ny = len(xs), len(ys)
    while i < nx and j < ny:
        x, y = xs[i], ys[j]
        if x < y:
            out.append(x)
            i += 1
        elif y < x:
            out.append(y)
            j += 1
        else:
            out.append(x)
            i += 1
            j += 1
    out.extend(xs[i:])
    out.extend(ys[j:])
    return out


def add(a: CsrcMatrix, b: CsrcMatrix) -> CsrcMatrix:
    """Linewise merge of both views, O(a+b)."""
    _check_sides(a, b)
    pi = a.plus_identity or b.plus_identity
    row_major = _merge_sorted(list(a.iter_stored()), list(b.iter_stored()))
    # the column views iterated as (col, row) pairs are already col-major
    col_major = _merge_sorted(
        list(a.transpose().iter_stored()), list(b.transpose().iter_stored())
    )
    return CsrcMatrix(a.side, _build_view(row_major), _build_view(col_major), len(row_major), pi)


# Optional cancellation hook, polled per matched middle node of a
# product so a deadline can interrupt a long multiplication.
_CHECK_HOOK = None


def set_check_hook(fn):
    global _CHECK_HOOK
    _CHECK_HOOK = fn


def _schoor(a: CsrcMatrix, b: CsrcMatrix) -> set:
    """Cartesian products over the nonempty columns of A that are also
    nonempty rows of B."""
    out = set()
    i = j = 0
    acols, brows = a.col_ids, b.row_ids
    while i < len(acols) and j < len(brows):
        if acols[i] < brows[j]:
            i += 1
        elif brows[j] < acols[i]:
            j += 1
        else:
            if _CHECK_HOOK is not None:
                _CHECK_HOOK()
            k = acols[i]
            rows = a.rows_of_cols[a.col_offsets[i] : a.col_offsets[i + 1]]
            cols = b.cols_of_rows[b.row_offsets[j] : b.row_offsets[j + 1]]
            for r in rows:
                for c in cols:
                    out.add((r, c))
            i += 1
            j += 1
    return out


def multiply(a: CsrcMatrix, b: CsrcMatrix) -> CsrcMatrix:
    _check_sides(a, b)
    sa = a.without_identity()
    sb = b.without_identity()
    core = CsrcMatrix.from_row_major(sorted(_schoor(sa, sb)), a.side)
    if a.plus_identity and b.plus_identity:
        return add(add(sa, sb), core).with_identity()
    if a.plus_identity:
        return add(sb, core)
    if b.plus_identity:
        return add(sa, core)
    return core


def power(a: CsrcMatrix, k: int) -> CsrcMatrix:
    if k < 1:
        raise ValueError("exponent must be >= 1")
    out = a
    for _ in range(k - 1):
        out = multiply(out, a)
    return out


def _from_cells(side, cells, extra=None):
    cells = set(cells)
    if extra is not None:
        cells.add(extra)
    return CsrcMatrix.from_row_major(sorted(cells), side)


def _identity_cell(res: Restriction):
    if res.row is not None and res.col is not None:
        return (res.row, res.col) if res.row == res.col else None
    if res.row is not None:
        return (res.row, res.row)
    return (res.col, res.col)


def sum_restricted(a: CsrcMatrix, b: CsrcMatrix, res: Restriction) -> CsrcMatrix:
    _check_sides(a, b)
    if res.is_empty():
        raise ValueError("empty restriction")
    sa = a.without_identity()
    sb = b.without_identity()
    cells = set()
    if res.row is not None and res.col is not None:
        if sa.get(res.row, res.col) or sb.get(res.row, res.col):
            cells.add((res.row, res.col))
    elif res.row is not None:
        r = res.row
        cells.update((r, c) for c in sa.row(r))
        cells.update((r, c) for c in sb.row(r))
    else:
        c = res.col
        cells.update((r, c) for r in sa.col(c))
        cells.update((r, c) for r in sb.col(c))
    if a.plus_identity or b.plus_identity:
        cell = _identity_cell(res)
        if cell is not None:
            cells.add(cell)
    return _from_cells(a.side, cells)


def restrict(a: CsrcMatrix, res: Restriction) -> CsrcMatrix:
    return sum_restricted(a, CsrcMatrix.empty(a.side), res)


def multiply_restricted(a: CsrcMatrix, b: CsrcMatrix, res: Restriction) -> CsrcMatrix:
    """<r>(AxB)<c> as (<r>A) x (B<c>); lines are found by binary search."""
    _check_sides(a, b)
    if res.is_empty():
        raise ValueError("empty restriction")
    sa = a.without_identity()
    sb = b.without_identity()
    cells = set()
    if res.row is not None and res.col is not None:
        r, c = res.row, res.col
        left = sa.row(r)
        right = set(sb.col(c))
        if any(k in right for k in left):
            cells.add((r, c))
    elif res.row is not None:
        r = res.row
        for k in sa.row(r):
            cells.update((r, c) for c in sb.row(k))
    else:
        c = res.col
        for k in sb.col(c):
            cells.update((r, c) for r in sa.col(k))
    out = _from_cells(a.side, cells)
    if a.plus_identity:
        out = add(out, restrict(sb, res))
    if b.plus_identity:
        out = add(out, restrict(sa, res))
    if a.plus_identity and b.plus_identity:
        cell = _identity_cell(res)
        if cell is not None and not out.get(*cell):
            out = add(out, _from_cells(a.side, [cell]))
    return out


class _CsrOps:
    add = staticmethod(add)
    multiply = staticmethod(multiply)

    @staticmethod
    def restrict(a, row, col):
        return restrict(a, Restriction(row=row, col=col))

    @staticmethod
    def cell(side, r, c):
        return _from_cells(side, [(r, c)])

    @staticmethod
    def get(a, r, c):
        return a.get(r, c)

    @staticmethod
    def count_row(a, r):
        return a.count_row(r)

    @staticmethod
    def count_col(a, c):
        return a.count_col(c)

    @staticmethod
    def strip_identity(a):
        return a.without_identity()

    @staticmethod
    def with_identity(a):
        return a.with_identity()

    @staticmethod
    def canonical(a):
        return a

    @staticmethod
    def fixpoint_equal(a, b):
        return a.payload_equal(b)


_OPS = _CsrOps()


def closure_plus(a: CsrcMatrix, stats=None, check=None) -> CsrcMatrix:
    return _closure.closure_plus(a, _OPS, stats, check)


def closure_star(a: CsrcMatrix, stats=None, check=None) -> CsrcMatrix:
    return _closure.closure_star(a, _OPS, stats, check)


def closure_restricted(
    a: CsrcMatrix, res: Restriction, reflexive: bool = False, stats=None, check=None
) -> CsrcMatrix:
    if res.is_empty():
        raise ValueError("empty restriction")
    return _closure.closure_restricted(a, res.row, res.col, reflexive, _OPS, stats, check)
