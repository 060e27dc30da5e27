"""Boolean matrix algebra over k2-tree representations.

Sums are a single sequential merge of both signature streams when the
operands share their transposition flag; mixed sums navigate the shorter
operand through rank.  Products use the quadrant decomposition with
levelwise concatenation.  The "+ identity" flag is distributed
algebraically so the diagonal is never materialized, except by restricted
operations, which pin it down to explicit cells.
"""

from __future__ import annotations

from dataclasses import dataclass

from sparseq import _closure
from sparseq import kernels as K
from sparseq.k2matrix import K2Matrix


@dataclass(frozen=True)
class Restriction:
    """Row and/or column restriction; both set means a single cell."""

    row: int | None = None
    col: int | None = None

    def is_empty(self) -> bool:
        return self.row is None and self.col is None


def _check_sides(a: K2Matrix, b: K2Matrix) -> None:
    if a.side != b.side:
        raise ValueError("side mismatch: %d vs %d" % (a.side, b.side))


def set_check_hook(fn):
    """Install (or clear) a cancellation callback polled inside long
    kernel multiplications."""
    K.set_check_hook(fn)


def add(a: K2Matrix, b: K2Matrix) -> K2Matrix:
    """Cellwise or; result carries + identity if either operand does."""
    _check_sides(a, b)
    pi = a.plus_identity or b.plus_identity
    if a.bitv.n == 0:
        return b._replace(plus_identity=pi)
    if b.bitv.n == 0:
        return a._replace(plus_identity=pi)
    if a.transposed == b.transposed:
        levels = K.merge_seq(a.levels(), b.levels())
        return K2Matrix.from_levels(levels, a.side, transposed=a.transposed, plus_identity=pi)
    # mixed flags: navigate the operand with the shorter bitvector
    # transposed (A^T + B = (A + B^T)^T); ties transpose b.
    if b.bitv.n <= a.bitv.n:
        seq, nav = a, b
    else:
        seq, nav = b, a
    levels = K.merge_mixed(seq.levels(), nav.levels(), nav.pre())
    return K2Matrix.from_levels(levels, a.side, transposed=seq.transposed, plus_identity=pi)


def _core_multiply(a: K2Matrix, b: K2Matrix, rr: int = -1, rc: int = -1) -> K2Matrix:
    levels = K.multiply(
        a.levels(),
        a.pre(),
        a.transposed,
        a.fullmask(),
        b.levels(),
        b.pre(),
        b.transposed,
        b.fullmask(),
        a.side,
        rr,
        rc,
    )
    return K2Matrix.from_levels(levels or [], a.side)


def multiply(a: K2Matrix, b: K2Matrix) -> K2Matrix:
    """Boolean product; (I+A)(I+B) distributes to I + A + B + AB."""
    _check_sides(a, b)
    sa = a.without_identity()
    sb = b.without_identity()
    core = _core_multiply(sa, sb)
    if a.plus_identity and b.plus_identity:
        return add(add(sa, sb), core).with_identity()
    if a.plus_identity:
        return add(sb, core)
    if b.plus_identity:
        return add(sa, core)
    return core


def power(a: K2Matrix, k: int) -> K2Matrix:
    if k < 1:
        raise ValueError("exponent must be >= 1")
    out = a
    for _ in range(k - 1):
        out = multiply(out, a)
    return out


def _cell_matrix(side: int, r: int, c: int) -> K2Matrix:
    return K2Matrix.build([(r, c)], side)


def _identity_cell(res: Restriction) -> tuple[int, int] | None:
    """The one cell of the identity surviving a restriction, if any."""
    if res.row is not None and res.col is not None:
        return (res.row, res.col) if res.row == res.col else None
    if res.row is not None:
        return (res.row, res.row)
    return (res.col, res.col)


def sum_restricted(a: K2Matrix, b: K2Matrix, res: Restriction) -> K2Matrix:
    """<r>(A+B)<c>, computed recursively with off-line quadrants pruned.

    Never sets the identity flag: a restricted identity is at most one
    explicit diagonal cell."""
    _check_sides(a, b)
    if res.is_empty():
        raise ValueError("empty restriction")
    sa = a.without_identity()
    sb = b.without_identity()
    rr = -1 if res.row is None else res.row
    rc = -1 if res.col is None else res.col
    levels = K.sum_restricted(
        sa.levels(), sa.pre(), sa.transposed, sb.levels(), sb.pre(), sb.transposed, a.side, rr, rc
    )
    out = K2Matrix.from_levels(levels or [], a.side)
    if a.plus_identity or b.plus_identity:
        cell = _identity_cell(res)
        if cell is not None and not out.get(*cell):
            out = add(out, _cell_matrix(a.side, *cell))
    return out


def restrict(a: K2Matrix, res: Restriction) -> K2Matrix:
    """The matrix masked to one row and/or column."""
    return sum_restricted(a, K2Matrix.empty(a.side), res)


def multiply_restricted(a: K2Matrix, b: K2Matrix, res: Restriction) -> K2Matrix:
    """<r>(AxB)<c> as (<r>A) x (B<c>): the row restriction prunes the left
    descent, the column restriction the right one."""
    _check_sides(a, b)
    if res.is_empty():
        raise ValueError("empty restriction")
    sa = a.without_identity()
    sb = b.without_identity()
    rr = -1 if res.row is None else res.row
    rc = -1 if res.col is None else res.col
    out = _core_multiply(sa, sb, rr, rc)
    if a.plus_identity:
        out = add(out, restrict(sb, res))
    if b.plus_identity:
        out = add(out, restrict(sa, res))
    if a.plus_identity and b.plus_identity:
        cell = _identity_cell(res)
        if cell is not None and not out.get(*cell):
            out = add(out, _cell_matrix(a.side, *cell))
    return out


class _K2Ops:
    add = staticmethod(add)
    multiply = staticmethod(multiply)

    @staticmethod
    def restrict(a, row, col):
        return restrict(a, Restriction(row=row, col=col))

    @staticmethod
    def cell(side, r, c):
        return _cell_matrix(side, r, c)

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
        return a.materialized()

    @staticmethod
    def fixpoint_equal(a, b):
        return a.payload_equal(b)


_OPS = _K2Ops()


def closure_plus(a: K2Matrix, stats=None, check=None) -> K2Matrix:
    """Transitive closure A+ by A <- A + AxA until no change."""
    return _closure.closure_plus(a, _OPS, stats, check)


def closure_star(a: K2Matrix, stats=None, check=None) -> K2Matrix:
    """A* = I + A+; the identity stays a flag."""
    return _closure.closure_star(a, _OPS, stats, check)


def closure_restricted(
    a: K2Matrix, res: Restriction, reflexive: bool = False, stats=None, check=None
) -> K2Matrix:
    """<r>A+ / A+<c> / <r>A+<c> (or the reflexive variants) without
    computing the full closure."""
    if res.is_empty():
        raise ValueError("empty restriction")
    return _closure.closure_restricted(a, res.row, res.col, reflexive, _OPS, stats, check)
