"""Transitive-closure algorithms, shared by both matrix backends.

The backend is abstracted as an `ops` namespace providing add, multiply,
restrict(matrix, row, col), cell(side, r, c), get, count_row, count_col,
strip_identity, with_identity, canonical and fixpoint_equal.
"""

from __future__ import annotations


def closure_plus(a, ops, stats=None, check=None):
    """Fixpoint of A <- A + A*A (Furman); change detected on the 1-count
    first and the raw payload second, which is sound because sums only
    ever add 1s."""
    cur = ops.canonical(a)
    it = 0
    while True:
        if check is not None:
            check()
        it += 1
        nxt = ops.add(cur, ops.multiply(cur, cur))
        if nxt.ones == cur.ones and ops.fixpoint_equal(nxt, cur):
            break
        cur = nxt
    if stats is not None:
        stats["iterations"] = it
    return cur


def closure_star(a, ops, stats=None, check=None):
    return ops.with_identity(closure_plus(a, ops, stats, check))


def closure_restricted(a, row, col, reflexive, ops, stats=None, check=None):
    """Row-, column- or cell-restricted closure.

    Grows the restricted line by repeated one-step products, so path
    lengths grow linearly; the cell case runs on whichever of the row or
    column is emptier and stops as soon as the cell is set.
    """
    if row is None and col is None:
        raise ValueError("empty restriction")
    side = a.side
    core = ops.strip_identity(a)
    seed_diag = reflexive or a.plus_identity
    if row is not None and col is not None:
        mode_row = ops.count_row(core, row) <= ops.count_col(core, col)
        target = (row, col)
    else:
        mode_row = row is not None
        target = None
    s = ops.restrict(core, row, None) if mode_row else ops.restrict(core, None, col)
    d = row if mode_row else col
    if seed_diag and not ops.get(s, d, d):
        s = ops.add(s, ops.cell(side, d, d))
    it = 0
    if not (target is not None and ops.get(s, target[0], target[1])):
        prev = s
        for _ in range(side + 1):
            if check is not None:
                check()
            it += 1
            p = ops.multiply(s, core) if mode_row else ops.multiply(core, s)
            s = ops.add(prev, p)
            if target is not None and ops.get(s, target[0], target[1]):
                break
            if s.ones == prev.ones and ops.fixpoint_equal(s, prev):
                break
            prev = s
    if stats is not None:
        stats["iterations"] = it
    if target is not None:
        s = ops.restrict(s, row, col)
    return s
