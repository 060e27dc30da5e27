import random

import pytest

from sparseq import csrmatrix as C
from sparseq import oracle as O
from sparseq.csrmatrix import CsrcMatrix
from sparseq.k2algebra import Restriction

from helpers import rand_coords, rand_matrix, to_dense


def test_build_and_views():
    m = CsrcMatrix.build([(0, 2), (0, 1), (2, 0)], 4)
    assert m.side == 4
    assert m.ones == 3
    assert m.row(0) == [1, 2]
    assert m.row(1) == []
    assert m.col(0) == [2]
    assert m.get(0, 2) and not m.get(2, 2)
    assert list(m.enumerate_ones()) == [(0, 1), (0, 2), (2, 0)]


def test_build_validates_range():
    with pytest.raises(ValueError):
        CsrcMatrix.build([(0, 9)], 4)


def test_transpose_swaps_views():
    rng = random.Random(20)
    coords = rand_coords(rng, 16, 40)
    m = CsrcMatrix.build(coords, 16)
    t = m.transpose()
    assert set(t.enumerate_ones()) == {(c, r) for r, c in coords}
    for r, c in coords:
        assert t.get(c, r)
        assert r in t.row(c)
    assert t.transpose().payload_equal(m)


def test_identity_flag():
    m = CsrcMatrix.build([(1, 2)], 4).with_identity()
    assert m.plus_identity and m.get(3, 3)
    assert m.ones == 1
    assert set(m.enumerate_ones()) == {(1, 2)} | {(i, i) for i in range(4)}
    assert set(m.enumerate_ones(identity_limit=2)) == {(1, 2), (0, 0), (1, 1)}
    assert not m.without_identity().plus_identity


def test_line_counts():
    rng = random.Random(21)
    coords = rand_coords(rng, 8, 20)
    m = CsrcMatrix.build(coords, 8).with_identity()
    want = coords | {(i, i) for i in range(8)}
    for i in range(8):
        assert m.count_row(i) == sum(1 for r, c in want if r == i)
        assert m.count_col(i) == sum(1 for r, c in want if c == i)


def test_add_and_multiply_known():
    a = CsrcMatrix.build([(0, 1)], 4)
    b = CsrcMatrix.build([(1, 2)], 4)
    assert set(C.add(a, b).enumerate_ones()) == {(0, 1), (1, 2)}
    assert set(C.multiply(a, b).enumerate_ones()) == {(0, 2)}
    assert C.multiply(b, a).ones == 0


def test_algebra_random_vs_dense():
    rng = random.Random(22)
    for _ in range(150):
        side = rng.choice([2, 4, 16, 64])
        a = rand_matrix(rng, CsrcMatrix, side, side * 2)
        b = rand_matrix(rng, CsrcMatrix, side, side * 2)
        assert to_dense(C.add(a, b)) == O.dense_or(to_dense(a), to_dense(b))
        assert to_dense(C.multiply(a, b)) == O.dense_mul(to_dense(a), to_dense(b))


def test_power():
    a = CsrcMatrix.build([(i, i + 1) for i in range(7)], 8)
    assert set(C.power(a, 2).enumerate_ones()) == {(i, i + 2) for i in range(6)}
    with pytest.raises(ValueError):
        C.power(a, 0)


def test_closures_random():
    rng = random.Random(23)
    for _ in range(40):
        side = rng.choice([4, 8, 32])
        a = rand_matrix(rng, CsrcMatrix, side, side * 2)
        want = O.warshall_closure(to_dense(a.without_identity()))
        if a.plus_identity:
            want = O.dense_or(want, O.dense_identity(side))
        assert to_dense(C.closure_plus(a)) == want
        star = C.closure_star(a)
        assert star.plus_identity
        assert to_dense(star) == O.dense_or(want, O.dense_identity(side))


def test_restricted_ops_random():
    rng = random.Random(24)
    for _ in range(80):
        side = rng.choice([4, 16, 64])
        a = rand_matrix(rng, CsrcMatrix, side, side * 2)
        b = rand_matrix(rng, CsrcMatrix, side, side * 2)
        shape = rng.choice(["row", "col", "cell"])
        row = rng.randrange(side) if shape in ("row", "cell") else None
        col = rng.randrange(side) if shape in ("col", "cell") else None
        res = Restriction(row=row, col=col)
        assert to_dense(C.sum_restricted(a, b, res)) == O.mask(
            O.dense_or(to_dense(a), to_dense(b)), row, col
        )
        assert to_dense(C.multiply_restricted(a, b, res)) == O.mask(
            O.dense_mul(to_dense(a), to_dense(b)), row, col
        )
        refl = rng.random() < 0.5
        want = O.warshall_closure(to_dense(a.without_identity()))
        if refl or a.plus_identity:
            want = O.dense_or(want, O.dense_identity(side))
        assert to_dense(C.closure_restricted(a, res, reflexive=refl)) == O.mask(want, row, col)


def test_serialization_round_trip():
    rng = random.Random(25)
    for side in (2, 8, 64):
        for count in (0, 1, side * 2):
            m = CsrcMatrix.build(rand_coords(rng, side, count), side)
            if rng.random() < 0.5:
                m = m.with_identity()
            back = CsrcMatrix.from_bytes(m.to_bytes())
            assert back.payload_equal(m)
            assert back.plus_identity == m.plus_identity


def test_backends_agree_cell_for_cell():
    from sparseq import k2algebra as A
    from sparseq.k2matrix import K2Matrix

    rng = random.Random(26)
    for _ in range(60):
        side = rng.choice([4, 16, 64])
        ca = rand_coords(rng, side, side * 2)
        cb = rand_coords(rng, side, side * 2)
        k1, k2 = K2Matrix.build(ca, side), K2Matrix.build(cb, side)
        s1, s2 = CsrcMatrix.build(ca, side), CsrcMatrix.build(cb, side)
        assert to_dense(A.add(k1, k2)) == to_dense(C.add(s1, s2))
        assert to_dense(A.multiply(k1, k2)) == to_dense(C.multiply(s1, s2))
        assert to_dense(A.closure_plus(k1)) == to_dense(C.closure_plus(s1))
