import random
import time

import pytest

from sparseq import planner as P
from sparseq import rpqlang as R
from sparseq.k2algebra import Restriction
from sparseq.k2matrix import K2Matrix

from helpers import (
    oracle_bindings,
    rand_graph,
    rand_query,
    result_bindings,
    store_from_triples,
)


def simple_store(backend="k2"):
    return store_from_triples(
        [("u", "a", "v"), ("v", "b", "w"), ("w", "a", "u"), ("u", "b", "u")], backend
    )


# --- translation -------------------------------------------------------


def test_translate_alternation():
    store = simple_store()
    q = R.parse("?x  a|b  ?y")
    plan = P.translate(q, store)
    assert plan.op == P.SUM
    assert [c.op for c in plan.children] == [P.LEAF, P.LEAF]
    assert plan.restriction.is_empty()


def test_translate_constant_subject_is_row_restriction():
    store = simple_store()
    q = R.parse("u  a/b  ?y")
    plan = P.translate(q, store)
    assert plan.op == P.PRODUCT
    assert plan.restriction == Restriction(row=store.nodes.lookup("u"))


def test_translate_constant_object_and_both():
    store = simple_store()
    assert P.translate(R.parse("?x  a  w"), store).restriction == Restriction(
        col=store.nodes.lookup("w")
    )
    both = P.translate(R.parse("u  a  w"), store).restriction
    assert both == Restriction(row=store.nodes.lookup("u"), col=store.nodes.lookup("w"))


def test_translate_inverse_label_transposes_leaf():
    store = simple_store()
    plan = P.translate(R.parse("?x  ^a  ?y"), store)
    assert plan.op == P.LEAF
    assert plan.matrix.transposed != store.matrix(store.labels.lookup("a")).transposed


def test_translate_epsilon_and_optional():
    store = simple_store()
    assert P.translate(R.parse("?x  eps  ?y"), store).op == P.IDENTITY
    plan = P.translate(R.parse("?x  a?  ?y"), store)
    assert plan.op == P.SUM
    assert plan.children[0].op == P.IDENTITY


def test_translate_unknown_names():
    store = simple_store()
    with pytest.raises(P.UnknownLabelError):
        P.translate(R.parse("?x  nolabel  ?y"), store)
    with pytest.raises(P.UnknownConstantError):
        P.translate(R.parse("nonode  a  ?y"), store)


# --- rewrite passes ----------------------------------------------------


def leaf():
    return P.PlanNode(P.LEAF, matrix=K2Matrix.build([(0, 1)], 4))


def test_collapse_closures():
    x = leaf()
    star = lambda n: P.PlanNode(P.CLOSURE_STAR, (n,))
    plus = lambda n: P.PlanNode(P.CLOSURE_PLUS, (n,))
    assert P.collapse_closures(star(star(x))).op == P.CLOSURE_STAR
    assert P.collapse_closures(star(star(x))).children == (x,)
    assert P.collapse_closures(plus(plus(x))) == plus(x)
    assert P.collapse_closures(star(plus(x))) == star(x)
    assert P.collapse_closures(plus(star(x))) == star(x)
    # triple nesting reduces fully
    assert P.collapse_closures(plus(star(plus(x)))) == star(x)


def test_collapse_via_parse():
    store = simple_store()
    plan = P.compile_query(R.parse("?x  (a*)+  ?y"), store)
    assert plan.op == P.CLOSURE_STAR
    assert plan.children[0].op == P.LEAF


def test_inherit_sum_pushes_to_internal_children():
    x = P.PlanNode(P.SUM, (leaf(), leaf()))
    y = P.PlanNode(P.PRODUCT, (leaf(), leaf()))
    node = P.PlanNode(P.SUM, (x, y), restriction=Restriction(row=1))
    out = P.inherit_restrictions(node)
    assert out.restriction.is_empty()
    assert out.children[0].restriction == Restriction(row=1)
    assert out.children[1].restriction == Restriction(row=1)


def test_inherit_sum_keeps_restriction_for_leaf_children():
    node = P.PlanNode(P.SUM, (leaf(), leaf()), restriction=Restriction(row=1))
    out = P.inherit_restrictions(node)
    assert out.restriction == Restriction(row=1)
    assert all(c.restriction.is_empty() for c in out.children)


def test_inherit_product_splits_row_and_col():
    inner = lambda: P.PlanNode(P.SUM, (leaf(), leaf()))
    node = P.PlanNode(
        P.PRODUCT, (inner(), leaf(), inner()), restriction=Restriction(row=2, col=3)
    )
    out = P.inherit_restrictions(node)
    assert out.restriction.is_empty()
    assert out.children[0].restriction == Restriction(row=2)
    assert out.children[-1].restriction == Restriction(col=3)
    assert out.children[1].restriction.is_empty()


def test_inherit_closure_keeps_restriction():
    node = P.PlanNode(P.CLOSURE_PLUS, (leaf(),), restriction=Restriction(row=1))
    out = P.inherit_restrictions(node)
    assert out.restriction == Restriction(row=1)
    assert out.children[0].restriction.is_empty()


def test_fuse_patterns():
    store = simple_store()
    # closure on the left meeting a column restriction fuses
    plan = P.compile_query(R.parse("?x  a+/b  w"), store)
    assert plan.fused == "left"
    # closure on the right meeting a row restriction fuses
    plan = P.compile_query(R.parse("u  b/a+  ?y"), store)
    assert plan.fused == "right"
    # no restriction, no fusion
    plan = P.compile_query(R.parse("?x  a+/b  ?y"), store)
    assert plan.fused is None
    # a bare closure is not a product; nothing to fuse
    plan = P.compile_query(R.parse("?x  a+  w"), store)
    assert plan.op == P.CLOSURE_PLUS and plan.fused is None


# --- operand ordering --------------------------------------------------


class _FakeAlgebra:
    """Records pairing order; 'matrices' are just 1-counts."""

    def __init__(self):
        self.log = []

    def add(self, a, b):
        self.log.append((a.ones, b.ones))
        return _Fake(a.ones + b.ones)

    multiply = add


class _Fake:
    def __init__(self, ones):
        self.ones = ones


def test_order_sum_picks_two_smallest():
    alg = _FakeAlgebra()
    out = P.order_sum([_Fake(5), _Fake(3), _Fake(2), _Fake(9)], alg)
    assert alg.log[0] == (2, 3)
    assert out.ones == 19


def test_order_product_picks_min_adjacent_pair():
    alg = _FakeAlgebra()
    P.order_product([_Fake(10), _Fake(1), _Fake(1), _Fake(10)], alg)
    assert alg.log[0] == (1, 1)


def test_order_sum_equals_fold():
    import sparseq.k2algebra as A

    rng = random.Random(60)
    for _ in range(30):
        side = 16
        mats = [
            K2Matrix.build(
                [(rng.randrange(side), rng.randrange(side)) for _ in range(rng.randrange(20))],
                side,
            )
            for _ in range(6)
        ]
        want = mats[0]
        for m in mats[1:]:
            want = A.add(want, m)
        got = P.order_sum(list(mats), A)
        assert set(got.enumerate_ones()) == set(want.enumerate_ones())


def test_order_product_equals_fold():
    import sparseq.k2algebra as A

    rng = random.Random(61)
    for _ in range(30):
        side = 16
        mats = [
            K2Matrix.build(
                [(rng.randrange(side), rng.randrange(side)) for _ in range(rng.randrange(30))],
                side,
            )
            for _ in range(5)
        ]
        want = mats[0]
        for m in mats[1:]:
            want = A.multiply(want, m)
        got = P.order_product(list(mats), A)
        assert set(got.enumerate_ones()) == set(want.enumerate_ones())


# --- evaluation --------------------------------------------------------


def test_eval_epsilon_is_identity():
    store = simple_store()
    m = P.run_query(R.parse("?x  eps  ?y"), store)
    assert m.plus_identity
    got = result_bindings(m, store)
    assert got == {(i, i) for i in range(len(store.nodes))}


def test_subway_toy_graph():
    # five stops: walk into the subway, ride N/Q any distance, walk out
    triples = [
        ("CentralPark", "walk", "57th"),
        ("57th", "N", "TimesSq"),
        ("TimesSq", "Q", "Union"),
        ("Union", "N", "Canal"),
        ("TimesSq", "walk", "Bryant"),
        ("Canal", "walk", "CityHall"),
    ]
    for backend in ("k2", "csr"):
        store = store_from_triples(triples, backend)
        q = R.parse("CentralPark  walk/(N|Q)+/walk  ?y")
        got = result_bindings(P.run_query(q, store), store)
        names = {store.nodes.name(c) for _, c in got}
        # reachable by walk, one or more subway hops, then walk
        assert names == {"Bryant", "CityHall"}


def test_random_queries_match_oracle_both_backends():
    rng = random.Random(62)
    for _ in range(40):
        triples = rand_graph(rng)
        for backend in ("k2", "csr"):
            store = store_from_triples(triples, backend)
            for _ in range(3):
                q = rand_query(rng, store)
                want = oracle_bindings(q, triples, store)
                got = result_bindings(P.run_query(q, store), store)
                assert got == want, R.print_query(q)


def test_optimized_equals_unoptimized():
    rng = random.Random(63)
    for _ in range(40):
        triples = rand_graph(rng)
        store = store_from_triples(triples)
        q = rand_query(rng, store)
        base = result_bindings(P.evaluate(P.translate(q, store), store), store)
        opt = result_bindings(P.evaluate(P.compile_query(q, store), store), store)
        assert base == opt, R.print_query(q)


def test_fused_equals_unfused():
    rng = random.Random(64)
    shapes = ["%s  a+/b  ?y", "?x  a/b+  %s", "%s  a*/b  %s", "?x  b/a*  %s", "%s  (a|b)+/b  ?y"]
    for _ in range(30):
        triples = rand_graph(rng, max_nodes=15, labels=("a", "b"))
        store = store_from_triples(triples)
        known = list(store.nodes)
        shape = rng.choice(shapes)
        text = shape % tuple(rng.choice(known) for _ in range(shape.count("%s")))
        q = R.parse(text)
        base = result_bindings(P.evaluate(P.translate(q, store), store), store)
        opt = result_bindings(P.evaluate(P.compile_query(q, store), store), store)
        assert base == opt, text


def test_timeout_raises():
    rng = random.Random(65)
    triples = rand_graph(rng, max_nodes=19)
    store = store_from_triples(triples)
    q = R.parse("?x  (a|b|c|d)+/(a|b)+/(c|d)+  ?y")
    plan = P.compile_query(q, store)
    with pytest.raises(P.QueryTimeout):
        P.evaluate(plan, store, timeout=-1.0)  # deadline already passed


def test_deadline_is_checked_during_evaluation():
    # a generous deadline leaves the result untouched
    store = simple_store()
    q = R.parse("?x  (a|b)+  ?y")
    t0 = time.monotonic()
    P.run_query(q, store, timeout=60.0)
    assert time.monotonic() - t0 < 60.0
