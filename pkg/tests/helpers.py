"""Shared generators and converters for the test suite."""

from __future__ import annotations

import os
import random
import tempfile

from sparseq import graphstore, oracle, rpqlang as R
from sparseq.csrmatrix import CsrcMatrix
from sparseq.k2matrix import K2Matrix


def rand_coords(rng: random.Random, side: int, count: int) -> set:
    return set((rng.randrange(side), rng.randrange(side)) for _ in range(count))


def to_dense(m) -> oracle.DenseMatrix:
    """Any engine matrix (k2 or csr, flags included) as a dense oracle matrix."""
    d = oracle.DenseMatrix(m.side)
    for r, c in m.enumerate_ones():
        d.arr[r, c] = True
    return d


def rand_matrix(rng, cls, side, count, flags=True):
    m = cls.build(rand_coords(rng, side, count), side)
    if flags and rng.random() < 0.5:
        m = m.transpose()
    if flags and rng.random() < 0.5:
        m = m.with_identity()
    return m


def write_triples(triples, path=None) -> str:
    if path is None:
        fd, path = tempfile.mkstemp(suffix=".tsv")
        os.close(fd)
    with open(path, "w", encoding="utf-8") as fh:
        for s, p, o in triples:
            fh.write("%s\t%s\t%s\n" % (s, p, o))
    return path


def store_from_triples(triples, backend="k2") -> graphstore.GraphStore:
    path = write_triples(triples)
    try:
        return graphstore.load_triples(path, backend)
    finally:
        os.unlink(path)


def rand_graph(rng, max_nodes=20, labels=("a", "b", "c", "d")):
    """Random labeled digraph as string triples; every label occurs."""
    count = rng.randrange(2, max_nodes)
    pool = ["n%d" % i for i in range(count)]
    triples = set(
        (rng.choice(pool), rng.choice(labels), rng.choice(pool))
        for _ in range(rng.randrange(0, count * 3))
    )
    for lab in labels:
        triples.add((rng.choice(pool), lab, rng.choice(pool)))
    return sorted(triples)


def rand_expr(rng, depth, labels=("a", "b", "c", "d")):
    """Random path expression covering every grammar production."""
    kinds = ["label", "inv", "eps"]
    if depth > 0:
        kinds += ["concat", "alt", "star", "plus", "opt"] * 2
    kind = rng.choice(kinds)
    if kind == "label":
        return R.Label(rng.choice(labels))
    if kind == "inv":
        return R.InverseLabel(rng.choice(labels))
    if kind == "eps":
        return R.Epsilon()
    if kind == "concat":
        return R.Concat(tuple(rand_expr(rng, depth - 1, labels) for _ in range(rng.randrange(2, 4))))
    if kind == "alt":
        return R.Alt(tuple(rand_expr(rng, depth - 1, labels) for _ in range(rng.randrange(2, 4))))
    if kind == "star":
        return R.Star(rand_expr(rng, depth - 1, labels))
    if kind == "plus":
        return R.Plus(rand_expr(rng, depth - 1, labels))
    return R.Optional(rand_expr(rng, depth - 1, labels))


def rand_query(rng, store, depth=3):
    """Random 2RPQ hitting all four constant/variable endpoint cases."""
    known = list(store.nodes)
    case = rng.randrange(4)
    subj = R.Variable("x") if case in (0, 1) else R.Constant(rng.choice(known))
    obj = R.Variable("y") if case in (0, 2) else R.Constant(rng.choice(known))
    labels = tuple(store.labels)
    return R.RpqQuery(subj, rand_expr(rng, depth, labels), obj)


def oracle_bindings(query, triples, store) -> set:
    """Expected (subject id, object id) pairs from the automaton oracle."""
    pairs = oracle.eval_rpq_oracle(query, triples, list(store.nodes))
    return {(store.nodes.lookup(s), store.nodes.lookup(o)) for s, o in pairs}


def result_bindings(matrix, store) -> set:
    limit = len(store.nodes)
    return set(matrix.enumerate_ones(identity_limit=limit))


MATRIX_CLASSES = (K2Matrix, CsrcMatrix)
