"""Independent ground truth for tests: dense matrices and an
automaton-based path query evaluator.

Deliberately naive and shares no code with the engine: dense numpy
arrays with textbook operations, and a Thompson automaton walked over
the product with the graph.
"""

from __future__ import annotations

from collections import defaultdict, deque

import numpy as np

MAX_SIDE = 1 << 12


class DenseMatrix:
    """Boolean side x side array; test-scale only."""

    def __init__(self, side: int, arr: np.ndarray | None = None):
        if side > MAX_SIDE:
            raise ValueError("dense oracle limited to side %d" % MAX_SIDE)
        self.side = side
        self.arr = np.zeros((side, side), dtype=bool) if arr is None else arr

    @classmethod
    def from_coords(cls, coords, side):
        m = cls(side)
        for r, c in coords:
            m.arr[r, c] = True
        return m

    def coords(self):
        return set(zip(*np.nonzero(self.arr)))

    def __eq__(self, other):
        return isinstance(other, DenseMatrix) and np.array_equal(self.arr, other.arr)


def dense_or(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    if a.side != b.side:
        raise ValueError("side mismatch")
    return DenseMatrix(a.side, a.arr | b.arr)


def dense_mul(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    if a.side != b.side:
        raise ValueError("side mismatch")
    prod = a.arr.astype(np.float32) @ b.arr.astype(np.float32)
    return DenseMatrix(a.side, prod > 0)


def dense_transpose(a: DenseMatrix) -> DenseMatrix:
    return DenseMatrix(a.side, a.arr.T.copy())


def warshall_closure(a: DenseMatrix) -> DenseMatrix:
    """Floyd-Warshall transitive closure (nonempty paths)."""
    m = a.arr.copy()
    for k in range(a.side):
        m |= np.outer(m[:, k], m[k, :])
    return DenseMatrix(a.side, m)


def dense_identity(side: int) -> DenseMatrix:
    return DenseMatrix(side, np.eye(side, dtype=bool))


def mask(a: DenseMatrix, row=None, col=None) -> DenseMatrix:
    out = np.zeros_like(a.arr)
    if row is not None and col is not None:
        out[row, col] = a.arr[row, col]
    elif row is not None:
        out[row, :] = a.arr[row, :]
    elif col is not None:
        out[:, col] = a.arr[:, col]
    else:
        raise ValueError("empty restriction")
    return DenseMatrix(a.side, out)


# ----------------------------------------------------------------------
# automaton-based 2RPQ oracle


class _Nfa:
    def __init__(self):
        self.eps = defaultdict(set)
        self.steps = defaultdict(set)  # state -> {(label, inverse, state)}
        self.n = 0

    def new_state(self):
        s = self.n
        self.n += 1
        return s


def _compile(nfa: _Nfa, ast) -> tuple[int, int]:
    """Thompson construction; returns (start, accept)."""
    from sparseq import rpqlang as R

    s, t = nfa.new_state(), nfa.new_state()
    if isinstance(ast, R.Epsilon):
        nfa.eps[s].add(t)
    elif isinstance(ast, R.Label):
        nfa.steps[s].add((ast.name, False, t))
    elif isinstance(ast, R.InverseLabel):
        nfa.steps[s].add((ast.name, True, t))
    elif isinstance(ast, R.Concat):
        cur = s
        for child in ast.children:
            cs, ct = _compile(nfa, child)
            nfa.eps[cur].add(cs)
            cur = ct
        nfa.eps[cur].add(t)
    elif isinstance(ast, R.Alt):
        for child in ast.children:
            cs, ct = _compile(nfa, child)
            nfa.eps[s].add(cs)
            nfa.eps[ct].add(t)
    elif isinstance(ast, (R.Star, R.Plus)):
        cs, ct = _compile(nfa, ast.child)
        nfa.eps[s].add(cs)
        nfa.eps[ct].add(t)
        nfa.eps[ct].add(cs)
        if isinstance(ast, R.Star):
            nfa.eps[s].add(t)
    elif isinstance(ast, R.Optional):
        cs, ct = _compile(nfa, ast.child)
        nfa.eps[s].add(cs)
        nfa.eps[ct].add(t)
        nfa.eps[s].add(t)
    else:
        raise TypeError("unknown AST node %r" % (ast,))
    return s, t


class PathOracle:
    """BFS over automaton-state x graph-node pairs."""

    def __init__(self, ast, triples, nodes):
        self.nfa = _Nfa()
        self.start, self.accept = _compile(self.nfa, ast)
        self.nodes = set(nodes)
        self.fwd = defaultdict(list)  # (label, node) -> [node]
        self.bwd = defaultdict(list)
        for s, p, o in triples:
            self.fwd[(p, s)].append(o)
            self.bwd[(p, o)].append(s)
            self.nodes.add(s)
            self.nodes.add(o)

    def reachable_from(self, src):
        """Graph nodes reachable at an accepting state from src."""
        seen = {(self.start, src)}
        queue = deque(seen)
        out = set()
        while queue:
            state, node = queue.popleft()
            if state == self.accept:
                out.add(node)
            for nstate in self.nfa.eps[state]:
                if (nstate, node) not in seen:
                    seen.add((nstate, node))
                    queue.append((nstate, node))
            for label, inverse, nstate in self.nfa.steps[state]:
                targets = self.bwd[(label, node)] if inverse else self.fwd[(label, node)]
                for nnode in targets:
                    if (nstate, nnode) not in seen:
                        seen.add((nstate, nnode))
                        queue.append((nstate, nnode))
        return out


def eval_rpq_oracle(query, triples, nodes=()) -> set:
    """All (subject, object) pairs matching the query over the completed
    graph; constants pin the corresponding end."""
    from sparseq import rpqlang as R

    oracle = PathOracle(query.expr, triples, nodes)
    if isinstance(query.subject, R.Constant):
        sources = [query.subject.value] if query.subject.value in oracle.nodes else []
    else:
        sources = sorted(oracle.nodes)
    pairs = set()
    for src in sources:
        for obj in oracle.reachable_from(src):
            pairs.add((src, obj))
    if isinstance(query.object, R.Constant):
        pairs = {p for p in pairs if p[1] == query.object.value}
    return pairs
