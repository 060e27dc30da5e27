"""Compile parsed path queries into matrix-algebra plans and run them.

Translation maps labels to adjacency matrices (inverse labels to their
O(1) transposes), alternation to sums, concatenation to products and
Kleene operators to closures; constant endpoints become row/column
restrictions on the root.  Optimization collapses nested closures,
inherits restrictions downward, orders sums Huffman-style and products
by greedy adjacent contraction, and fuses closure-times-restricted
products into an iteration that never materializes the full closure.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field, replace

from sparseq.graphstore import BACKENDS, GraphStore
from sparseq.k2algebra import Restriction
from sparseq import rpqlang as R

EMPTY_RESTRICTION = Restriction()

LEAF = "leaf"
IDENTITY = "identity"
SUM = "sum"
PRODUCT = "product"
CLOSURE_PLUS = "closure_plus"
CLOSURE_STAR = "closure_star"

_CLOSURES = (CLOSURE_PLUS, CLOSURE_STAR)
_ATOMS = (LEAF, IDENTITY)


class PlanError(ValueError):
    pass


class UnknownLabelError(PlanError):
    pass


class UnknownConstantError(PlanError):
    pass


class QueryTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class PlanNode:
    op: str
    children: tuple = ()
    matrix: object = None  # leaf payload
    restriction: Restriction = EMPTY_RESTRICTION
    fused: str | None = None  # "left" | "right" closure-product fusion

    def describe(self) -> str:
        """Compact s-expression of the plan, for logs and tests."""
        parts = [self.op]
        if self.fused:
            parts.append("fused=" + self.fused)
        if self.restriction.row is not None:
            parts.append("row=%d" % self.restriction.row)
        if self.restriction.col is not None:
            parts.append("col=%d" % self.restriction.col)
        head = " ".join(parts)
        if not self.children:
            return "(%s)" % head
        return "(%s %s)" % (head, " ".join(c.describe() for c in self.children))


# --- translation -------------------------------------------------------


def _translate_expr(ast, store: GraphStore) -> PlanNode:
    if isinstance(ast, R.Epsilon):
        return PlanNode(IDENTITY)
    if isinstance(ast, (R.Label, R.InverseLabel)):
        label_id = store.labels.lookup(ast.name)
        if label_id is None:
            raise UnknownLabelError("unknown label %r" % ast.name)
        mat = store.matrix(label_id)
        if isinstance(ast, R.InverseLabel):
            mat = mat.transpose()
        return PlanNode(LEAF, matrix=mat)
    if isinstance(ast, R.Concat):
        return PlanNode(PRODUCT, tuple(_translate_expr(c, store) for c in ast.children))
    if isinstance(ast, R.Alt):
        return PlanNode(SUM, tuple(_translate_expr(c, store) for c in ast.children))
    if isinstance(ast, R.Plus):
        return PlanNode(CLOSURE_PLUS, (_translate_expr(ast.child, store),))
    if isinstance(ast, R.Star):
        return PlanNode(CLOSURE_STAR, (_translate_expr(ast.child, store),))
    if isinstance(ast, R.Optional):
        return PlanNode(SUM, (PlanNode(IDENTITY), _translate_expr(ast.child, store)))
    raise TypeError("unknown AST node %r" % (ast,))


def _constant_id(term, store: GraphStore) -> int:
    node_id = store.nodes.lookup(term.value)
    if node_id is None:
        raise UnknownConstantError("unknown node %r" % term.value)
    return node_id


def translate(query: R.RpqQuery, store: GraphStore) -> PlanNode:
    """Unoptimized plan; constant endpoints become a root restriction."""
    root = _translate_expr(query.expr, store)
    row = _constant_id(query.subject, store) if isinstance(query.subject, R.Constant) else None
    col = _constant_id(query.object, store) if isinstance(query.object, R.Constant) else None
    if row is not None or col is not None:
        root = replace(root, restriction=Restriction(row=row, col=col))
    return root


# --- optimization passes ----------------------------------------------


def collapse_closures(node: PlanNode) -> PlanNode:
    """(A*)* = (A*)+ = (A+)* = A* and (A+)+ = A+."""
    children = tuple(collapse_closures(c) for c in node.children)
    node = replace(node, children=children)
    if node.op in _CLOSURES and children[0].op in _CLOSURES:
        inner = children[0]
        star = node.op == CLOSURE_STAR or inner.op == CLOSURE_STAR
        op = CLOSURE_STAR if star else CLOSURE_PLUS
        # inner restrictions cannot exist before inheritance; keep ours
        return replace(node, op=op, children=inner.children)
    return node


def _merge(res: Restriction, row, col) -> Restriction:
    return Restriction(
        row=res.row if res.row is not None else row,
        col=res.col if res.col is not None else col,
    )


def fuse_closure_product(node: PlanNode, inh_row=None, inh_col=None) -> PlanNode:
    """Mark products whose closure end meets an opposite-side restriction.

    Runs before inherit_restrictions, so it tracks the restrictions that
    the later pass will push down instead of reading rewritten nodes."""
    row = node.restriction.row if node.restriction.row is not None else inh_row
    col = node.restriction.col if node.restriction.col is not None else inh_col
    if node.op == SUM:
        children = tuple(fuse_closure_product(c, row, col) for c in node.children)
        return replace(node, children=children)
    if node.op == PRODUCT:
        fused = node.fused
        if col is not None and node.children[0].op in _CLOSURES:
            fused = "left"
        elif row is not None and node.children[-1].op in _CLOSURES:
            fused = "right"
        if fused:
            children = tuple(fuse_closure_product(c) for c in node.children)
            return replace(node, children=children, fused=fused)
        children = list(node.children)
        children[0] = fuse_closure_product(children[0], row, None)
        children[-1] = fuse_closure_product(children[-1], None, col)
        for i in range(1, len(children) - 1):
            children[i] = fuse_closure_product(children[i])
        return replace(node, children=tuple(children))
    if node.op in _CLOSURES:
        return replace(node, children=(fuse_closure_product(node.children[0]),))
    return node


def inherit_restrictions(node: PlanNode) -> PlanNode:
    """Push restrictions down: sums give both sides to every internal
    child, products give the row to the first and the column to the last
    internal child; closures keep theirs, leaves never receive any."""
    res = node.restriction
    if node.op == SUM:
        children = []
        keep = False
        for child in node.children:
            if child.op in _ATOMS:
                keep = True
            else:
                child = replace(child, restriction=_merge(child.restriction, res.row, res.col))
            children.append(inherit_restrictions(child))
        kept = res if (keep or res.is_empty()) else EMPTY_RESTRICTION
        return replace(node, children=tuple(children), restriction=kept)
    if node.op == PRODUCT:
        children = list(node.children)
        row, col = res.row, res.col
        if node.fused is None:
            if row is not None and children[0].op not in _ATOMS:
                children[0] = replace(
                    children[0], restriction=_merge(children[0].restriction, row, None)
                )
                row = None
            if col is not None and children[-1].op not in _ATOMS:
                children[-1] = replace(
                    children[-1], restriction=_merge(children[-1].restriction, None, col)
                )
                col = None
        children = [inherit_restrictions(c) for c in children]
        return replace(node, children=tuple(children), restriction=Restriction(row, col))
    if node.op in _CLOSURES:
        return replace(node, children=(inherit_restrictions(node.children[0]),))
    return node


def optimize(node: PlanNode) -> PlanNode:
    node = collapse_closures(node)
    node = fuse_closure_product(node)
    return inherit_restrictions(node)


def compile_query(query: R.RpqQuery, store: GraphStore) -> PlanNode:
    return optimize(translate(query, store))


# --- operand ordering --------------------------------------------------


def order_sum(matrices, algebra, check=None):
    """Huffman-style fold: repeatedly add the two smallest operands,
    re-measuring actual 1-counts as partial sums are produced."""
    if len(matrices) == 1:
        return matrices[0]
    heap = [(m.ones, i, m) for i, m in enumerate(matrices)]
    heapq.heapify(heap)
    seq = len(matrices)
    while len(heap) > 1:
        if check is not None:
            check()
        _, _, a = heapq.heappop(heap)
        _, _, b = heapq.heappop(heap)
        s = algebra.add(a, b)
        heapq.heappush(heap, (s.ones, seq, s))
        seq += 1
    return heap[0][2]


def order_product(matrices, algebra, check=None):
    """Greedy chain contraction: multiply the adjacent pair with the
    smallest combined 1-count; never commutes operands."""
    chain = list(matrices)
    while len(chain) > 1:
        if check is not None:
            check()
        best = min(range(len(chain) - 1), key=lambda i: chain[i].ones + chain[i + 1].ones)
        chain[best : best + 2] = [algebra.multiply(chain[best], chain[best + 1])]
    return chain[0]


# --- evaluation --------------------------------------------------------


class _Evaluator:
    def __init__(self, store: GraphStore, deadline: float | None, stats: dict | None):
        self.matrix_cls, self.algebra = BACKENDS[store.backend]
        self.side = store.side
        self.deadline = deadline
        self.stats = stats if stats is not None else {}
        self.stats.setdefault("operations", 0)

    def check(self):
        self.stats["operations"] += 1
        self.poll_deadline()

    def poll_deadline(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise QueryTimeout("query exceeded its deadline")

    def eval(self, node: PlanNode):
        self.check()
        res = node.restriction
        if node.op == LEAF:
            m = node.matrix
            return m if res.is_empty() else self.algebra.restrict(m, res)
        if node.op == IDENTITY:
            m = self.matrix_cls.empty(self.side).with_identity()
            return m if res.is_empty() else self.algebra.restrict(m, res)
        if node.op == SUM:
            return self._eval_sum(node)
        if node.op == PRODUCT:
            if node.fused:
                return self._eval_fused(node)
            mats = [self.eval(c) for c in node.children]
            if res.is_empty():
                return order_product(mats, self.algebra, self.check)
            return self._chain(mats, res.row, res.col)
        if node.op in _CLOSURES:
            reflexive = node.op == CLOSURE_STAR
            m = self.eval(node.children[0])
            closure_stats = {}
            if res.is_empty():
                clo = self.algebra.closure_star if reflexive else self.algebra.closure_plus
                out = clo(m, stats=closure_stats, check=self.check)
            else:
                out = self.algebra.closure_restricted(
                    m, res, reflexive=reflexive, stats=closure_stats, check=self.check
                )
            self.stats["closure_iterations"] = self.stats.get(
                "closure_iterations", 0
            ) + closure_stats.get("iterations", 0)
            return out
        raise TypeError("unknown plan op %r" % node.op)

    def _eval_sum(self, node: PlanNode):
        mats = [self.eval(c) for c in node.children]
        res = node.restriction
        if res.is_empty():
            return order_sum(mats, self.algebra, self.check)
        out = self.algebra.sum_restricted(mats[0], mats[1], res)
        for m in mats[2:]:
            self.check()
            out = self.algebra.sum_restricted(out, m, res)
        return out

    def _chain(self, mats, row, col):
        """Restricted product chain: row restrictions run left to right,
        column restrictions right to left, both meet at the last product."""
        alg = self.algebra
        if row is not None:
            if len(mats) == 2:
                return alg.multiply_restricted(mats[0], mats[1], Restriction(row, col))
            out = alg.multiply_restricted(mats[0], mats[1], Restriction(row, None))
            for m in mats[2:-1]:
                self.check()
                out = alg.multiply(out, m)
            self.check()
            if col is not None:
                return alg.multiply_restricted(out, mats[-1], Restriction(row, col))
            return alg.multiply(out, mats[-1])
        out = alg.multiply_restricted(mats[-2], mats[-1], Restriction(None, col))
        for m in reversed(mats[:-2]):
            self.check()
            out = alg.multiply(m, out)
        return out

    def _eval_fused(self, node: PlanNode):
        """Closure-product fusion: accumulate core^i x S (or S x core^i)
        without ever materializing the closure itself."""
        alg = self.algebra
        res = node.restriction
        if node.fused == "left":
            clo, rest = node.children[0], node.children[1:]
        else:
            clo, rest = node.children[-1], node.children[:-1]
        core = self.eval(clo.children[0])
        star = clo.op == CLOSURE_STAR or core.plus_identity
        core = core.without_identity()

        mats = [self.eval(c) for c in rest]
        if node.fused == "left":
            seed = self._chain(mats, None, res.col) if len(mats) > 1 else alg.restrict(
                mats[0], Restriction(None, res.col)
            )
        else:
            seed = self._chain(mats, res.row, None) if len(mats) > 1 else alg.restrict(
                mats[0], Restriction(res.row, None)
            )

        if star:
            acc = step = seed
        else:
            self.check()
            step = alg.multiply(core, seed) if node.fused == "left" else alg.multiply(seed, core)
            acc = step
        iterations = 0
        for _ in range(self.side + 1):
            if res.row is not None and res.col is not None and acc.get(res.row, res.col):
                break
            self.check()
            step = alg.multiply(core, step) if node.fused == "left" else alg.multiply(step, core)
            grown = alg.add(acc, step)
            iterations += 1
            if grown.ones == acc.ones:
                break
            acc = grown
        self.stats["closure_iterations"] = (
            self.stats.get("closure_iterations", 0) + iterations
        )
        if res.row is not None and res.col is not None:
            acc = alg.restrict(acc, res)
        return acc


def evaluate(plan: PlanNode, store: GraphStore, timeout: float | None = None, stats=None):
    """Run a compiled plan; raises QueryTimeout past the deadline.

    The deadline is checked between operations and closure iterations,
    and polled inside the multiply kernels so one oversized product
    cannot overrun it."""
    deadline = None if timeout is None else time.monotonic() + timeout
    ev = _Evaluator(store, deadline, stats)
    if deadline is None:
        return ev.eval(plan)
    ev.algebra.set_check_hook(ev.poll_deadline)
    try:
        return ev.eval(plan)
    finally:
        ev.algebra.set_check_hook(None)


def run_query(query: R.RpqQuery, store: GraphStore, timeout: float | None = None, stats=None):
    """Parse-tree to result matrix: translate, optimize, evaluate."""
    return evaluate(compile_query(query, store), store, timeout, stats)
