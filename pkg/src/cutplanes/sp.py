"""Stabbing Planes refutations: representation, verification, query classes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Union

from .exact import LinIneq, Polytope, combine, lp_optimum, INFEASIBLE, OPTIMAL, UNBOUNDED


@dataclass(eq=False)
class Leaf:
    """Farkas multipliers keyed by ('src', axiom index) or ('edge', depth index).
    Edge j is the inequality on the j-th edge of the root-to-leaf path."""
    cert: tuple   # ((('src'|'edge', idx), lam), ...)

    def __post_init__(self):
        self.cert = tuple(((k, int(i)), Fraction(lam)) for (k, i), lam in self.cert)


@dataclass(eq=False)
class Query:
    """Left edge a.x <= b - 1, right edge a.x >= b."""
    a: tuple
    b: int
    left: "Node"
    right: "Node"

    def __post_init__(self):
        self.a = tuple(int(v) for v in self.a)
        if isinstance(self.b, Fraction):
            if self.b.denominator != 1:
                raise ValueError("query threshold must be an integer")
            self.b = self.b.numerator
        self.b = int(self.b)

    def left_edge(self) -> LinIneq:
        return LinIneq.le(self.a, self.b - 1)

    def right_edge(self) -> LinIneq:
        return LinIneq.ge(self.a, self.b)


Node = Union[Query, Leaf]


@dataclass
class SpProof:
    axioms: Polytope
    root: Node

    @property
    def n(self) -> int:
        return self.axioms.dim


class Invalid(NamedTuple):
    node: int        # pre-order index
    reason: str


class Valid(NamedTuple):
    queries: int


def preorder(root: Node):
    """Yield (index, node, edges) in pre-order; edges are the path inequalities."""
    stack = [(root, ())]
    idx = 0
    while stack:
        node, edges = stack.pop()
        yield idx, node, edges
        idx += 1
        if isinstance(node, Query):
            stack.append((node.right, edges + (node.right_edge(),)))
            stack.append((node.left, edges + (node.left_edge(),)))


def check_leaf(axioms: Polytope, edges, leaf: Leaf) -> Optional[str]:
    rows, lams = [], []
    for (kind, i), lam in leaf.cert:
        if lam < 0:
            return "negative multiplier"
        if kind == "src":
            if not 0 <= i < len(axioms.ineqs):
                return f"axiom index {i} out of range"
            rows.append(axioms.ineqs[i])
        elif kind == "edge":
            if not 0 <= i < len(edges):
                return f"edge index {i} out of range"
            rows.append(edges[i])
        else:
            return f"unknown source {kind}"
        lams.append(lam)
    if not rows:
        return "empty certificate"
    coeffs, rhs = combine(rows, lams)
    if any(coeffs):
        return "combination leaves a nonzero coefficient"
    if rhs < 1:
        return "combination does not reach 0 >= 1"
    return None


def verify_sp(p: SpProof):
    for idx, node, edges in preorder(p.root):
        if isinstance(node, Query):
            if len(node.a) != p.n:
                return Invalid(idx, "query dimension mismatch")
            if not any(node.a):
                return Invalid(idx, "query with zero coefficients")
        elif isinstance(node, Leaf):
            why = check_leaf(p.axioms, edges, node)
            if why:
                return Invalid(idx, why)
        else:
            return Invalid(idx, "unknown node")
    return Valid(count_queries(p.root))


def count_queries(root: Node) -> int:
    return sum(1 for _, nd, _ in preorder(root) if isinstance(nd, Query))


def queries_with_polytopes(p: SpProof):
    """(query, rows of the polytope at that node) for every query."""
    base = list(p.axioms.ineqs)
    for _, node, edges in preorder(p.root):
        if isinstance(node, Query):
            yield node, base + list(edges)


def sp_depth(root: Node) -> int:
    """Queries on the longest root-to-leaf path."""
    best = 0
    stack = [(root, 0)]
    while stack:
        node, d = stack.pop()
        if isinstance(node, Query):
            stack.append((node.left, d + 1))
            stack.append((node.right, d + 1))
        else:
            best = max(best, d)
    return best


def sp_stats(p: SpProof):
    from .cp import Stats
    bits = 0
    for _, nd, _ in preorder(p.root):
        if isinstance(nd, Query):
            bits = max(bits, max((abs(c).bit_length() for c in nd.a), default=0))
    for h in p.axioms.ineqs:
        bits = max(bits, max((abs(c).bit_length() for c in h.coeffs), default=0))
    return Stats(count_queries(p.root), sp_depth(p.root), bits)


def is_path(root: Node) -> bool:
    """Every query has at least one leaf child."""
    for _, nd, _ in preorder(root):
        if isinstance(nd, Query) and not (isinstance(nd.left, Leaf) or isinstance(nd.right, Leaf)):
            return False
    return True


# ---------------------------------------------------------------------------
# query classes

PATHLIKE = "pathlike"
FACELIKE = "facelike"
GENERAL = "general"


class QueryClass(NamedTuple):
    kind: str
    side: Optional[str] = None   # 'left' / 'right'


def classify_query(p, a, b, rows=None) -> QueryClass:
    """Pathlike if a side misses p; Facelike if a side meets p in a face
    (a.x >= b-1 valid with the left slab collapsing to a.x = b-1, or the mirror).
    An empty p counts as Pathlike."""
    if rows is None:
        rows, n = list(p.ineqs), p.dim
    else:
        n = p if isinstance(p, int) else p.dim
    b = int(b)
    lo = lp_optimum(n, a, "min", rows=rows)
    if lo.status == INFEASIBLE:
        return QueryClass(PATHLIKE, "left")
    if lo.status == OPTIMAL and lo.value > b - 1:
        return QueryClass(PATHLIKE, "left")
    hi = lp_optimum(n, a, "max", rows=rows)
    if hi.status == OPTIMAL and hi.value < b:
        return QueryClass(PATHLIKE, "right")
    if lo.status == OPTIMAL and lo.value == b - 1:
        return QueryClass(FACELIKE, "left")
    if hi.status == OPTIMAL and hi.value == b:
        return QueryClass(FACELIKE, "right")
    return QueryClass(GENERAL)


def classify_all(p: SpProof) -> list:
    return [classify_query(p.n, q.a, q.b, rows=rows) for q, rows in queries_with_polytopes(p)]


def sp_diameter_bound(p: Polytope) -> Fraction:
    """Squared diameter bound sum_i (max x_i - min x_i)^2 of the bounding box."""
    total = Fraction(0)
    for i in range(p.dim):
        e = [0] * p.dim
        e[i] = 1
        lo = lp_optimum(p, e, "min")
        hi = lp_optimum(p, e, "max")
        if lo.status == INFEASIBLE:
            return Fraction(0)
        if lo.status == UNBOUNDED or hi.status == UNBOUNDED:
            raise ValueError("polytope is unbounded")
        total += (hi.value - lo.value) ** 2
    return total
