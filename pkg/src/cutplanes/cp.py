"""Syntactic Cutting Planes proofs and top-down semantic CP DAGs."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .exact import LinIneq, Polytope, ceil_frac, combine, lp_optimum, OPTIMAL, UNBOUNDED
from .instances import BudgetExceeded, Cnf, budget, clause_row, to_polytope


@dataclass(frozen=True)
class Axiom:
    index: int


@dataclass(frozen=True)
class LinComb:
    terms: tuple   # ((line index, lambda), ...)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((int(i), lam) for i, lam in self.terms))


@dataclass(frozen=True)
class Division:
    line: int
    divisor: int


Justification = Union[Axiom, LinComb, Division]


@dataclass(frozen=True)
class CpLine:
    ineq: LinIneq
    just: Justification


@dataclass
class CpProof:
    axioms: Polytope
    lines: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.axioms.dim

    def add(self, ineq: LinIneq, just: Justification) -> int:
        self.lines.append(CpLine(ineq, just))
        return len(self.lines) - 1

    def axiom(self, k: int) -> int:
        return self.add(self.axioms.ineqs[k], Axiom(k))

    def lincomb(self, terms) -> int:
        terms = [(i, lam) for i, lam in terms if lam]
        coeffs, rhs = combine([self.lines[i].ineq for i, _ in terms], [lam for _, lam in terms])
        if not terms:
            coeffs, rhs = (0,) * self.n, Fraction(0)
        return self.add(LinIneq(tuple(int(c) for c in coeffs), rhs), LinComb(tuple(terms)))

    def divide(self, i: int, d: int) -> int:
        h = self.lines[i].ineq
        out = LinIneq(tuple(c // d for c in h.coeffs), ceil_frac(h.rhs / d))
        return self.add(out, Division(i, d))

    def last(self) -> LinIneq:
        return self.lines[-1].ineq


class Verdict(NamedTuple):
    valid: bool
    where: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.valid


def _check_line(p: CpProof, j: int, line: CpLine) -> Optional[str]:
    h = line.ineq
    if h.dim != p.n:
        return "dimension mismatch"
    js = line.just
    if isinstance(js, Axiom):
        if not 0 <= js.index < len(p.axioms.ineqs):
            return f"axiom index {js.index} out of range"
        if p.axioms.ineqs[js.index] != h:
            return "line differs from the cited axiom"
        return None
    if isinstance(js, LinComb):
        acc = [0] * p.n
        rhs = Fraction(0)
        for i, lam in js.terms:
            if not 0 <= i < j:
                return f"reference {i} is not an earlier line"
            if isinstance(lam, Fraction) and lam.denominator != 1:
                return "multiplier is not an integer"
            lam = int(lam)
            if lam < 0:
                return "negative multiplier"
            src = p.lines[i].ineq
            for t, c in enumerate(src.coeffs):
                if c:
                    acc[t] += lam * c
            rhs += lam * src.rhs
        if tuple(acc) != h.coeffs or rhs != h.rhs:
            return "line is not the stated combination"
        return None
    if isinstance(js, Division):
        i, d = js.line, js.divisor
        if not 0 <= i < j:
            return f"reference {i} is not an earlier line"
        if d <= 0:
            return "divisor must be positive"
        src = p.lines[i].ineq
        if any(c % d for c in src.coeffs):
            return "divisor does not divide every coefficient"
        if tuple(c // d for c in src.coeffs) != h.coeffs or ceil_frac(src.rhs / d) != h.rhs:
            return "line is not the rounded quotient"
        return None
    return "unknown justification"


def verify_cp(p: CpProof, refutation: bool = True) -> Verdict:
    """Line-by-line recomputation; the first failing line is reported (0-based)."""
    for j, line in enumerate(p.lines):
        why = _check_line(p, j, line)
        if why:
            return Verdict(False, j, why)
    if refutation:
        if not p.lines:
            return Verdict(False, None, "empty proof")
        last = p.lines[-1].ineq
        if not (last.is_zero() and last.rhs == 1):
            return Verdict(False, len(p.lines) - 1, "last line is not 0 >= 1")
    return Verdict(True)


def cg_cut_derive(p: Polytope, a):
    """From LP duals: lambda-combination proving a.x >= b, then division to a.x >= ceil(b).
    Returns (cut, fragment) where the fragment's axioms are p."""
    a = tuple(int(v) for v in a)
    g = 0
    for v in a:
        g = gcd(g, v)
    if g != 1:
        raise ValueError("coefficients must be relatively prime")
    res = lp_optimum(p, a, "min")
    if res.status == UNBOUNDED:
        raise ValueError("objective unbounded below: no valid lower bound")
    if res.status != OPTIMAL:
        raise ValueError("polytope is empty")
    frag = CpProof(p)
    D = 1
    for y in res.dual:
        if y:
            D = lcm(D, Fraction(y).denominator)
    terms = []
    for k, y in enumerate(res.dual):
        if y:
            terms.append((frag.axiom(k), int(y * D)))
    frag.lincomb(terms)
    frag.divide(len(frag.lines) - 1, D)
    return frag.last(), frag


# ---------------------------------------------------------------------------
# resolution

@dataclass(frozen=True)
class ResStep:
    clause: tuple
    premises: Optional[tuple] = None   # None for an axiom step, else (i, j) earlier steps
    axiom: Optional[int] = None


def _norm(cl) -> tuple:
    return tuple(sorted(set(cl), key=lambda l: (abs(l), l)))


def check_resolution(f: Cnf, steps: Sequence[ResStep]) -> Optional[str]:
    for t, st in enumerate(steps):
        if st.premises is None:
            if st.axiom is None or not 0 <= st.axiom < len(f.clauses):
                return f"step {t}: bad axiom reference"
            if _norm(f.clauses[st.axiom]) != _norm(st.clause):
                return f"step {t}: clause differs from axiom"
            continue
        i, j = st.premises
        if not (0 <= i < t and 0 <= j < t):
            return f"step {t}: premises must be earlier steps"
        a, b = set(steps[i].clause), set(steps[j].clause)
        clash = [l for l in a if -l in b]
        if len(clash) != 1:
            return f"step {t}: premises clash on {len(clash)} variables"
        v = clash[0]
        res = (a - {v}) | (b - {-v})
        if _norm(res) != _norm(st.clause):
            return f"step {t}: wrong resolvent"
    if not steps or steps[-1].clause:
        return "does not end with the empty clause"
    return None


def decision_tree_resolution(f: Cnf) -> list:
    """Tree-like resolution refutation read off a DPLL-style decision tree
    (branch on a variable of a shortest open clause)."""
    n = f.num_vars
    steps: list = []
    ax_step: dict = {}

    def falsified(rho):
        for k, c in enumerate(f.clauses):
            if all(rho.get(abs(l)) is not None and (rho[abs(l)] == 1) != (l > 0) for l in c):
                return k
        return None

    def pick(rho):
        best = None
        for c in f.clauses:
            if any(rho.get(abs(l)) is not None and (rho[abs(l)] == 1) == (l > 0) for l in c):
                continue
            free = [abs(l) for l in c if abs(l) not in rho]
            if free and (best is None or len(free) < len(best)):
                best = free
        if best is None:
            free = [v for v in range(1, n + 1) if v not in rho]
            if not free:
                raise ValueError("formula is satisfiable")
            return free[0]
        return min(best)

    def axiom_step(k):
        if k not in ax_step:
            steps.append(ResStep(_norm(f.clauses[k]), None, k))
            ax_step[k] = len(steps) - 1
        return ax_step[k]

    def go(rho):
        k = falsified(rho)
        if k is not None:
            return axiom_step(k)
        v = pick(rho)
        rho[v] = 0
        s0 = go(rho)
        del rho[v]
        if v not in steps[s0].clause:
            return s0
        rho[v] = 1
        s1 = go(rho)
        del rho[v]
        if -v not in steps[s1].clause:
            return s1
        res = (set(steps[s0].clause) - {v}) | (set(steps[s1].clause) - {-v})
        steps.append(ResStep(_norm(res), (s0, s1)))
        return len(steps) - 1

    go({})
    return steps


def resolution_to_cp(f: Cnf, steps: Sequence[ResStep]) -> CpProof:
    """Each resolvent: sum of the two clause inequalities (plus literal bounds and a
    halving when the side clauses overlap)."""
    why = check_resolution(f, steps)
    if why:
        raise ValueError("invalid resolution proof: " + why)
    P = to_polytope(f)
    proof = CpProof(P)
    m = len(f.clauses)
    line_of: dict = {}
    box_line: dict = {}

    def box(lit):
        key = lit
        if key not in box_line:
            v = abs(lit) - 1
            box_line[key] = proof.axiom(m + 2 * v + (0 if lit > 0 else 1))
        return box_line[key]

    for t, st in enumerate(steps):
        if st.premises is None:
            line_of[t] = proof.axiom(st.axiom)
            continue
        i, j = st.premises
        a, b = set(steps[i].clause), set(steps[j].clause)
        v = next(l for l in a if -l in b)
        ra, rb = a - {v}, b - {-v}
        shared = ra & rb
        if not shared:
            line_of[t] = proof.lincomb([(line_of[i], 1), (line_of[j], 1)])
        else:
            terms = [(line_of[i], 1), (line_of[j], 1)]
            for lit in sorted(ra ^ rb, key=lambda l: (abs(l), l)):
                terms.append((box(lit), 1))
            s = proof.lincomb(terms)
            line_of[t] = proof.divide(s, 2)
    return proof


# ---------------------------------------------------------------------------
# top-down semantic CP

@dataclass(frozen=True)
class ScpNode:
    ineq: LinIneq            # the halfspace of falsified points
    children: tuple = ()
    sink: Optional[int] = None


@dataclass
class ScpDag:
    n: int
    nodes: list

    def child_count(self, v: int) -> int:
        return len(self.nodes[v].children)


def complement(h: LinIneq) -> LinIneq:
    """Integer points violating h: a.x <= ceil(b) - 1."""
    return LinIneq(tuple(-c for c in h.coeffs), 1 - ceil_frac(h.rhs))


def cp_to_scp(p: CpProof, f: Cnf) -> ScpDag:
    """Reverse every line into its falsified halfspace.  Multi-term combinations
    become chains of partial sums; box axioms contribute no boolean points and are
    dropped; clause axioms become sinks."""
    if not p.lines:
        raise ValueError("empty proof")
    m = len(f.clauses)
    n = p.n
    # lines reachable from the last
    need = set()
    stack = [len(p.lines) - 1]
    while stack:
        j = stack.pop()
        if j in need:
            continue
        need.add(j)
        js = p.lines[j].just
        if isinstance(js, LinComb):
            stack.extend(i for i, lam in js.terms if lam)
        elif isinstance(js, Division):
            stack.append(js.line)

    def is_box(j):
        js = p.lines[j].just
        return isinstance(js, Axiom) and js.index >= m

    order = sorted(need, reverse=True)
    # plan: each line j gets a block of node slots (its own node, then its partial sums)
    plan = []
    for j in order:
        if is_box(j):
            continue
        js = p.lines[j].just
        if isinstance(js, LinComb):
            terms = [(i, int(lam)) for i, lam in js.terms if lam and not is_box(i)]
            full = [(i, int(lam)) for i, lam in js.terms if lam]
            plan.append((j, "comb", terms, full))
        elif isinstance(js, Division):
            plan.append((j, "div", [] if is_box(js.line) else [js.line], None))
        else:
            plan.append((j, "axiom", js.index, None))
    slot = {}
    pos = 0
    for j, kind, terms, _ in plan:
        slot[j] = pos
        pos += 1 + (max(len(terms) - 2, 0) if kind == "comb" else 0)
    nodes = [None] * pos
    for j, kind, terms, full in plan:
        h = complement(p.lines[j].ineq)
        s = slot[j]
        if kind == "axiom":
            nodes[s] = ScpNode(h, (), terms)
            continue
        if kind == "div":
            kids = tuple(slot[i] for i in terms)
            nodes[s] = ScpNode(h, kids, None if kids else 0)
            continue
        if len(terms) <= 2:
            kids = tuple(dict.fromkeys(slot[i] for i, _ in terms))
            nodes[s] = ScpNode(h, kids, None if kids else 0)
            continue
        # partial sums: S_k = sum of the first k non-box terms (k = len-1 .. 2)
        k = len(terms)
        chain = [s] + [s + t for t in range(1, k - 1)]   # chain[t] holds S_{k-t}
        for t, node_slot in enumerate(chain):
            upto = k - t
            if t == 0:
                ineq = h
            else:
                sub = terms[:upto]
                coeffs, rhs = combine([p.lines[i].ineq for i, _ in sub], [lam for _, lam in sub])
                ineq = complement(LinIneq(tuple(int(c) for c in coeffs), rhs))
            last_term = slot[terms[upto - 1][0]]
            if upto > 2:
                kids = (chain[t + 1], last_term)
            else:
                kids = tuple(dict.fromkeys((slot[terms[0][0]], last_term)))
            nodes[node_slot] = ScpNode(ineq, kids, None)
    return ScpDag(n, nodes)


def _points(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int64)


def _mask(P: np.ndarray, h: LinIneq) -> np.ndarray:
    c = h.coeffs
    if not any(c):
        return np.full(P.shape[0], 0 >= h.rhs)
    big = max(abs(v) for v in c) * len(c)
    if big < (1 << 60) and abs(h.rhs) < (1 << 60):
        vals = P @ np.array(c, dtype=np.int64)
        return vals >= ceil_frac(h.rhs)
    vals = P.astype(object) @ np.array(c, dtype=object)
    return np.array([v >= h.rhs for v in vals], dtype=bool)


def verify_scp(d: ScpDag, f: Cnf, limit: Optional[int] = None) -> Verdict:
    """Exhaustive over {0,1}^n.  Node 0 is the root."""
    n = d.n
    if limit is None:
        limit = budget("scp_max_vars", 22)
    if n > limit:
        raise BudgetExceeded(f"{n} variables exceed the exhaustive limit {limit}")
    if n != f.num_vars:
        return Verdict(False, None, "dimension differs from the formula")
    if not d.nodes:
        return Verdict(False, None, "empty DAG")
    has_parent = [False] * len(d.nodes)
    for v, node in enumerate(d.nodes):
        if node.ineq.dim != n:
            return Verdict(False, v, "dimension mismatch")
        if len(node.children) > 2:
            return Verdict(False, v, "fan-out above 2")
        if node.sink is not None and node.children:
            return Verdict(False, v, "sink with children")
        if node.sink is None and not node.children:
            return Verdict(False, v, "leaf without a clause")
        for w in node.children:
            if not v < w < len(d.nodes):
                return Verdict(False, v, "child index must exceed the parent's")
            has_parent[w] = True
    if not d.nodes[0].ineq.is_universal() or any(d.nodes[0].ineq.coeffs):
        return Verdict(False, 0, "root is not R^n")
    for v in range(1, len(d.nodes)):
        if not has_parent[v]:
            return Verdict(False, v, "second source")
    P = _points(n)
    masks: dict = {}

    def mask(v):
        if v not in masks:
            masks[v] = _mask(P, d.nodes[v].ineq)
        return masks[v]

    for v, node in enumerate(d.nodes):
        mv = mask(v)
        if node.sink is not None:
            k = node.sink
            if not 0 <= k < len(f.clauses):
                return Verdict(False, v, "sink cites a missing clause")
            sat = _mask(P, clause_row(f.clauses[k], n))
            if (mv & sat).any():
                return Verdict(False, v, "sink contains a point satisfying its clause")
        else:
            cover = np.zeros_like(mv)
            for w in node.children:
                cover |= mask(w)
            if (mv & ~cover).any():
                return Verdict(False, v, "children do not cover the node")
        # drop masks no longer needed
        for w in list(masks):
            if w < v:
                del masks[w]
    return Verdict(True)


# ---------------------------------------------------------------------------
# statistics

class Stats(NamedTuple):
    size: int
    depth: int
    max_coeff_bits: int


def _bits(ineqs) -> int:
    return max((abs(c).bit_length() for h in ineqs for c in h.coeffs), default=0)


def cp_stats(p: CpProof) -> Stats:
    depth = []
    for line in p.lines:
        js = line.just
        if isinstance(js, Axiom):
            depth.append(1)
        elif isinstance(js, LinComb):
            depth.append(1 + max((depth[i] for i, _ in js.terms), default=0))
        else:
            depth.append(1 + depth[js.line])
    return Stats(len(p.lines), max(depth, default=0), _bits(l.ineq for l in p.lines))


def scp_stats(d: ScpDag) -> Stats:
    """depth counts edges on the longest root-to-sink path."""
    h = [0] * len(d.nodes)
    for v in range(len(d.nodes) - 1, -1, -1):
        h[v] = 1 + max((h[w] for w in d.nodes[v].children), default=-1)
    return Stats(len(d.nodes), h[0] if h else 0, _bits(nd.ineq for nd in d.nodes))


def stats(obj) -> Stats:
    from .sp import SpProof, sp_stats
    if isinstance(obj, CpProof):
        return cp_stats(obj)
    if isinstance(obj, ScpDag):
        return scp_stats(obj)
    if isinstance(obj, SpProof):
        return sp_stats(obj)
    raise TypeError(f"no statistics for {type(obj).__name__}")
