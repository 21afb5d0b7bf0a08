"""Stabbing Planes refutations of unsatisfiable systems of linear equations over F_q.

A fixed certificate alpha (alpha^T A = 0, alpha^T b != 0 mod q) is used.  The SP
tree binary-searches for a violated equation: for a set I of equations it learns
the integer value k_I of S_I = sum_{i in I} alpha_i f_i, where f_i is the integer
linear form of equation i over the weighted bits of its variables.  Invariant:
k_I - sum_{i in I} alpha_i b_i != 0 (mod q).
"""
from __future__ import annotations

import sys as _sys
from fractions import Fraction
from functools import lru_cache
from math import ceil, log2
from typing import Optional

from .exact import (LinIneq, ModCertificate, ModSolution, ceil_frac, combine, lp_optimum,
                    solve_mod_p, INFEASIBLE, OPTIMAL)
from .instances import (LinSystemFq, bits_per_var, equation_clauses, range_clauses,
                        system_polytope, to_cnf)
from .sp import Leaf, Query, SpProof


class SatisfiableSystem(ValueError):
    def __init__(self, witness):
        super().__init__(f"system is satisfiable, e.g. by {list(witness)}")
        self.witness = tuple(witness)


def certificate(sys: LinSystemFq) -> tuple:
    """alpha with inclusion-minimal support, as a length-m tuple over F_q."""
    A, b = sys.matrix()
    res = solve_mod_p(A, b, sys.q)
    if isinstance(res, ModSolution):
        raise SatisfiableSystem(res.x)
    support = [i for i, a in enumerate(res.alpha) if a]
    for i in list(support):
        trial = [j for j in support if j != i]
        if not trial:
            continue
        sub = solve_mod_p([A[j] for j in trial], [b[j] for j in trial], sys.q)
        if isinstance(sub, ModCertificate):
            support = trial
    sub = solve_mod_p([A[j] for j in support], [b[j] for j in support], sys.q)
    alpha = [0] * sys.m
    for j, a in zip(support, sub.alpha):
        alpha[j] = a % sys.q
    if any(alpha[j] == 0 for j in support):
        raise AssertionError("certificate on a minimal support must be full")
    return tuple(alpha)


def split(I: tuple):
    h = (len(I) + 1) // 2
    return I[:h], I[h:]


class _Builder:
    def __init__(self, sys: LinSystemFq, prune: bool, layout: str, transcript):
        self.sys = sys
        self.q = sys.q
        self.L = bits_per_var(sys.q)
        self.P = system_polytope(sys)
        self.base = list(self.P.ineqs)
        self.nA = len(self.base)
        self.n = self.P.dim
        self.prune = prune
        self.layout = layout
        self.transcript = transcript
        self.alpha = certificate(sys)
        self.clause_index = {}
        for j, cl in enumerate(to_cnf(sys).clauses):
            self.clause_index.setdefault(tuple(cl), j)
        self.nclauses = self.nA - 2 * self.n

    # -- forms and facts ---------------------------------------------------
    def form(self, I) -> tuple:
        c = [0] * self.n
        for i in I:
            supp, coeffs, _ = self.sys.equations[i]
            for v, cv in zip(supp, coeffs):
                for t in range(self.L):
                    c[v * self.L + t] += self.alpha[i] * cv * (1 << t)
        return tuple(c)

    def rhs_sum(self, I) -> int:
        return sum(self.alpha[i] * self.sys.equations[i][2] for i in I)

    def key(self, idx):
        return ("src", idx) if idx < self.nA else ("edge", idx - self.nA)

    def row(self, key, edges) -> LinIneq:
        kind, i = key
        return self.base[i] if kind == "src" else edges[i]

    def lp(self, edges, obj, direction):
        return lp_optimum(self.n, obj, direction, rows=self.base + list(edges))

    def dual_cert(self, dual) -> dict:
        return {self.key(i): Fraction(y) for i, y in enumerate(dual) if y}

    def box_facts(self, S):
        """S >= 0 and -S >= -sum(S) from the variable bounds (S has nonnegative coefficients)."""
        lo, hi = {}, {}
        for j, c in enumerate(S):
            if c:
                lo[("src", self.nclauses + 2 * j)] = Fraction(c)
                hi[("src", self.nclauses + 2 * j + 1)] = Fraction(c)
        return (lo, Fraction(0)), (hi, Fraction(-sum(S)))

    def leaf(self, terms, edges) -> Leaf:
        """terms: (cert dict, multiplier).  The sum must be 0 >= r with r > 0."""
        acc: dict = {}
        for cert, mul in terms:
            for k, lam in cert.items():
                acc[k] = acc.get(k, 0) + lam * mul
        keys = [k for k, v in acc.items() if v]
        rows = [self.row(k, edges) for k in keys]
        coeffs, rhs = combine(rows, [acc[k] for k in keys])
        if any(coeffs) or rhs <= 0:
            raise AssertionError("leaf combination does not refute")
        return Leaf(tuple((k, acc[k] / rhs) for k in sorted(keys)))

    def infeasible_leaf(self, res, edges) -> Leaf:
        return self.leaf([(self.dual_cert(res.dual), 1)], edges)

    # -- value trees -------------------------------------------------------
    def value_tree(self, S, edges, cont):
        """Tree learning the integer value k of S; calls cont(k, ge, le, edges) per outcome.
        ge / le are facts (cert, rhs) for S >= k and -S >= -k."""
        if self.prune:
            lo_r = self.lp(edges, S, "min")
            if lo_r.status == INFEASIBLE:
                return self.infeasible_leaf(lo_r, edges)
            hi_r = self.lp(edges, S, "max")
            lo_fact = (self.dual_cert(lo_r.dual), lo_r.value)
            hi_fact = (self.dual_cert(hi_r.dual), -hi_r.value)
            m, M = lo_r.value, hi_r.value
        else:
            lo_fact, hi_fact = self.box_facts(S)
            m, M = Fraction(0), Fraction(sum(S))
        lo, hi = ceil_frac(m), -ceil_frac(-M)
        if lo > hi:
            q = Query(S, lo, None, None)
            e = len(edges)
            q.left = self.leaf([(lo_fact[0], 1), ({("edge", e): 1}, 1)], edges + (q.left_edge(),))
            q.right = self.leaf([(hi_fact[0], 1), ({("edge", e): 1}, 1)], edges + (q.right_edge(),))
            return q
        if self.layout == "balanced":
            return self._balanced(S, edges, lo, hi, m, M, lo_fact, hi_fact, cont)
        return self._chain(S, edges, lo, hi, m, M, lo_fact, hi_fact, cont)

    def _edge_fact(self, e, sign, rhs):
        return ({("edge", e): Fraction(1)}, Fraction(rhs))

    def _chain(self, S, edges, lo, hi, m, M, lo_fact, hi_fact, cont):
        ts = []
        if m != lo:
            ts.append(lo)
        ts.extend(range(lo + 1, hi + 1))
        if M != hi:
            ts.append(hi + 1)
        if not ts:
            return cont(lo, lo_fact, hi_fact, edges)
        root = None
        parent = None
        ge = lo_fact
        cur = edges
        for pos, t in enumerate(ts):
            q = Query(S, t, None, None)
            e = len(cur)
            left_edges = cur + (q.left_edge(),)
            right_edges = cur + (q.right_edge(),)
            if t == lo and m != lo:
                q.left = self.leaf([(lo_fact[0], 1), ({("edge", e): 1}, 1)], left_edges)
            else:
                q.left = cont(t - 1, ge, self._edge_fact(e, -1, -(t - 1)), left_edges)
            ge = self._edge_fact(e, 1, t)
            if pos == len(ts) - 1:
                if t == hi + 1:
                    q.right = self.leaf([(hi_fact[0], 1), ({("edge", e): 1}, 1)], right_edges)
                else:
                    q.right = cont(hi, ge, hi_fact, right_edges)
            if parent is None:
                root = q
            else:
                parent.right = q
            parent = q
            cur = right_edges
        return root

    def _balanced(self, S, edges, lo, hi, m, M, lo_fact, hi_fact, cont):
        def bal(a, c, ge, le, cur):
            if a == c:
                return cont(a, ge, le, cur)
            t = (a + c + 1) // 2
            q = Query(S, t, None, None)
            e = len(cur)
            q.left = bal(a, t - 1, ge, self._edge_fact(e, -1, -(t - 1)), cur + (q.left_edge(),))
            q.right = bal(t, c, self._edge_fact(e, 1, t), le, cur + (q.right_edge(),))
            return q

        def upper(ge, cur):
            if M != hi:
                q = Query(S, hi + 1, None, None)
                e = len(cur)
                q.left = bal(lo, hi, ge, self._edge_fact(e, -1, -hi), cur + (q.left_edge(),))
                q.right = self.leaf([(hi_fact[0], 1), ({("edge", e): 1}, 1)], cur + (q.right_edge(),))
                return q
            return bal(lo, hi, ge, hi_fact, cur)

        if m != lo:
            q = Query(S, lo, None, None)
            e = len(edges)
            q.left = self.leaf([(lo_fact[0], 1), ({("edge", e): 1}, 1)], edges + (q.left_edge(),))
            q.right = upper(self._edge_fact(e, 1, lo), edges + (q.right_edge(),))
            return q
        return upper(lo_fact, edges)

    # -- the recursion -----------------------------------------------------
    def build(self):
        I = tuple(i for i, a in enumerate(self.alpha) if a)
        S = self.form(I)

        def root_outcome(k, ge, le, edges):
            if k % self.q:
                self.log(f"root I={list(I)} k={k} case=i")
                return self.case_i(S, k, ge, le, edges)
            return self.recurse(I, k, ge, le, edges)

        return self.value_tree(S, (), root_outcome)

    def log(self, line):
        if self.transcript is not None:
            self.transcript.append(line)

    def case_i(self, S, k, ge, le, edges):
        q = self.q
        Sq = tuple(c // q for c in S)
        t = -((-k) // q)
        node = Query(Sq, t, None, None)
        e = len(edges)
        node.left = self.leaf([(ge[0], 1), ({("edge", e): Fraction(1)}, q)], edges + (node.left_edge(),))
        node.right = self.leaf([(le[0], 1), ({("edge", e): Fraction(1)}, q)], edges + (node.right_edge(),))
        return node

    def recurse(self, I, k, ge, le, edges):
        if (k - self.rhs_sum(I)) % self.q == 0:
            raise AssertionError("recursion invariant broken")
        if len(I) == 1:
            self.log(f"I={list(I)} k={k} case=iii")
            return self.case_iii(I[0], k, ge, le, edges)
        I1, I2 = split(I)
        S1, S2 = self.form(I1), self.form(I2)

        def after_a(a, ge1, le1, e1):
            if (a - self.rhs_sum(I1)) % self.q:
                self.log(f"I={list(I)} k={k} split={list(I1)}|{list(I2)} a={a} -> left")
                return self.recurse(I1, a, ge1, le1, e1)

            def after_b(b, ge2, le2, e2):
                if (b - self.rhs_sum(I2)) % self.q:
                    self.log(f"I={list(I)} k={k} split={list(I1)}|{list(I2)} a={a} b={b} -> right")
                    return self.recurse(I2, b, ge2, le2, e2)
                self.log(f"I={list(I)} k={k} split={list(I1)}|{list(I2)} a={a} b={b} case=ii")
                if a + b > k:
                    return self.leaf([(ge1[0], 1), (ge2[0], 1), (le[0], 1)], e2)
                return self.leaf([(le1[0], 1), (le2[0], 1), (ge[0], 1)], e2)

            return self.value_tree(S2, e1, after_b)

        return self.value_tree(S1, edges, after_a)

    def case_iii(self, i, k, ge, le, edges):
        supp, coeffs, rhs = self.sys.equations[i]
        bits = [v * self.L + t for v in supp for t in range(self.L)]
        S = self.form((i,))
        facts = {}

        def step(pos, cur):
            if pos == len(bits):
                return self.close_iii(i, k, ge, le, facts, cur)
            j = bits[pos]
            e = [0] * self.n
            e[j] = 1

            def got(val, g, l, nxt):
                facts[j] = (val, g, l)
                return step(pos + 1, nxt)

            return self.value_tree(tuple(e), cur, got)

        return step(0, edges)

    def close_iii(self, i, k, ge, le, facts, edges):
        supp, coeffs, rhs = self.sys.equations[i]
        L, q = self.L, self.q
        vals = []
        for v in supp:
            vals.append(sum(facts[v * L + t][0] << t for t in range(L)))
        clause = None
        for v, u in zip(supp, vals):
            if u >= q:
                clause = tuple(x if ((u >> t) & 1) == 0 else -x
                               for t, x in ((t, v * L + t + 1) for t in range(L)))
                break
        if clause is None and sum(c * u for c, u in zip(coeffs, vals)) % q != rhs:
            clause = tuple(x if b == 0 else -x for v, u in zip(supp, vals)
                           for x, b in ((v * L + t + 1, (u >> t) & 1) for t in range(L)))
        if clause is not None:
            ci = self.clause_index[clause]
            terms = [({("src", ci): Fraction(1)}, 1)]
            for lit in clause:
                val, g, l = facts[abs(lit) - 1]
                terms.append((l[0], 1) if lit > 0 else (g[0], 1))
            return self.leaf(terms, edges)
        S = self.form((i,))
        value = sum(c * facts[j][0] for j, c in enumerate(S) if c)
        if value == k:
            raise AssertionError("equation holds and matches k: invariant broken")
        if value > k:
            terms = [(le[0], 1)] + [(facts[j][1][0], c) for j, c in enumerate(S) if c]
        else:
            terms = [(ge[0], 1)] + [(facts[j][2][0], c) for j, c in enumerate(S) if c]
        return self.leaf(terms, edges)


def refute_sp(sys: LinSystemFq, prune: bool = True, layout: str = "chain", transcript=None) -> SpProof:
    """SP refutation of the CNF encoding of sys.

    prune: use LP bounds to skip impossible outcomes and close empty nodes early
    (otherwise every outcome between the structural bounds is explored).
    layout: 'chain' (ascending thresholds, facelike) or 'balanced'."""
    if layout not in ("chain", "balanced"):
        raise ValueError("layout must be chain or balanced")
    old = _sys.getrecursionlimit()
    _sys.setrecursionlimit(max(old, 100000))
    try:
        b = _Builder(sys, prune, layout, transcript)
        root = b.build()
    finally:
        _sys.setrecursionlimit(old)
    return SpProof(b.P, root)


def _balanced_depths(a: int, c: int) -> list:
    """Depth of each outcome a..c in the balanced threshold tree."""
    out = []

    def go(lo, hi, d):
        if lo == hi:
            out.append(d)
            return
        t = (lo + hi + 1) // 2
        go(lo, t - 1, d + 1)
        go(t, hi, d + 1)

    go(a, c, 0)
    return out


def refute_sp_stats(sys: LinSystemFq):
    """(size, depth) of refute_sp(sys, prune=False, layout='balanced'), counted
    without materializing the tree."""
    alpha = certificate(sys)
    q, L = sys.q, bits_per_var(sys.q)
    I0 = tuple(i for i, a in enumerate(alpha) if a)

    def upper(I):
        return sum(alpha[i] * c * ((1 << L) - 1) for i in I for c in sys.equations[i][1])

    def rsum(I):
        return sum(alpha[i] * sys.equations[i][2] for i in I)

    def value(U, cont):
        depths = _balanced_depths(0, U)
        size, depth = U, 0
        for k, dk in enumerate(depths):
            s, d = cont(k)
            size += s
            depth = max(depth, dk + d)
        return size, depth

    @lru_cache(maxsize=None)
    def rec(I, k):
        if len(I) == 1:
            w = len(sys.equations[I[0]][0]) * L
            return (1 << w) - 1, w
        I1, I2 = split(I)

        def after_a(a):
            if (a - rsum(I1)) % q:
                return rec(I1, a)

            def after_b(b):
                if (b - rsum(I2)) % q:
                    return rec(I2, b)
                return 0, 0

            return value(upper(I2), after_b)

        return value(upper(I1), after_a)

    def root(k):
        if k % q:
            return 1, 1
        return rec(I0, k)

    return value(upper(I0), root)


def size_bound(sys: LinSystemFq) -> int:
    """Arithmetic ceiling on the number of queries refute_sp may emit."""
    q, L = sys.q, bits_per_var(sys.q)
    alpha = certificate(sys)
    s = sum(1 for a in alpha if a)
    V = 2 * q * q * sys.m * sys.d + 3
    R = ceil(log2(s)) + 1 if s > 1 else 1
    return (V + 1) ** (2 * R + 1) * 2 ** (sys.d * L + 1)
