"""Proof translations: SP* -> facelike SP -> pathlike SP -> CP, and CP -> pathlike SP."""
from __future__ import annotations

import math
import sys as _sys
from fractions import Fraction
from math import lcm
from typing import Optional

import numpy as np

from .cp import Axiom, CpProof, Division, LinComb, verify_cp, cp_stats
from .exact import (LinIneq, Polytope, ceil_frac, combine, lp_optimum, INFEASIBLE, OPTIMAL,
                    UNBOUNDED)
from .instances import LinSystemFq
from .sp import (Leaf, Query, SpProof, count_queries, preorder, sp_depth, verify_sp, Valid,
                 sp_diameter_bound)


class NonFacelike(ValueError):
    pass


class NonPathlike(ValueError):
    pass


def _floor(v) -> int:
    return -ceil_frac(-Fraction(v))


def _scale_cert(cert: dict, s) -> dict:
    return {k: v * s for k, v in cert.items()}


def _add_cert(acc: dict, cert: dict, s=1) -> dict:
    for k, v in cert.items():
        if v:
            acc[k] = acc.get(k, 0) + v * s
    return acc


# ---------------------------------------------------------------------------
# Schrijver lift

def _lift_coeffs(c, t, mu, a, beta):
    """Shift by kappa = ceil(-mu) copies of a.x >= beta; returns (c', t', kappa)."""
    kappa = ceil_frac(-mu)
    c2 = tuple(ci + kappa * ai for ci, ai in zip(c, a))
    return c2, t + kappa * beta, kappa


def schrijver_lift(p: Polytope, face_eq, cut: LinIneq, dual, lp_check: bool = True) -> LinIneq:
    """Lift a CG cut of the face F = p ∩ {a.x = b} to a CG cut of p.

    dual: multipliers over (p's rows, a.x >= b, -a.x >= -b) summing exactly to
    c.x >= d where cut is c.x >= ceil(d).  The result is (c + k a).x >= ceil(d) + k b
    with k = ceil(-(dual on a.x >= b minus dual on -a.x >= -b)).  Its restriction to
    a.x = b is the cut itself."""
    a, b = tuple(int(v) for v in face_eq[0]), Fraction(face_eq[1])
    if len(dual) != len(p.ineqs) + 2:
        raise ValueError("need one multiplier per row of p plus two for the face")
    if any(Fraction(y) < 0 for y in dual):
        raise ValueError("dual certificate has a negative multiplier")
    rows = list(p.ineqs) + [LinIneq.ge(a, b), LinIneq.le(a, b)]
    coeffs, d = combine(rows, dual)
    if tuple(coeffs) != tuple(Fraction(c) for c in cut.coeffs):
        raise ValueError("dual certificate inconsistent with the cut")
    if ceil_frac(d) != cut.rhs:
        raise ValueError("cut is not the rounding of the certified bound")
    face_lp = lp_optimum(p, a, "min")
    if face_lp.status != OPTIMAL or face_lp.value < b:
        raise ValueError("a.x >= b is not valid for p")
    mu = Fraction(dual[-2]) - Fraction(dual[-1])
    c2, t2, kappa = _lift_coeffs(cut.coeffs, cut.rhs, mu, a, b)
    lifted = LinIneq(c2, t2)
    # exact certificate for (c + kappa a).x >= d + kappa b over p alone
    cert = [Fraction(y) for y in dual[:-2]]
    w = mu + kappa
    for i, y in enumerate(face_lp.dual):
        cert[i] += w * y
    cc, rr = combine(list(p.ineqs), cert)
    if tuple(cc) != tuple(Fraction(v) for v in c2) or rr < d + kappa * b:
        raise AssertionError("lifted certificate does not add up")
    if lp_check:
        check_lift(p, (a, b), cut, lifted, d + kappa * b)
    return lifted


def check_lift(p: Polytope, face_eq, cut: LinIneq, lifted: LinIneq, unrounded) -> None:
    """LP post-checks: the lifted form has minimum >= unrounded over p, and
    p ∩ {lifted} ∩ {a.x = b} satisfies the face cut."""
    a, b = face_eq
    lo = lp_optimum(p, lifted.coeffs, "min")
    if lo.status == OPTIMAL and lo.value < unrounded:
        raise AssertionError("lifted inequality is not valid before rounding")
    if lo.status == UNBOUNDED:
        raise AssertionError("lifted form unbounded below")
    rows = list(p.ineqs) + [lifted, LinIneq.ge(a, b), LinIneq.le(a, b)]
    r = lp_optimum(p.dim, cut.coeffs, "min", rows=rows)
    if r.status == OPTIMAL and r.value < cut.rhs:
        raise AssertionError("lifted cut does not imply the face cut on the face")
    if r.status == UNBOUNDED:
        raise AssertionError("face cut unbounded on the lifted face")


# ---------------------------------------------------------------------------
# facelike -> pathlike

class _Pathlike:
    """Accumulates the output path.  R0 = axioms followed by the surviving edge of
    every emitted query; keys ('r', i) index R0, ('f', j, +1/-1) the face rows."""

    def __init__(self, axioms: Polytope):
        self.axioms = axioms
        self.n = axioms.dim
        self.R0 = list(axioms.ineqs)
        self.nA = len(self.R0)
        self.faces = []        # (a, beta, cert over lower-level keys)
        self.steps = []        # (Query, side_of_leaf, Leaf)
        self.final: Optional[Leaf] = None
        self.lifts = 0
        self.max_bits = 0

    # rows of the polytope at face level k
    def rows(self, k):
        out = list(self.R0)
        keys = [("r", i) for i in range(len(self.R0))]
        for j in range(k):
            a, beta, _ = self.faces[j]
            out.append(LinIneq.ge(a, beta))
            keys.append(("f", j, 1))
            out.append(LinIneq.le(a, beta))
            keys.append(("f", j, -1))
        return out, keys

    def lp(self, k, obj, direction):
        rows, keys = self.rows(k)
        res = lp_optimum(self.n, obj, direction, rows=rows)
        cert = None
        if res.dual is not None:
            cert = {keys[i]: Fraction(y) for i, y in enumerate(res.dual) if y}
        return res, cert

    def row_of(self, key):
        if key[0] == "r":
            return self.R0[key[1]]
        a, beta, _ = self.faces[key[1]]
        return LinIneq.ge(a, beta) if key[2] > 0 else LinIneq.le(a, beta)

    def lift(self, c, t, m, cert, k):
        """c.x >= m (m > t - 1) certified at level k; returns the level-0 version."""
        for j in range(k - 1, -1, -1):
            a, beta, fcert = self.faces[j]
            mu = cert.pop(("f", j, 1), Fraction(0)) - cert.pop(("f", j, -1), Fraction(0))
            c, t, kappa = _lift_coeffs(c, t, mu, a, beta)
            m = m + kappa * beta
            _add_cert(cert, fcert, mu + kappa)
            self.lifts += 1
        coeffs, rhs = combine([self.row_of(key) for key in cert], list(cert.values()))
        if tuple(coeffs) != tuple(Fraction(v) for v in c) or rhs < m or not m > t - 1:
            raise AssertionError("lifted certificate does not add up")
        return c, t, rhs, cert

    def edge_row(self, i):
        return self.R0[self.nA + i]

    def leaf_from(self, cert, own=None) -> Leaf:
        """Leaf from a certificate over R0, plus weight 1 on `own` = (edge index, row)."""
        out, rows = {}, {}
        for key, lam in cert.items():
            if not lam:
                continue
            i = key[1]
            k2 = ("src", i) if i < self.nA else ("edge", i - self.nA)
            out[k2] = out.get(k2, 0) + lam
            rows[k2] = self.R0[i]
        if own is not None:
            k2 = ("edge", own[0])
            out[k2] = out.get(k2, 0) + 1
            rows[k2] = own[1]
        keys = sorted(out)
        coeffs, rhs = combine([rows[k] for k in keys], [out[k] for k in keys])
        if any(coeffs) or rhs <= 0:
            raise AssertionError("leaf certificate does not refute")
        return Leaf(tuple((k, out[k] / rhs) for k in keys))

    def emit(self, c, t, m, cert, orient="left") -> None:
        """Emit query (c, t) whose `orient` side is empty; cert proves c.x >= m
        (orient left) or -c.x >= m (orient right) over R0."""
        c = tuple(int(v) for v in c)
        t = int(t)
        if not any(c):
            # lifted onto a multiple of the face normal: 0 >= m
            if m > 0:
                self.final = self.leaf_from(cert)
            return
        q = Query(c, t, None, None)
        idx = len(self.steps)
        empty = q.left_edge() if orient == "left" else q.right_edge()
        leaf = self.leaf_from(cert, (idx, empty))
        self.steps.append((q, orient, leaf))
        self.R0.append(q.right_edge() if orient == "left" else q.left_edge())
        self.max_bits = max(self.max_bits, max(abs(v).bit_length() for v in c))

    def build(self) -> SpProof:
        if self.final is None:
            raise AssertionError("no refutation reached")
        node = self.final
        for q, side, leaf in reversed(self.steps):
            if side == "left":
                q.left, q.right = leaf, node
            else:
                q.left, q.right = node, leaf
            node = q
        return SpProof(self.axioms, node)


def facelike_to_pathlike(p: SpProof, report: Optional[dict] = None) -> SpProof:
    """In-order replay: refute each face side first, lift its cuts to the outer
    polytope, then the outer query becomes pathlike."""
    st = _Pathlike(p.axioms)
    old = _sys.getrecursionlimit()
    _sys.setrecursionlimit(max(old, 20000))
    try:
        done = _process(st, p.root, 0)
    finally:
        _sys.setrecursionlimit(old)
    if not done and st.final is None:
        raise AssertionError("top level returned without a refutation")
    out = st.build()
    if report is not None:
        report["lifts"] = st.lifts
        report["max_lift_bits"] = st.max_bits
    return out


def _infeasible(st: _Pathlike, k, res, cert) -> bool:
    """Handle an empty level-k polytope.  Returns True (level finished)."""
    if k == 0:
        st.final = st.leaf_from(cert)
    return True


def _process(st: _Pathlike, node, k) -> bool:
    """Refute the level-k polytope following the subtree `node`.  Returns True
    once the level is empty (at level 0: once the final leaf exists)."""
    while True:
        if st.final is not None:
            return True
        zero = (0,) * st.n
        if isinstance(node, Leaf):
            res, cert = st.lp(k, zero, "min")
            if res.status != INFEASIBLE:
                raise AssertionError("leaf polytope is not empty")
            return _infeasible(st, k, res, cert)
        a, b = node.a, node.b
        lo, cert_lo = st.lp(k, a, "min")
        if lo.status == INFEASIBLE:
            return _infeasible(st, k, lo, cert_lo)
        if lo.status == OPTIMAL and lo.value > b - 1:
            _emit_at(st, k, a, b, lo.value, cert_lo, "left")
            node = node.right
            continue
        hi, cert_hi = st.lp(k, a, "max")
        if hi.status == OPTIMAL and hi.value < b:
            _emit_at(st, k, a, b, -hi.value, cert_hi, "right")
            node = node.left
            continue
        if lo.status == OPTIMAL and lo.value == b - 1:
            st.faces.append((a, b - 1, cert_lo))
            _process(st, node.left, k + 1)
            st.faces.pop()
            if st.final is not None:
                return True
            lo, cert_lo = st.lp(k, a, "min")
            if lo.status == INFEASIBLE:
                return _infeasible(st, k, lo, cert_lo)
            if not lo.value > b - 1:
                raise AssertionError("face side not refuted")
            _emit_at(st, k, a, b, lo.value, cert_lo, "left")
            node = node.right
            continue
        if hi.status == OPTIMAL and hi.value == b:
            na = tuple(-v for v in a)
            st.faces.append((na, -b, cert_hi))
            _process(st, node.right, k + 1)
            st.faces.pop()
            if st.final is not None:
                return True
            hi, cert_hi = st.lp(k, a, "max")
            if hi.status == INFEASIBLE:
                return _infeasible(st, k, hi, cert_hi)
            if not hi.value < b:
                raise AssertionError("face side not refuted")
            _emit_at(st, k, a, b, -hi.value, cert_hi, "right")
            node = node.left
            continue
        raise NonFacelike(f"query {a} / {b} is neither pathlike nor facelike")


def _emit_at(st: _Pathlike, k, a, b, m, cert, orient):
    """Level-k cut from a query whose `orient` side is empty."""
    if orient == "left":
        c, t = tuple(a), b
    else:
        c, t = tuple(-v for v in a), 1 - b
    cert = dict(cert)
    if k == 0:
        if orient == "left":
            st.emit(a, b, m, cert, "left")
        else:
            st.emit(a, b, m, cert, "right")
        return
    c2, t2, m2, cert2 = st.lift(c, t, m, cert, k)
    st.emit(c2, t2, m2, cert2, "left")


# ---------------------------------------------------------------------------
# pathlike <-> CP

def pathlike_to_cp(p: SpProof) -> CpProof:
    """Each pathlike query's surviving edge becomes a CP line: the leaf certificate on
    the empty side, divided by its edge multiplier, is a combination proving the
    surviving inequality up to rounding; one Division performs the rounding."""
    proof = CpProof(p.axioms)
    ax_line: dict = {}
    edge_line: list = []

    def line_for(key):
        kind, i = key
        if kind == "src":
            if i not in ax_line:
                ax_line[i] = proof.axiom(i)
            return ax_line[i]
        return edge_line[i]

    node = p.root
    depth = 0
    while isinstance(node, Query):
        if isinstance(node.left, Leaf):
            leaf, rest = node.left, node.right
        elif isinstance(node.right, Leaf):
            leaf, rest = node.right, node.left
        else:
            raise NonPathlike("query with two internal children")
        lam_e = Fraction(0)
        others = []
        for (kind, i), lam in leaf.cert:
            if kind == "edge" and i == depth:
                lam_e += lam
            elif kind == "edge" and i > depth:
                raise ValueError("certificate cites an edge below its leaf")
            else:
                others.append(((kind, i), lam))
        if lam_e == 0:
            # the path above is already contradictory
            return _close(proof, others, line_for)
        mus = [(key, lam / lam_e) for key, lam in others if lam]
        D = 1
        for _, mu in mus:
            D = lcm(D, mu.denominator)
        refs = [(line_for(key), int(mu * D)) for key, mu in mus]
        # a lone unit-weight antecedent needs no combination line
        s = refs[0][0] if len(refs) == 1 and refs[0][1] == 1 else proof.lincomb(refs)
        if D != 1 or proof.lines[s].ineq.rhs.denominator != 1:
            s = proof.divide(s, D)
        edge_line.append(s)
        node = rest
        depth += 1
    others = [((kind, i), lam) for (kind, i), lam in node.cert]
    return _close(proof, others, line_for)


def _close(proof, terms, line_for):
    D = 1
    for _, lam in terms:
        D = lcm(D, Fraction(lam).denominator)
    refs = [(line_for(key), int(Fraction(lam) * D)) for key, lam in terms if lam]
    s = proof.lincomb(refs)
    r = proof.lines[s].ineq.rhs
    if any(proof.lines[s].ineq.coeffs) or r <= 0:
        raise AssertionError("final combination is not a contradiction")
    if r != 1:
        proof.divide(s, ceil_frac(r))
    return proof


def cp_to_pathlike(p: CpProof) -> SpProof:
    """Line a.x >= b becomes the query (a.x <= ceil(b) - 1, a.x >= ceil(b)); its
    left leaf is the line's own justification."""
    edge_of: dict = {}
    steps = []
    final = None
    for j, line in enumerate(p.lines):
        h = line.ineq
        js = line.just
        cert: dict = {}
        if isinstance(js, Axiom):
            cert[("src", js.index)] = Fraction(1)
        elif isinstance(js, LinComb):
            for i, lam in js.terms:
                if lam and i in edge_of:
                    k = ("edge", edge_of[i])
                    cert[k] = cert.get(k, 0) + Fraction(lam)
        elif isinstance(js, Division):
            if js.line in edge_of:
                cert[("edge", edge_of[js.line])] = Fraction(1, js.divisor)
        if h.is_zero():
            if h.rhs > 0:
                final = _normalized_leaf(cert, p, steps)
                break
            continue
        t = ceil_frac(h.rhs)
        q = Query(h.coeffs, t, None, None)
        idx = len(steps)
        cert[("edge", idx)] = cert.get(("edge", idx), 0) + 1
        steps.append((q, cert))
        edge_of[j] = idx
    if final is None:
        raise ValueError("proof does not derive a contradiction")
    node = final
    for idx in range(len(steps) - 1, -1, -1):
        q, cert = steps[idx]
        q.left = _normalized_leaf(cert, p, steps[:idx], q.left_edge())
        q.right = node
        node = q
    return SpProof(p.axioms, node)


def _normalized_leaf(cert, p: CpProof, steps, own_edge=None) -> Leaf:
    rows, lams, keys = [], [], []
    for (kind, i), lam in cert.items():
        if kind == "src":
            rows.append(p.axioms.ineqs[i])
        elif i < len(steps):
            rows.append(steps[i][0].right_edge())
        else:
            rows.append(own_edge)
        lams.append(lam)
        keys.append((kind, i))
    coeffs, rhs = combine(rows, lams)
    if any(coeffs) or rhs <= 0:
        raise ValueError("line justification does not certify its query")
    return Leaf(tuple(sorted(((k, l / rhs) for k, l in zip(keys, lams)), key=lambda kv: kv[0])))


# ---------------------------------------------------------------------------
# SP* -> facelike

def count_leaves(node) -> int:
    return sum(1 for _, nd, _ in preorder(node) if isinstance(nd, Leaf))


def has_cube_bounds(p: Polytope) -> bool:
    """True iff every 0 <= x_i <= 1 row is present."""
    rows = set(p.ineqs)
    for i in range(p.dim):
        e = [0] * p.dim
        e[i] = 1
        if LinIneq.ge(e, 0) not in rows or LinIneq.le(e, 1) not in rows:
            return False
    return True


def facelike_size_bound(s: int, c: int, diam2, n: int) -> float:
    """s * (c * sqrt(diam2 * n)) ** log2(s), evaluated in floating point."""
    if s <= 1:
        return float(s)
    base = c * math.sqrt(float(diam2) * n)
    return s * base ** math.log2(s)


def bound_holds(measured: int, s: int, c: int, diam2, n: int) -> bool:
    """measured <= s * (c sqrt(diam2 n))^{log2 s}, compared through logarithms with
    a relative guard far below one unit of the measured size."""
    if s <= 1:
        return measured <= s
    base2 = Fraction(c * c) * Fraction(diam2) * n   # base squared, exact
    if base2 == 0:
        return False
    lhs = math.log(measured)
    rhs = math.log(s) + 0.5 * math.log(base2.numerator / base2.denominator) * math.log2(s)
    return lhs <= rhs + 1e-12


def sp_star_to_facelike(p: SpProof, c: Optional[int] = None, diam2=None, report: Optional[dict] = None) -> SpProof:
    """Replace each query by a chain of unit-step threshold queries on the side with
    the smaller subproof (left on ties); every piece is refuted by the converted
    subproof of that side.  Leaves are re-certified by LP."""
    n = p.n
    cmax = max((max(abs(v) for v in q.a) for _, q, _ in preorder(p.root) if isinstance(q, Query)), default=1)
    if c is None:
        c = cmax
    elif cmax > c:
        raise ValueError(f"coefficient {cmax} exceeds the bound {c}")
    if diam2 is None:
        if not has_cube_bounds(p.axioms):
            raise ValueError("a squared-diameter bound is required for non-cube polytopes")
        diam2 = n
    base = list(p.axioms.ineqs)

    def convert(rows, node):
        feas = lp_optimum(n, (0,) * n, "min", rows=rows)
        if feas.status == INFEASIBLE:
            return "leaf"
        if isinstance(node, Leaf):
            raise AssertionError("leaf polytope is not empty")
        a, beta = node.a, node.b
        left_e, right_e = node.left_edge(), node.right_edge()
        piL = convert(rows + [left_e], node.left)
        piR = convert(rows + [right_e], node.right)
        sL, sR = count_leaves(node.left), count_leaves(node.right)
        if sL <= sR:
            lo = lp_optimum(n, a, "min", rows=rows)
            if lo.status == UNBOUNDED:
                raise ValueError("unbounded polytope")
            b0 = _floor(lo.value)
            ts = list(range(b0 + 1, beta + 1)) or [beta]
            # chain ascending: left pieces a.x = t-1 use piL, final right uses piR
            root = None
            prev = None
            for t in ts:
                qn = Query(a, t, piL, None)
                if prev is None:
                    root = qn
                else:
                    prev.right = qn
                prev = qn
            prev.right = piR
            return root
        hi = lp_optimum(n, a, "max", rows=rows)
        if hi.status == UNBOUNDED:
            raise ValueError("unbounded polytope")
        B0 = ceil_frac(hi.value)
        ts = list(range(B0, beta - 1, -1)) or [beta]
        root = None
        prev = None
        for t in ts:
            qn = Query(a, t, None, piR)
            if prev is None:
                root = qn
            else:
                prev.left = qn
            prev = qn
        prev.left = piL
        return root

    old = _sys.getrecursionlimit()
    _sys.setrecursionlimit(max(old, 20000))
    try:
        shape = convert(base, p.root)
        root = _certify(p.axioms, shape)
    finally:
        _sys.setrecursionlimit(old)
    out = SpProof(p.axioms, root)
    if report is not None:
        s = count_leaves(p.root)
        m = count_leaves(root)
        report.update(input_leaves=s, output_leaves=m, c=c, diam2=diam2,
                      bound=facelike_size_bound(s, c, diam2, n), within_bound=bound_holds(m, s, c, diam2, n))
    return out


def _certify(axioms: Polytope, shape):
    """Copy the shape tree, replacing every 'leaf' marker with an LP certificate."""
    n = axioms.dim
    base = list(axioms.ineqs)
    nA = len(base)

    def go(node, edges):
        if node == "leaf":
            res = lp_optimum(n, (0,) * n, "min", rows=base + edges)
            if res.status != INFEASIBLE:
                raise AssertionError("converted leaf is not empty")
            cert = []
            for i, y in enumerate(res.dual):
                if y:
                    cert.append((("src", i) if i < nA else ("edge", i - nA), Fraction(y)))
            return Leaf(tuple(cert))
        q = Query(node.a, node.b, None, None)
        q.left = go(node.left, edges + [q.left_edge()])
        q.right = go(node.right, edges + [q.right_edge()])
        return q

    return go(shape, [])


# ---------------------------------------------------------------------------
# pipeline

def compile_system(sys: LinSystemFq, report: Optional[dict] = None, verify: bool = True) -> CpProof:
    """refute_sp -> (sp_star_to_facelike if some query is general) ->
    facelike_to_pathlike -> pathlike_to_cp."""
    from .refuter import refute_sp
    from .cp import stats as _stats
    rep = report if report is not None else {}
    sp = refute_sp(sys)
    rep["refute_sp"] = _stats(sp)
    try:
        path = facelike_to_pathlike(sp, rep.setdefault("lift", {}))
    except NonFacelike:
        face = sp_star_to_facelike(sp, report=rep.setdefault("sp_star", {}))
        rep["facelike"] = _stats(face)
        path = facelike_to_pathlike(face, rep["lift"])
    rep["pathlike"] = _stats(path)
    cp = pathlike_to_cp(path)
    rep["cp"] = cp_stats(cp)
    if verify:
        v = verify_cp(cp)
        if not v.valid:
            raise AssertionError(f"compiled proof failed verification at line {v.where}: {v.reason}")
    return cp


# ---------------------------------------------------------------------------
# random SP* refutations for fuzzing

def random_integer_free_polytope(n: int, rng, extra: int = 3, tries: int = 200) -> Optional[Polytope]:
    """Cube rows plus random cuts, nonempty but with no 0/1 point."""
    from itertools import product
    pts = list(product((0, 1), repeat=n))
    for _ in range(tries):
        rows = [LinIneq.ge(rng.integers(-3, 4, size=n).tolist(), int(rng.integers(-2, 4))) for _ in range(extra)]
        P = Polytope(rows, n).add(*[h for h in _cube(n)])
        if any(P.contains(x) for x in pts):
            continue
        if lp_optimum(P, (0,) * n, "min").status == INFEASIBLE:
            continue
        return P
    return None


def _cube(n):
    return Polytope.cube(n).ineqs


def random_sp_proof(P: Polytope, rng, c: int = 3, general: float = 0.5, max_depth: int = 6) -> SpProof:
    """Random refutation: random queries with |coeff| <= c above max_depth, then
    branching on a fractional LP coordinate until every leaf is empty."""
    n = P.dim
    base = list(P.ineqs)

    def grow(rows, depth):
        feas = lp_optimum(n, (0,) * n, "min", rows=rows)
        if feas.status == INFEASIBLE:
            return "leaf"
        x = feas.witness
        if depth < max_depth and rng.random() < general:
            a = [0] * n
            while not any(a):
                a = rng.integers(-c, c + 1, size=n).tolist()
            lo = lp_optimum(n, a, "min", rows=rows).value
            hi = lp_optimum(n, a, "max", rows=rows).value
            b = int(rng.integers(_floor(lo), ceil_frac(hi) + 2))
            q = Query(a, b, None, None)
        else:
            frac = [i for i in range(n) if Fraction(x[i]).denominator != 1]
            if not frac:
                raise AssertionError("integral point in an integer-free polytope")
            i = frac[int(rng.integers(len(frac)))]
            e = [0] * n
            e[i] = 1
            q = Query(e, ceil_frac(x[i]), None, None)
        q.left = grow(rows + [q.left_edge()], depth + 1)
        q.right = grow(rows + [q.right_edge()], depth + 1)
        return q

    return SpProof(P, _certify(P, grow(base, 0)))


def random_lift_case(rng, n: int, cmax: int = 5):
    """(p, (a, b), cut, dual) with a.x >= b a face-defining row of p and cut a CG
    cut of the face; None when the draw degenerates."""
    rows = [LinIneq.ge(rng.integers(-cmax, cmax + 1, size=n).tolist(), int(rng.integers(-cmax, cmax + 1)))
            for _ in range(int(rng.integers(0, 3)))]
    a = [0] * n
    while not any(a):
        a = rng.integers(-cmax, cmax + 1, size=n).tolist()
    box = list(Polytope.cube(n).ineqs)
    lo = lp_optimum(n, a, "min", rows=rows + box)
    hi = lp_optimum(n, a, "max", rows=rows + box)
    if lo.status != OPTIMAL:
        return None
    b = int(rng.integers(ceil_frac(lo.value), _floor(hi.value) + 1)) if ceil_frac(lo.value) <= _floor(hi.value) else None
    if b is None:
        return None
    p = Polytope(rows + box + [LinIneq.ge(a, b)], n)
    c = [0] * n
    while not any(c):
        c = rng.integers(-cmax, cmax + 1, size=n).tolist()
    F = list(p.ineqs) + [LinIneq.ge(a, b), LinIneq.le(a, b)]
    r = lp_optimum(n, c, "min", rows=F)
    if r.status != OPTIMAL:
        return None
    return p, (tuple(a), b), LinIneq.ge(c, ceil_frac(r.value)), r.dual
