"""Depth lower-bound machinery for semantic CP DAGs.

Halfspaces are LinIneq over {0,1}^n semantics.  A halfspace is good when it
contains the all-1/2 point.  Restrictions project a halfspace onto the free
coordinates of a Restriction (see instances.restrict_ineq).
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import NamedTuple, Optional, Sequence

from .cp import ScpDag
from .exact import LinIneq, nullspace_vector
from .instances import (BudgetExceeded, Cnf, LinSystemFq, Restriction, _supports, boundary,
                        boundary_expansion, budget, low_expansion_sets, restrict_cnf,
                        restrict_ineq, restrict_system)

HALF = Fraction(1, 2)


class InvariantViolation(AssertionError):
    pass


class CoverViolation(ValueError):
    pass


class NonExpanding(ValueError):
    pass


class NotARefutation(ValueError):
    pass


def is_good(h: LinIneq) -> bool:
    """All-1/2 membership, exact."""
    return sum(c * HALF for c in h.coeffs) >= h.rhs


def good_under(h: LinIneq, rho: Restriction) -> bool:
    return is_good(restrict_ineq(h, rho))


# ---------------------------------------------------------------------------
# consistent restriction

def consistent_restriction(h: LinIneq, I: Sequence[int], b: int) -> Restriction:
    """Fix exactly the coordinates I with parity b so that h stays good.

    Largest |w_i| first; all but the last take the sign of their weight, the
    last one settles the parity."""
    I = list(I)
    if len(I) < 2 or len(set(I)) != len(I):
        raise ValueError("need at least two distinct coordinates")
    w = h.coeffs
    order = sorted(I, key=lambda i: (-abs(w[i]), i))
    vals = {}
    for i in order[:-1]:
        vals[i] = 1 if w[i] >= 0 else 0
    vals[order[-1]] = (b - sum(vals.values())) % 2
    return Restriction.free_all(len(w)).extend(vals)


# ---------------------------------------------------------------------------
# orthogonal vector on a 2-face (±1 coordinates)

def orthogonal_2face_vector(w1, w2):
    """v in [-1,1]^n orthogonal to w1 and w2 with n-2 coordinates booleanized.

    Returns (v, face) where face lists the n-2 coordinates pinned to ±1; the
    other two lie in [-1,1] (they may also happen to be ±1)."""
    n = len(w1)
    if n < 3 or len(w2) != n:
        raise ValueError("need two vectors of equal length n >= 3")
    v = [Fraction(0)] * n
    face: list = []
    while len(face) < n - 2:
        rows = [list(w1), list(w2)]
        for j in face:
            e = [0] * n
            e[j] = 1
            rows.append(e)
        u = nullspace_vector(rows, n)
        if u is None:
            raise AssertionError("no direction left; rows span everything")
        u = [Fraction(x) for x in u]
        lead = next(x for x in u if x)
        if lead < 0:
            u = [-x for x in u]
        alpha = None
        for j in range(n):
            if j in face or not u[j]:
                continue
            bound = (1 - v[j]) / u[j] if u[j] > 0 else (-1 - v[j]) / u[j]
            if alpha is None or bound < alpha:
                alpha = bound
        v = [v[j] + alpha * u[j] for j in range(n)]
        for j in range(n):
            if j not in face and abs(v[j]) == 1 and len(face) < n - 2:
                face.append(j)
    return tuple(v), tuple(sorted(face))


# ---------------------------------------------------------------------------
# crux selection

def to_pm1(h: LinIneq) -> LinIneq:
    """Rewrite w.x >= c under x = (1 - y)/2 as an inequality in y."""
    return LinIneq(tuple(-c for c in h.coeffs), 2 * h.rhs - sum(h.coeffs))


def _sat(h: LinIneq, y) -> bool:
    return sum(c * v for c, v in zip(h.coeffs, y)) >= h.rhs


class Crux(NamedTuple):
    child: int             # 1 or 2
    rho: Restriction       # fixes at most two coordinates
    y: tuple               # witness in {-1,0,1}^n


def _restriction_from_y(y) -> Restriction:
    vals = {j: (1 - int(v)) // 2 for j, v in enumerate(y) if v in (1, -1)}
    return Restriction.free_all(len(y)).extend(vals)


def crux_select(H: LinIneq, H1: LinIneq, H2: LinIneq) -> Crux:
    """One of H1, H2 becomes good after fixing at most two coordinates, given H
    good and H ∩ {0,1}^n covered by H1 ∪ H2."""
    n = H.dim
    if not is_good(H):
        raise ValueError("H is not good")
    for idx, hc in ((1, H1), (2, H2)):
        if hc.is_universal():
            return Crux(idx, Restriction.free_all(n), (0,) * n)
    P, P1, P2 = to_pm1(H), to_pm1(H1), to_pm1(H2)
    if n <= 2:
        # no 2-face to work with: search {-1,0,1}^n, fewest fixings first
        pts = sorted(product((-1, 0, 1), repeat=n), key=lambda y: (sum(1 for t in y if t), y))
        for y in pts:
            for idx, hc in ((1, P1), (2, P2)):
                if _sat(hc, y):
                    return Crux(idx, _restriction_from_y(y), tuple(y))
        raise CoverViolation("no point of {-1,0,1}^n lies in either child")
    v, face = orthogonal_2face_vector(P1.coeffs, P2.coeffs)
    free = [j for j in range(n) if j not in face]
    # candidate quadrant corners of the 2-face containing v
    opts = [(1,) if v[j] > 0 else (-1,) if v[j] < 0 else (-1, 1) for j in free]
    corners = []
    for signs in product(*opts):
        a = list(v)
        for j, s in zip(free, signs):
            a[j] = s
        corners.append(tuple(int(x) for x in a))
    inside = sorted(a for a in corners if _sat(P, a))
    if inside:
        a = inside[0]
    else:
        a0 = min(corners)
        a = tuple(-x for x in a0)
        v = tuple(-x for x in v)
        if not _sat(P, a):
            raise AssertionError("H does not contain the origin")
    for idx, hc in ((1, P1), (2, P2)):
        if not _sat(hc, a):
            continue
        w = hc.coeffs
        diff = [Fraction(ai) - vi for ai, vi in zip(a, v)]
        if sum(c * d for c, d in zip(w, diff)) <= 0:
            y = (0,) * n                                     # case (i)
        else:                                                # case (ii)
            nz = [j for j in range(n) if diff[j]]
            steps = sorted((1 / abs(diff[j]), j) for j in nz)
            alpha = steps[0][0]
            if len(nz) > 1:
                # stop once all but one moving coordinate is ±1
                alpha = steps[len(nz) - 2][0]
            pt = [alpha * d for d in diff]
            rest = [j for j in nz if abs(pt[j]) != 1]
            y = None
            cands = [pt]
            if rest:
                j = rest[0]
                cands = []
                for s in (1, -1):
                    c2 = list(pt)
                    c2[j] = Fraction(s)
                    cands.append(c2)
            for c2 in cands:
                if _sat(hc, c2):
                    y = tuple(int(x) for x in c2)
                    break
            if y is None:
                raise AssertionError("rounding left the child halfspace")
        if not _sat(hc, y) or sum(1 for x in y if x) > 2:
            raise AssertionError("crux witness fails its postcondition")
        return Crux(idx, _restriction_from_y(y), y)
    raise CoverViolation(f"corner {a} of H lies in neither child")


# ---------------------------------------------------------------------------
# Prover-Adversary game

INF = math.inf


class Game:
    """Memoized minimax for the Prover-Adversary game of a CNF.  States are
    (fixed mask, value mask) pairs over the variables."""

    def __init__(self, f: Cnf):
        limit = budget("resdepth_max_vars", 14)
        if f.num_vars > limit:
            raise BudgetExceeded(f"{f.num_vars} variables exceed the game budget {limit}")
        self.f = f
        self.n = f.num_vars
        self.clauses = []
        for c in f.clauses:
            pos = neg = 0
            for lit in c:
                if lit > 0:
                    pos |= 1 << (lit - 1)
                else:
                    neg |= 1 << (-lit - 1)
            self.clauses.append((pos, neg))
        self._memo: dict = {}
        self.satisfiable = any(self._falsified((1 << self.n) - 1, x) is None for x in range(1 << self.n))

    def _falsified(self, fixed, val):
        for j, (pos, neg) in enumerate(self.clauses):
            if (pos | neg) & ~fixed:
                continue
            if not (pos & val) and not (neg & ~val):
                return j
        return None

    def ended(self, fixed, val) -> bool:
        return self._falsified(fixed, val) is not None

    def depth(self, fixed: int = 0, val: int = 0):
        if self.satisfiable:
            return INF
        key = (fixed, val & fixed)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if self.ended(fixed, val):
            out = 0
        else:
            out = INF
            for i in range(self.n):
                bit = 1 << i
                if fixed & bit:
                    continue
                worst = max(self.depth(fixed | bit, val & ~bit), self.depth(fixed | bit, val | bit))
                out = min(out, 1 + worst)
        self._memo[key] = out
        return out

    def answer(self, fixed: int, val: int, i: int) -> int:
        """Adversary: the value keeping the game longer; 0 on ties."""
        bit = 1 << i
        d0 = self.depth(fixed | bit, val & ~bit)
        d1 = self.depth(fixed | bit, val | bit)
        return 1 if d1 > d0 else 0


def res_depth(f: Cnf):
    """Game value: rounds the Prover needs against the best Adversary (inf if satisfiable)."""
    return Game(f).depth()


# ---------------------------------------------------------------------------
# walks

class Step(NamedTuple):
    node: int
    child: Optional[int]
    fixed: tuple      # ((var, value), ...) newly fixed at this step
    k: Optional[int]


class Walk(NamedTuple):
    steps: list
    length: int       # edges traversed
    end: str          # why the walk stopped
    rho: Restriction


def _children(d: ScpDag, v: int):
    ch = list(dict.fromkeys(d.nodes[v].children))
    # identical halfspaces behave as one child
    if len(ch) == 2 and d.nodes[ch[0]].ineq == d.nodes[ch[1]].ineq:
        ch = ch[:1]
    return ch


def _newly(before: Restriction, after: Restriction) -> tuple:
    return tuple((j, after.values[j]) for j in range(before.n)
                 if before.values[j] is None and after.values[j] is not None)


def _compose(rho: Restriction, sub: Restriction) -> Restriction:
    """sub lives on rho's free coordinates (in increasing order)."""
    free = rho.free()
    vals = {free[j]: v for j, v in enumerate(sub.values) if v is not None}
    return rho.extend(vals)


def _lift_back(rho: Restriction, sub: Restriction) -> dict:
    free = rho.free()
    return {free[j]: v for j, v in enumerate(sub.values) if v is not None}


def _crux_at(d: ScpDag, v: int, ch, rho: Restriction):
    H = restrict_ineq(d.nodes[v].ineq, rho)
    H1 = restrict_ineq(d.nodes[ch[0]].ineq, rho)
    H2 = restrict_ineq(d.nodes[ch[1]].ineq, rho)
    cx = crux_select(H, H1, H2)
    return ch[cx.child - 1], _compose(rho, cx.rho)


def _unlifted(rho: Restriction, n: int):
    """(fixed, value) masks of XOR4 of a block-closed restriction."""
    fixed = val = 0
    for i in range(n):
        blk = rho.values[4 * i: 4 * i + 4]
        if all(b is not None for b in blk):
            fixed |= 1 << i
            if sum(blk) % 2:
                val |= 1 << i
    return fixed, val


def check_lifted_invariants(d: ScpDag, v: int, rho: Restriction, game: Game) -> tuple:
    """(block_closed, good, consistent), each recomputed from scratch."""
    n = game.n
    closed = all(len({b is None for b in rho.values[4 * i: 4 * i + 4]}) == 1 for i in range(n))
    good = good_under(d.nodes[v].ineq, rho)
    fixed, val = _unlifted(rho, n)
    consistent = not game.ended(fixed, val)
    return closed, good, consistent


def lifted_walk(d: ScpDag, f: Cnf, game: Optional[Game] = None) -> Walk:
    """Root-downward walk in an sCP DAG refuting f∘XOR4 steered by an optimal
    Adversary for f.  Variables 4i..4i+3 form block i."""
    game = game or Game(f)
    if game.satisfiable:
        raise ValueError("f is satisfiable")
    n = f.num_vars
    if d.n != 4 * n:
        raise ValueError("DAG dimension does not match the lifted formula")
    rho = Restriction.free_all(4 * n)
    v = 0
    steps, length = [], 0
    while True:
        closed, good, consistent = check_lifted_invariants(d, v, rho, game)
        if not closed or not good:
            raise InvariantViolation(f"node {v}: block_closed={closed} good={good}")
        if not consistent:
            return Walk(steps, length, "adversary state falsifies a clause", rho)
        ch = _children(d, v)
        if not ch:
            raise NotARefutation(f"sink {v} reached with all invariants intact")
        if len(ch) == 1:
            steps.append(Step(v, ch[0], (), None))
            v = ch[0]
            length += 1
            continue
        child, rt = _crux_at(d, v, ch, rho)
        blocks = sorted({j // 4 for j, _ in _newly(rho, rt)})
        fixed, val = _unlifted(rho, n)
        new = rt
        h = d.nodes[child].ineq
        for blk in blocks:
            b = game.answer(fixed, val, blk)
            fixed |= 1 << blk
            val = val | (1 << blk) if b else val & ~(1 << blk)
            I = [j for j in range(4 * blk, 4 * blk + 4) if new.values[j] is None]
            have = sum(new.values[j] for j in range(4 * blk, 4 * blk + 4) if new.values[j] is not None) % 2
            sub = consistent_restriction(restrict_ineq(h, new), [new.free().index(j) for j in I], (b - have) % 2)
            new = _compose(new, sub)
        steps.append(Step(v, child, _newly(rho, new), None))
        rho, v = new, child
        length += 1


# --- expander walk

def low_expansion_max(sys: LinSystemFq, k: int, threshold=3, limit: Optional[int] = None) -> tuple:
    """Largest W (|W| <= k) whose boundary is at most threshold*|W|; ties go to the
    lexicographically first.  Exhaustive within the enumeration budget."""
    if limit is None:
        limit = budget("enum_budget", 5_000_000)
    masks = _supports(sys)
    ids = [j for j in range(sys.m) if masks[j]]
    best: tuple = ()
    for W in low_expansion_sets(masks, ids, min(k, len(ids)), threshold, limit):
        if len(W) > len(best):
            best = W
    return best


def boundary_cleanup(sys: LinSystemFq, W: Sequence[int], h: LinIneq, rho: Restriction) -> Restriction:
    """Extend rho to fix every variable of the equations W, satisfying them,
    keeping h good.  sys is already restricted by rho (fixed variables removed)."""
    masks = _supports(sys)
    rest = list(W)
    peeled = []
    while rest:
        bnd = boundary(masks, rest)
        pick = None
        for j in rest:
            own = [x for x in range(sys.n) if bnd >> x & 1 and masks[j] >> x & 1]
            if len(own) >= 2:
                pick = (j, own[0], own[1])
                break
        if pick is None:
            raise NonExpanding(f"no equation among {rest} owns two boundary variables")
        peeled.append(pick)
        rest.remove(pick[0])
    gamma = 0
    for j in W:
        gamma |= masks[j]
    paired = {x for _, a, b in peeled for x in (a, b)}
    I = [x for x in range(sys.n) if gamma >> x & 1 and x not in paired]
    if len(I) == 1:
        hr = restrict_ineq(h, rho)
        x = I[0]
        rho = rho.extend({x: 1 if hr.coeffs[rho.free().index(x)] >= 0 else 0})
    elif len(I) >= 2:
        hr = restrict_ineq(h, rho)
        sub = consistent_restriction(hr, [rho.free().index(x) for x in I], 0)
        rho = _compose(rho, sub)
    # an equation's pair is private only among equations peeled after it,
    # so settle the last-peeled equation first
    eqs = {j: sys.equations[j] for j in W}
    for j, a, b in reversed(peeled):
        supp, coeffs, rhs = eqs[j]
        acc = rhs
        for x, c in zip(supp, coeffs):
            if x not in (a, b):
                if rho.values[x] is None:
                    raise AssertionError("cleanup order left a variable open")
                acc -= c * rho.values[x]
        hr = restrict_ineq(h, rho)
        free = rho.free()
        sub = consistent_restriction(hr, [free.index(a), free.index(b)], acc % 2)
        rho = _compose(rho, sub)
    return rho


def check_expander_invariants(d: ScpDag, v: int, sys: LinSystemFq, f: Cnf, rho: Restriction, k: int) -> tuple:
    """(expansion > 3 up to size k, good, consistent), recomputed from scratch."""
    good = good_under(d.nodes[v].ineq, rho)
    consistent = not restrict_cnf(f, rho).falsified
    red = restrict_system(sys, rho).obj
    if k <= 0 or red.m == 0:
        expanding = True
    else:
        _, ratio = boundary_expansion(red, min(k, red.m))
        expanding = ratio > 3
    return expanding, good, consistent


def expander_walk(d: ScpDag, sys: LinSystemFq, f: Cnf, r: int, s: int) -> Walk:
    """Root-downward walk for an (r, s+3)-boundary expander over F2; f = to_cnf(sys)."""
    if sys.q != 2:
        raise ValueError("expander walk needs an F2 system")
    if d.n != sys.n:
        raise ValueError("DAG dimension does not match the system")
    _, ratio = boundary_expansion(sys, r)
    if ratio < s + 3:
        raise NonExpanding(f"expansion {ratio} < {s + 3} at size {r}")
    rho = Restriction.free_all(sys.n)
    k = r
    v = 0
    steps, length = [], 0
    while True:
        expanding, good, consistent = check_expander_invariants(d, v, sys, f, rho, k)
        if not (expanding and good and consistent):
            raise InvariantViolation(f"node {v}: expansion={expanding} good={good} consistent={consistent}")
        if k == 0:
            return Walk(steps, length, "expansion budget exhausted", rho)
        ch = _children(d, v)
        if not ch:
            raise NotARefutation(f"sink {v} reached with k = {k} > 0")
        if len(ch) == 1:
            steps.append(Step(v, ch[0], (), k))
            v = ch[0]
            length += 1
            continue
        child, rt = _crux_at(d, v, ch, rho)
        red = restrict_system(sys, rt).obj
        W = low_expansion_max(red, k)
        new = boundary_cleanup(red, W, d.nodes[child].ineq, rt) if W else rt
        steps.append(Step(v, child, _newly(rho, new), k - len(W)))
        rho, v, k = new, child, k - len(W)
        length += 1
