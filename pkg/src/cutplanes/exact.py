"""Exact rational linear algebra and linear programming.

Every result returned from here carries an exact certificate.  A floating
point solver (HiGHS through scipy) is only used to *guess* an optimal basis;
the guess is then re-derived with integer arithmetic and checked.  When the
check fails, an exact simplex (integer-preserving tableau, Bland's rule as the
anti-cycling fallback) solves the problem from scratch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "LinIneq", "Polytope", "LPResult", "OPTIMAL", "INFEASIBLE", "UNBOUNDED",
    "lp_optimum", "farkas_check", "combine", "nullspace_vector", "solve_mod_p",
    "ModSolution", "ModCertificate", "fm_bounds", "ceil_frac", "is_prime",
    "lp_stats",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def ceil_frac(v) -> int:
    v = Fraction(v)
    return -((-v.numerator) // v.denominator)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class LinIneq:
    """coeffs . x >= rhs.  The sense is always >= once constructed."""
    coeffs: tuple
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    @classmethod
    def ge(cls, coeffs, rhs) -> "LinIneq":
        return cls(tuple(coeffs), Fraction(rhs))

    @classmethod
    def le(cls, coeffs, rhs) -> "LinIneq":
        """coeffs . x <= rhs, stored as -coeffs . x >= -rhs."""
        return cls(tuple(-int(c) for c in coeffs), -Fraction(rhs))

    @classmethod
    def contradiction(cls, n: int) -> "LinIneq":
        return cls((0,) * n, Fraction(1))

    @classmethod
    def universal(cls, n: int) -> "LinIneq":
        return cls((0,) * n, Fraction(0))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def value(self, x) -> Fraction:
        return sum((Fraction(c) * v for c, v in zip(self.coeffs, x) if c), Fraction(0))

    def contains(self, x) -> bool:
        return self.value(x) >= self.rhs

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_contradiction(self) -> bool:
        return self.is_zero() and self.rhs > 0

    def is_universal(self) -> bool:
        return self.is_zero() and self.rhs <= 0

    def negation(self) -> "LinIneq":
        """Integer negation of a.x >= b (b integral): a.x <= b - 1."""
        if self.rhs.denominator != 1:
            raise ValueError("integer negation needs an integral threshold")
        return LinIneq.le(self.coeffs, self.rhs - 1)

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c:+d}*x{i + 1}")
        return (" ".join(terms) or "0") + f" >= {self.rhs}"


@dataclass(frozen=True)
class Polytope:
    ineqs: tuple
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "ineqs", tuple(self.ineqs))
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        for h in self.ineqs:
            if h.dim != self.dim:
                raise ValueError(f"inequality of dimension {h.dim} in a polytope of dimension {self.dim}")

    @classmethod
    def cube(cls, n: int) -> "Polytope":
        return cls(tuple(box_rows(n)), n)

    def add(self, *more: LinIneq) -> "Polytope":
        return Polytope(self.ineqs + tuple(more), self.dim)

    def contains(self, x) -> bool:
        return all(h.contains(x) for h in self.ineqs)

    def __len__(self):
        return len(self.ineqs)


def box_rows(n: int) -> list:
    rows = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        rows.append(LinIneq.ge(e, 0))
        rows.append(LinIneq.le(e, 1))
    return rows


def combine(ineqs: Sequence[LinIneq], multipliers: Sequence) -> tuple:
    """Weighted sum of >= rows: returns (coefficient vector, rhs) as Fractions."""
    if not ineqs:
        return (), Fraction(0)
    n = ineqs[0].dim
    acc = [Fraction(0)] * n
    rhs = Fraction(0)
    for h, lam in zip(ineqs, multipliers):
        if not lam:
            continue
        lam = Fraction(lam)
        for i, c in enumerate(h.coeffs):
            if c:
                acc[i] += lam * c
        rhs += lam * h.rhs
    return tuple(acc), rhs


def farkas_check(ineqs: Sequence[LinIneq], multipliers: Sequence, target: LinIneq) -> bool:
    """True iff sum(lam_i * ineq_i) has target's coefficients and rhs >= target.rhs."""
    if len(ineqs) != len(multipliers):
        raise ValueError("multipliers and inequalities differ in length")
    if any(Fraction(m) < 0 for m in multipliers):
        return False
    if not ineqs:
        return target.is_universal()
    coeffs, rhs = combine(ineqs, multipliers)
    return all(c == t for c, t in zip(coeffs, target.coeffs)) and rhs >= target.rhs


# ---------------------------------------------------------------------------
# exact linear algebra

def _rref(rows: list, ncols: int):
    """Row reduce a list of Fraction rows in place; returns pivot columns."""
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][col]
        if pv != 1:
            rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                ri = rows[r]
                rows[i] = [a - f * b for a, b in zip(rows[i], ri)]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return pivots


def solve_linear(M: Sequence[Sequence], rhs: Sequence) -> Optional[list]:
    """One exact solution of M y = rhs (free variables set to 0), or None."""
    if not M:
        return None
    ncols = len(M[0])
    rows = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(M, rhs)]
    piv = _rref(rows, ncols)
    for row in rows[len(piv):]:
        if row[-1] != 0:
            return None
    y = [Fraction(0)] * ncols
    for i, col in enumerate(piv):
        y[col] = rows[i][-1]
    return y


def nullspace_vector(rows: Sequence[Sequence], n: Optional[int] = None) -> Optional[tuple]:
    """A nonzero rational vector orthogonal to all rows, or None if they span R^n."""
    if n is None:
        if not rows:
            raise ValueError("dimension unknown for an empty row set")
        n = len(rows[0])
    mat = [[Fraction(v) for v in r] for r in rows if any(r)]
    for r in mat:
        if len(r) != n:
            raise ValueError("rows of unequal dimension")
    piv = _rref(mat, n) if mat else []
    free = [c for c in range(n) if c not in piv]
    if not free:
        return None
    f = free[0]
    v = [Fraction(0)] * n
    v[f] = Fraction(1)
    for i, col in enumerate(piv):
        v[col] = -mat[i][f]
    return tuple(v)


def _bareiss(M: list, extra: list):
    """Fraction-free elimination of the square integer matrix M with extra
    right-hand columns.  Returns (det, X) where M X = det * extra, or (0, None)."""
    k = len(M)
    A = [list(M[i]) + list(extra[i]) for i in range(k)]
    width = len(A[0]) if A else 0
    prev = 1
    for c in range(k):
        p = None
        for i in range(c, k):
            if A[i][c] != 0:
                p = i
                break
        if p is None:
            return 0, None
        if p != c:
            A[c], A[p] = A[p], A[c]
        pc = A[c][c]
        rc = A[c]
        for i in range(c + 1, k):
            ri = A[i]
            f = ri[c]
            if f:
                A[i] = [(pc * ri[j] - f * rc[j]) // prev if j > c else 0 for j in range(width)]
            else:
                A[i] = [(pc * ri[j]) // prev if j > c else 0 for j in range(width)]
        prev = pc
    det = A[k - 1][k - 1] if k else 1
    # back substitution keeping the common denominator det
    m = width - k
    X = [[0] * m for _ in range(k)]
    for col in range(m):
        for i in range(k - 1, -1, -1):
            s = A[i][k + col] * det
            for j in range(i + 1, k):
                if A[i][j]:
                    s -= A[i][j] * X[j][col]
            X[i][col] = s // A[i][i]
    return det, X


# ---------------------------------------------------------------------------
# linear programming

@dataclass(frozen=True)
class LPResult:
    """status is one of OPTIMAL / INFEASIBLE / UNBOUNDED.

    For OPTIMAL with direction min: sum dual_i * ineq_i has coefficients equal
    to the objective and rhs equal to value.  For max the same holds with the
    objective negated (certifying -obj.x >= -value).  For INFEASIBLE the dual
    combination is 0 >= 1 exactly.
    """
    status: str
    value: Optional[Fraction] = None
    witness: Optional[tuple] = None
    dual: Optional[tuple] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    @property
    def infeasible(self) -> bool:
        return self.status == INFEASIBLE


lp_stats = {"calls": 0, "guided": 0, "exact": 0}


def lp_optimum(p, objective, direction: str = "min", rows: Optional[Sequence[LinIneq]] = None) -> LPResult:
    """Optimize objective over p exactly.  `p` may be a Polytope or (with
    rows given) just a dimension."""
    if rows is None:
        rows = p.ineqs
        n = p.dim
    else:
        n = p if isinstance(p, int) else p.dim
    obj = [int(v) for v in objective]
    if len(obj) != n:
        raise ValueError("objective dimension does not match polytope")
    for h in rows:
        if h.dim != n:
            raise ValueError("row dimension does not match polytope")
    if direction not in ("min", "max"):
        raise ValueError("direction must be min or max")
    c = obj if direction == "min" else [-v for v in obj]
    lp_stats["calls"] += 1
    res = _solve_min(list(rows), c, n)
    if res.status == OPTIMAL and direction == "max":
        res = LPResult(OPTIMAL, -res.value, res.witness, res.dual)
    return res


def _scaled(rows):
    A, b, L = [], [], []
    for h in rows:
        d = h.rhs.denominator
        L.append(d)
        A.append([c * d for c in h.coeffs] if d != 1 else list(h.coeffs))
        b.append(h.rhs.numerator)
    return A, b, L


def _solve_min(rows, c, n) -> LPResult:
    m = len(rows)
    if m == 0:
        if any(c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, Fraction(0), (Fraction(0),) * n, ())
    A, b, L = _scaled(rows)
    res = _guided(A, b, L, c, n)
    if res is not None:
        lp_stats["guided"] += 1
        return res
    lp_stats["exact"] += 1
    return _exact(A, b, L, c, n)


def _float_rows(A, b):
    Af = np.array(A, dtype=float)
    bf = np.array(b, dtype=float)
    s = np.maximum(np.abs(Af).max(axis=1), np.abs(bf))
    s[s == 0] = 1.0
    return Af / s[:, None], bf / s, s


def _guided(A, b, L, c, n):
    try:
        from scipy.optimize import linprog
        Af, bf, s = _float_rows(A, b)
        if not np.all(np.isfinite(Af)) or not np.all(np.isfinite(bf)):
            return None
        cf = np.array(c, dtype=float)
        cs = max(1.0, float(np.abs(cf).max()))
        r = linprog(cf / cs, A_ub=-Af, b_ub=-bf, bounds=[(None, None)] * n, method="highs", options={"presolve": False})
    except (ValueError, OverflowError):
        return None
    if r.status == 0:
        y = -np.asarray(r.ineqlin.marginals)
        slack = Af @ r.x - bf
        return _verify_vertex(A, b, L, c, n, y, slack, Af * s[:, None])
    if r.status == 2:
        return _guided_infeasible(A, b, L, n, Af, bf)
    return None


def _pick_basis(k, order):
    """Greedily pick k float-independent rows (indices) from `order`."""
    chosen = []
    mat = None
    for i, row in order:
        cand = row if mat is None else np.vstack([mat, row])
        if np.linalg.matrix_rank(cand, tol=1e-9) > len(chosen):
            chosen.append(i)
            mat = cand
            if len(chosen) == k:
                return chosen
    return None


def _verify_vertex(A, b, L, c, n, y, slack, Af=None):
    m = len(A)
    if Af is None:
        Af = np.array(A, dtype=float)
    norms = np.abs(Af).max(axis=1)
    norms[norms == 0] = 1.0
    pos = [i for i in np.argsort(-y) if y[i] > 1e-9]
    seen = set(pos)
    tight = [i for i in np.argsort(slack) if slack[i] < 1e-7 and i not in seen]
    order = [(i, Af[i] / norms[i]) for i in pos + tight]
    B = _pick_basis(n, order)
    if B is None:
        return None
    M = [A[i] for i in B]
    det, X = _bareiss(M, [[b[i]] for i in B])
    if det == 0:
        return None
    MT = [[A[i][j] for i in B] for j in range(n)]
    det2, Y = _bareiss(MT, [[v] for v in c])
    if det2 == 0:
        return None
    if det < 0:
        det, X = -det, [[-v for v in row] for row in X]
    if det2 < 0:
        det2, Y = -det2, [[-v for v in row] for row in Y]
    yB = [row[0] for row in Y]
    if any(v < 0 for v in yB):
        return None
    xs = [row[0] for row in X]
    if not _feasible_int(A, b, xs, det):
        return None
    x = tuple(Fraction(v, det) for v in xs)
    dual = [Fraction(0)] * m
    for j, i in enumerate(B):
        if yB[j]:
            dual[i] = Fraction(yB[j] * L[i], det2)
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x) if ci), Fraction(0))
    return LPResult(OPTIMAL, value, x, tuple(dual))


_I64 = 2 ** 62


def _feasible_int(A, b, xs, det) -> bool:
    """A xs >= b det, exactly; int64 when the magnitudes allow it."""
    amax = max((abs(v) for row in A for v in row), default=0)
    xmax = max((abs(v) for v in xs), default=0)
    bmax = max((abs(v) for v in b), default=0)
    if amax * xmax * max(1, len(xs)) < _I64 and bmax * abs(det) < _I64:
        Ai = np.array(A, dtype=np.int64)
        return bool(np.all(Ai @ np.array(xs, dtype=np.int64) >= np.array(b, dtype=np.int64) * det))
    for Ai, bi in zip(A, b):
        if sum(a * v for a, v in zip(Ai, xs) if a) < bi * det:
            return False
    return True


def _guided_infeasible(A, b, L, n, Af, bf):
    from scipy.optimize import linprog
    m = len(A)
    cf = np.zeros(n + 1)
    cf[-1] = 1.0
    Aub = -np.hstack([Af, np.ones((m, 1))])
    r = linprog(cf, A_ub=Aub, b_ub=-bf, bounds=[(None, None)] * n + [(0, None)], method="highs", options={"presolve": False})
    if r.status != 0:
        return None
    y = -np.asarray(r.ineqlin.marginals)
    supp = [i for i in range(m) if y[i] > 1e-10]
    if not supp:
        return None
    # exact: y >= 0 on supp with sum y_i A_i = 0 and sum y_i b_i = 1
    M = [[A[i][j] for i in supp] for j in range(n)] + [[b[i] for i in supp]]
    rhs = [0] * n + [1]
    sol = solve_linear(M, rhs)
    if sol is None or any(v < 0 for v in sol):
        return None
    dual = [Fraction(0)] * m
    for k, i in enumerate(supp):
        dual[i] = sol[k] * L[i]
    return LPResult(INFEASIBLE, dual=tuple(dual))


def _exact(A, b, L, c, n) -> LPResult:
    m = len(A)
    # dual: max b.y  s.t.  A^T y = c, y >= 0
    M = [[A[i][j] for i in range(m)] for j in range(n)]
    st, val, y, pi, ray = _simplex(M, list(c), list(b))
    if st == OPTIMAL:
        x = tuple(pi)
        dual = tuple(y[i] * L[i] for i in range(m))
        return LPResult(OPTIMAL, val, x, dual)
    if st == UNBOUNDED:
        tot = sum(ray[i] * b[i] for i in range(m))
        return LPResult(INFEASIBLE, dual=tuple(ray[i] * L[i] / tot for i in range(m)))
    # dual infeasible: primal is infeasible or unbounded
    M2 = [row[:] for row in M] + [[1] * m]
    st2, val2, y2, _, ray2 = _simplex(M2, [0] * n + [1], list(b))
    if st2 == OPTIMAL and val2 > 0:
        return LPResult(INFEASIBLE, dual=tuple(y2[i] * L[i] / val2 for i in range(m)))
    if st2 == UNBOUNDED:  # cannot happen with the normalisation row, kept for safety
        tot = sum(ray2[i] * b[i] for i in range(m))
        return LPResult(INFEASIBLE, dual=tuple(ray2[i] * L[i] / tot for i in range(m)))
    return LPResult(UNBOUNDED)


def _simplex(M, r, cost, bland_after: int = 50):
    """max cost.y s.t. M y = r, y >= 0 over integers, exactly.

    Integer-preserving tableau: the true tableau is T / d.  Largest reduced
    cost pricing, switching permanently to Bland's rule after `bland_after`
    degenerate pivots.  Returns (status, value, y, pi, ray)."""
    k = len(M)
    N = len(cost)
    T = []
    for i in range(k):
        row = list(M[i]) + [0] * k + [r[i]]
        if r[i] < 0:
            row = [-v for v in row]
        row[N + i] = 1
        T.append(row)
    W = N + k + 1
    basis = [N + i for i in range(k)]
    d = 1
    # phase 1 objective: maximise -sum(artificials)
    z = [0] * W
    for i in range(k):
        for j in range(W):
            if j < N or j == W - 1:
                z[j] += T[i][j]
    degen = [0]

    def pivot(rr, jj):
        nonlocal d, z
        p = T[rr][jj]
        prow = T[rr]
        for i in range(len(T)):
            if i == rr:
                continue
            ri = T[i]
            f = ri[jj]
            if f:
                T[i] = [(p * a - f * bb) // d for a, bb in zip(ri, prow)]
            else:
                T[i] = [(p * a) // d for a in ri]
        f = z[jj]
        if f:
            z = [(p * a - f * bb) // d for a, bb in zip(z, prow)]
        else:
            z = [(p * a) // d for a in z]
        d = p
        if d < 0:
            for i in range(len(T)):
                T[i] = [-v for v in T[i]]
            z = [-v for v in z]
            d = -d
        basis[rr] = jj

    def run(allowed):
        bland = False
        while True:
            best = None
            if bland:
                for j in allowed:
                    if z[j] > 0:
                        best = j
                        break
            else:
                bv = 0
                for j in allowed:
                    if z[j] > bv:
                        bv = z[j]
                        best = j
            if best is None:
                return OPTIMAL, None
            jj = best
            rr = None
            for i in range(len(T)):
                a = T[i][jj]
                if a > 0:
                    if rr is None:
                        rr = i
                        continue
                    lhs = T[i][-1] * T[rr][jj]
                    rhs_ = T[rr][-1] * a
                    if lhs < rhs_ or (lhs == rhs_ and basis[i] < basis[rr]):
                        rr = i
            if rr is None:
                return UNBOUNDED, jj
            if T[rr][-1] == 0:
                degen[0] += 1
                if degen[0] > bland_after:
                    bland = True
            pivot(rr, jj)

    st, _ = run(list(range(N)))
    if z[-1] != 0:
        return "dual-infeasible", None, None, None, None
    # drive artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= N:
            jj = next((j for j in range(N) if T[i][j] != 0), None)
            if jj is None:
                del T[i]
                del basis[i]
                continue
            pivot(i, jj)
        i += 1
    # phase 2 objective from scratch (integer, scaled by d)
    z = [0] * W
    for j in range(N):
        z[j] = cost[j] * d
    z[-1] = 0
    for i, bj in enumerate(basis):
        cb = cost[bj]
        if cb:
            row = T[i]
            z = [zz - cb * v for zz, v in zip(z, row)]
    # z[j] = d*(cost_j - c_B B^-1 M_j); z[-1] = -d * value
    st, jj = run(list(range(N)))
    y = [Fraction(0)] * N
    for i, bj in enumerate(basis):
        y[bj] = Fraction(T[i][-1], d)
    if st == UNBOUNDED:
        ray = [Fraction(0)] * N
        ray[jj] = Fraction(1)
        for i, bj in enumerate(basis):
            ray[bj] = Fraction(-T[i][jj], d)
        return UNBOUNDED, None, None, None, ray
    value = Fraction(-z[-1], d)
    # primal multipliers: M_j . pi = cost_j for basic j (deleted rows get pi = 0)
    Bm = [[M[rowi][bj] for rowi in range(k)] for bj in basis]
    pi = solve_linear(Bm, [cost[bj] for bj in basis]) if basis else [Fraction(0)] * k
    if pi is None:
        raise ArithmeticError("basis system unexpectedly singular")
    return OPTIMAL, value, y, [Fraction(v) for v in pi], None


# ---------------------------------------------------------------------------
# linear algebra modulo a prime

@dataclass(frozen=True)
class ModSolution:
    x: tuple


@dataclass(frozen=True)
class ModCertificate:
    alpha: tuple


def solve_mod_p(A: Sequence[Sequence[int]], b: Sequence[int], p: int):
    """Either a solution of A x = b (mod p) or a row combination alpha with
    alpha^T A = 0 and alpha^T b != 0 (mod p)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        tag = [0] * m
        tag[i] = 1
        rows.append([v % p for v in A[i]] + [b[i] % p] + tag)
    piv_cols = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][col], p - 2, p)
        rows[r] = [(v * inv) % p for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(a - f * bb) % p for a, bb in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
    for i in range(r, m):
        if rows[i][n] % p:
            return ModCertificate(tuple(rows[i][n + 1:]))
    x = [0] * n
    for i, col in enumerate(piv_cols):
        x[col] = rows[i][n]
    return ModSolution(tuple(x))


# ---------------------------------------------------------------------------
# Fourier-Motzkin oracle (independent of the simplex code, small dimension only)

def fm_bounds(rows: Sequence[LinIneq], objective, n: int, max_rows: int = 20000):
    """Exact (min, max) of objective over the rows by Fourier-Motzkin elimination.

    Returns None for an empty set; an unbounded side is reported as None inside
    the pair.  Chernikov's history rule discards combinations built from more
    than k+1 original rows after k eliminations.  Meant as a cross-check for
    small dimension only."""
    cur = []
    for i, h in enumerate(rows):
        cur.append(([Fraction(c) for c in h.coeffs] + [Fraction(0)], Fraction(h.rhs), frozenset([i])))
    obj = [Fraction(v) for v in objective]
    base = len(rows)
    cur.append((obj + [Fraction(-1)], Fraction(0), frozenset([base])))
    cur.append(([-v for v in obj] + [Fraction(1)], Fraction(0), frozenset([base + 1])))
    for k in range(n):
        pos, neg, zero = [], [], []
        for row in cur:
            a = row[0]
            (pos if a[k] > 0 else neg if a[k] < 0 else zero).append(row)
        new = list(zero)
        for ap, rp, hp in pos:
            for an, rn, hn in neg:
                hist = hp | hn
                if len(hist) > k + 2:
                    continue
                fp, fn = -an[k], ap[k]
                a = [fp * u + fn * v for u, v in zip(ap, an)]
                new.append((a, fp * rp + fn * rn, hist))
        cur = _fm_dedupe(new)
        if len(cur) > max_rows:
            raise RuntimeError("Fourier-Motzkin blow-up")
    lo, hi = None, None
    for a, r, _ in cur:
        z = a[n]
        if z == 0:
            if r > 0:
                return None
            continue
        v = r / z
        if z > 0:
            lo = v if lo is None or v > lo else lo
        else:
            hi = v if hi is None or v < hi else hi
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


def _fm_dedupe(rows):
    seen = {}
    for a, r, hist in rows:
        if not any(a):
            key = ("0", r > 0)
            if key not in seen:
                seen[key] = (a, r, hist)
            continue
        s = max(abs(v) for v in a)
        key = tuple(v / s for v in a)
        r2 = r / s
        old = seen.get(key)
        if old is None or r2 > old[1] or (r2 == old[1] and len(hist) < len(old[2])):
            seen[key] = (list(key), r2, hist)
    return list(seen.values())
