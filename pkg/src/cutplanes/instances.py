"""Instance families: Tseitin systems, F_q linear systems, random k-XOR / k-CNF,
the XOR4 lift, and boundary expansion.

Variables of a LinSystemFq are 0-based.  Cnf literals follow DIMACS (signed,
1-based).  For q = 2 system variable i is CNF variable i + 1; for larger q it is
encoded by L = ceil(log2 q) bits, bit t (weight 2**t) being CNF variable
i*L + t + 1.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .exact import LinIneq, Polytope, box_rows, is_prime


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed its configured budget."""


def budget(name: str, default: int) -> int:
    """Budget lookup; CUTPLANES_<NAME> in the environment overrides the default."""
    raw = os.environ.get("CUTPLANES_" + name.upper())
    if raw is None:
        return default
    return int(raw)


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: tuple

    def __post_init__(self):
        cl = tuple(tuple(c) for c in self.clauses)
        object.__setattr__(self, "clauses", cl)
        for c in cl:
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range")
                if -lit in c:
                    raise ValueError(f"clause {c} contains a variable and its negation")

    def satisfied_by(self, x) -> bool:
        """x: sequence of 0/1 indexed from 0."""
        return all(any((x[abs(l) - 1] == 1) == (l > 0) for l in c) for c in self.clauses)

    def falsified_clause(self, x) -> Optional[int]:
        for j, c in enumerate(self.clauses):
            if not any((x[abs(l) - 1] == 1) == (l > 0) for l in c):
                return j
        return None


@dataclass(frozen=True)
class LinSystemFq:
    """Equations (support, coeffs, rhs) over F_q on n variables."""
    q: int
    d: int
    equations: tuple
    n: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"modulus {self.q} is not prime")
        eqs = []
        for supp, coeffs, rhs in self.equations:
            supp = tuple(int(v) for v in supp)
            coeffs = tuple(int(c) % self.q for c in coeffs)
            if len(supp) != len(coeffs):
                raise ValueError("support and coefficients differ in length")
            if len(set(supp)) != len(supp):
                raise ValueError("repeated variable in an equation")
            if len(supp) > self.d:
                raise ValueError(f"equation of width {len(supp)} exceeds bound {self.d}")
            if any(c == 0 for c in coeffs):
                raise ValueError("zero coefficient on the support")
            if any(v < 0 or v >= self.n for v in supp):
                raise ValueError("variable index out of range")
            eqs.append((supp, coeffs, int(rhs) % self.q))
        object.__setattr__(self, "equations", tuple(eqs))

    @property
    def m(self) -> int:
        return len(self.equations)

    @property
    def bits(self) -> int:
        return bits_per_var(self.q)

    def matrix(self):
        A = [[0] * self.n for _ in self.equations]
        for i, (supp, coeffs, _) in enumerate(self.equations):
            for v, c in zip(supp, coeffs):
                A[i][v] = c
        return A, [e[2] for e in self.equations]

    def satisfied_by(self, x) -> bool:
        return all(sum(c * x[v] for v, c in zip(s, cs)) % self.q == b for s, cs, b in self.equations)


@dataclass(frozen=True)
class GraphWithLabels:
    """Undirected simple graph on vertices 0..num_vertices-1."""
    num_vertices: int
    edges: tuple
    labels: tuple

    def __post_init__(self):
        norm = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError("self loop")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            if e[1] >= self.num_vertices or e[0] < 0:
                raise ValueError("edge endpoint out of range")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        if len(self.labels) != self.num_vertices:
            raise ValueError("one label per vertex required")
        object.__setattr__(self, "labels", tuple(int(b) & 1 for b in self.labels))

    def connected(self) -> bool:
        if self.num_vertices == 0:
            return True
        adj = [[] for _ in range(self.num_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_vertices


@dataclass(frozen=True)
class Restriction:
    """Partial assignment: entries 0, 1 or None (free)."""
    values: tuple

    @classmethod
    def free_all(cls, n: int) -> "Restriction":
        return cls((None,) * n)

    @property
    def n(self) -> int:
        return len(self.values)

    def fixed(self) -> list:
        return [i for i, v in enumerate(self.values) if v is not None]

    def free(self) -> list:
        return [i for i, v in enumerate(self.values) if v is None]

    def extend(self, assignment: dict) -> "Restriction":
        vals = list(self.values)
        for i, b in assignment.items():
            if vals[i] is not None and vals[i] != b:
                raise ValueError(f"variable {i} already fixed to {vals[i]}")
            vals[i] = int(b)
        return Restriction(tuple(vals))

    def __str__(self):
        return "".join("*" if v is None else str(v) for v in self.values)


# ---------------------------------------------------------------------------
# constructions

def complete_graph(k: int, labels=None) -> GraphWithLabels:
    edges = [(u, v) for u in range(k) for v in range(u + 1, k)]
    return GraphWithLabels(k, tuple(edges), tuple(labels) if labels is not None else odd_labels(k))


def cycle_graph(k: int, labels=None) -> GraphWithLabels:
    edges = [(i, (i + 1) % k) for i in range(k)]
    return GraphWithLabels(k, tuple(edges), tuple(labels) if labels is not None else odd_labels(k))


def odd_labels(k: int) -> tuple:
    """Vertex 0 labelled 1, everything else 0."""
    return (1,) + (0,) * (k - 1)


def random_regular_graph(k: int, deg: int, seed: int, labels=None) -> GraphWithLabels:
    """Configuration-model sampling with rejection until a simple connected graph appears."""
    if (k * deg) % 2 or deg >= k:
        raise ValueError("no simple regular graph with these parameters")
    rng = np.random.default_rng(seed)
    for _ in range(10000):
        stubs = np.repeat(np.arange(k), deg)
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        es = set()
        ok = True
        for u, v in pairs:
            u, v = int(u), int(v)
            e = (min(u, v), max(u, v))
            if u == v or e in es:
                ok = False
                break
            es.add(e)
        if not ok:
            continue
        g = GraphWithLabels(k, tuple(sorted(es)), tuple(labels) if labels is not None else odd_labels(k))
        if g.connected():
            return g
    raise RuntimeError("failed to sample a simple connected regular graph")


def tseitin(g: GraphWithLabels) -> LinSystemFq:
    """One parity equation per vertex over its incident edges (edge i = variable i)."""
    if not g.connected():
        raise ValueError("Tseitin system needs a connected graph")
    inc = [[] for _ in range(g.num_vertices)]
    for i, (u, v) in enumerate(g.edges):
        inc[u].append(i)
        inc[v].append(i)
    eqs = tuple((tuple(e), (1,) * len(e), g.labels[v]) for v, e in enumerate(inc))
    d = max((len(e) for e in inc), default=1) or 1
    return LinSystemFq(2, d, eqs, len(g.edges))


def bits_per_var(q: int) -> int:
    return max(1, (q - 1).bit_length())


def cnf_var(i: int, t: int, q: int) -> int:
    """DIMACS index of bit t of system variable i."""
    return i * bits_per_var(q) + t + 1


def _forbid(var_bits: Sequence[tuple]) -> tuple:
    """Clause falsified exactly by the given (dimacs var, bit) pattern."""
    return tuple(v if b == 0 else -v for v, b in var_bits)


def equation_clauses(q: int, supp, coeffs, rhs) -> list:
    L = bits_per_var(q)
    out = []
    for vals in product(range(q), repeat=len(supp)):
        if sum(c * u for c, u in zip(coeffs, vals)) % q == rhs % q:
            continue
        pattern = []
        for v, u in zip(supp, vals):
            for t in range(L):
                pattern.append((cnf_var(v, t, q), (u >> t) & 1))
        out.append(_forbid(pattern))
    return out


def range_clauses(q: int, i: int) -> list:
    L = bits_per_var(q)
    out = []
    for u in range(q, 1 << L):
        out.append(_forbid([(cnf_var(i, t, q), (u >> t) & 1) for t in range(L)]))
    return out


def to_cnf(sys: LinSystemFq) -> Cnf:
    """Range clauses (q > 2) for every variable first, then equation clauses."""
    clauses = []
    if sys.q > 2:
        for i in range(sys.n):
            clauses.extend(range_clauses(sys.q, i))
    for supp, coeffs, rhs in sys.equations:
        clauses.extend(equation_clauses(sys.q, supp, coeffs, rhs))
    return Cnf(sys.n * bits_per_var(sys.q), tuple(clauses))


def clause_row(clause, n: int) -> LinIneq:
    coeffs = [0] * n
    neg = 0
    for lit in clause:
        if lit > 0:
            coeffs[lit - 1] = 1
        else:
            coeffs[-lit - 1] = -1
            neg += 1
    return LinIneq.ge(coeffs, 1 - neg)


def to_polytope(f: Cnf) -> Polytope:
    """Clause rows in clause order, then x_i >= 0, -x_i >= -1 per variable."""
    rows = [clause_row(c, f.num_vars) for c in f.clauses]
    rows.extend(box_rows(f.num_vars))
    return Polytope(tuple(rows), f.num_vars)


def system_polytope(sys: LinSystemFq) -> Polytope:
    return to_polytope(to_cnf(sys))


def random_kxor(n: int, m: int, k: int, seed: int) -> LinSystemFq:
    """m equations drawn independently (with replacement): k distinct variables, uniform parity.
    Randomness from numpy's PCG64 via default_rng(seed)."""
    if k > n:
        raise ValueError("k must not exceed n")
    rng = np.random.default_rng(seed)
    eqs = []
    for _ in range(m):
        supp = tuple(sorted(int(v) for v in rng.choice(n, size=k, replace=False)))
        eqs.append((supp, (1,) * k, int(rng.integers(2))))
    return LinSystemFq(2, k, tuple(eqs), n)


def random_kcnf(n: int, m: int, k: int, seed: int) -> Cnf:
    if k > n:
        raise ValueError("k must not exceed n")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(m):
        vs = sorted(int(v) + 1 for v in rng.choice(n, size=k, replace=False))
        signs = rng.integers(2, size=k)
        clauses.append(tuple(v if s else -v for v, s in zip(vs, signs)))
    return Cnf(n, tuple(clauses))


def cnf_to_kxor(f: Cnf, k: Optional[int] = None) -> LinSystemFq:
    """Each clause becomes the parity equation whose clausal encoding contains it."""
    if k is None:
        k = len(f.clauses[0]) if f.clauses else 1
    eqs = []
    for c in f.clauses:
        if len(c) != k:
            raise ValueError(f"clause {c} has width {len(c)}, expected {k}")
        negs = sum(1 for l in c if l < 0)
        supp = sorted(abs(l) - 1 for l in c)
        eqs.append((tuple(supp), (1,) * k, 1 ^ (negs & 1)))
    return LinSystemFq(2, k, tuple(eqs), f.num_vars)


def xor4_lift(f: Cnf) -> Cnf:
    """z_i := x_{i,1} xor ... xor x_{i,4}; block i uses DIMACS variables 4(i-1)+1..4i."""
    wrong = {}
    for want in (0, 1):
        wrong[want] = [bits for bits in product((0, 1), repeat=4) if (sum(bits) & 1) != want]
    clauses = []
    for c in f.clauses:
        # the lifted clause is falsified when every block has the parity falsifying its literal
        per_lit = []
        for lit in c:
            z = abs(lit)
            bad_parity = 0 if lit > 0 else 1
            base = 4 * (z - 1)
            per_lit.append([[(base + j + 1, bits[j]) for j in range(4)] for bits in wrong[1 - bad_parity]])
        for combo in product(*per_lit):
            clauses.append(_forbid([vb for block in combo for vb in block]))
    return Cnf(4 * f.num_vars, tuple(clauses))


def lift_system(sys: LinSystemFq) -> LinSystemFq:
    """Substitute the XOR of a 4-variable block for every variable of an F_2 system.
    to_cnf of the result has the same clauses as xor4_lift(to_cnf(sys))."""
    if sys.q != 2:
        raise ValueError("XOR4 lift is defined over F_2")
    eqs = []
    for supp, _, rhs in sys.equations:
        s = tuple(4 * v + j for v in supp for j in range(4))
        eqs.append((s, (1,) * len(s), rhs))
    return LinSystemFq(2, 4 * sys.d, tuple(eqs), 4 * sys.n)


def xor4_image(x, n: int) -> tuple:
    return tuple(sum(x[4 * i:4 * i + 4]) & 1 for i in range(n))


# ---------------------------------------------------------------------------
# boundary expansion

def _supports(sys: LinSystemFq) -> list:
    masks = []
    for supp, _, _ in sys.equations:
        m = 0
        for v in supp:
            m |= 1 << v
        masks.append(m)
    return masks


def boundary(masks: Sequence[int], W: Sequence[int]) -> int:
    """Mask of variables touching exactly one equation of W."""
    once = multi = 0
    for i in W:
        e = masks[i]
        multi |= once & e
        once = (once | e) & ~multi
    return once


def boundary_expansion(sys: LinSystemFq, r: int, limit: Optional[int] = None):
    """(worst subset, ratio) minimizing |boundary(W)| / |W| over 1 <= |W| <= r.
    Ties go to the lexicographically smallest subset."""
    m = sys.m
    if r < 1 or r > m:
        raise ValueError("need 1 <= r <= m")
    if limit is None:
        limit = budget("enum_budget", 5_000_000)
    total = sum(comb(m, j) for j in range(1, r + 1))
    if total > limit:
        raise BudgetExceeded(f"{total} subsets exceed the enumeration budget {limit}")
    masks = _supports(sys)
    best = [None, None]
    chosen = []

    def dfs(start, once, multi):
        for i in range(start, m):
            e = masks[i]
            nm = multi | (once & e)
            no = (once | e) & ~nm
            chosen.append(i)
            ratio = Fraction(bin(no).count("1"), len(chosen))
            if best[1] is None or ratio < best[1]:
                best[0], best[1] = tuple(chosen), ratio
            if len(chosen) < r:
                dfs(i + 1, no, nm)
            chosen.pop()

    dfs(0, 0, 0)
    return best[0], best[1]


def low_expansion_sets(masks: Sequence[int], eq_ids: Sequence[int], k: int, threshold, limit: int):
    """All subsets W of eq_ids with 1 <= |W| <= k and |boundary(W)| <= threshold * |W|,
    in lexicographic order (generator).  Raises BudgetExceeded past `limit` subsets."""
    count = [0]
    chosen = []
    ids = list(eq_ids)

    def dfs(start, once, multi):
        for pos in range(start, len(ids)):
            i = ids[pos]
            e = masks[i]
            nm = multi | (once & e)
            no = (once | e) & ~nm
            chosen.append(i)
            count[0] += 1
            if count[0] > limit:
                raise BudgetExceeded("low-expansion search exceeded its budget")
            if bin(no).count("1") <= threshold * len(chosen):
                yield tuple(chosen)
            if len(chosen) < k:
                yield from dfs(pos + 1, no, nm)
            chosen.pop()

    yield from dfs(0, 0, 0)


# ---------------------------------------------------------------------------
# restrictions

class Restricted(NamedTuple):
    obj: object
    falsified: tuple
    origin: tuple   # origin[j] = index in the input of the j-th surviving constraint


def restrict_ineq(h: LinIneq, rho: Restriction, keep_dim: bool = False) -> LinIneq:
    """H restricted by rho: fixed coordinates substituted.  The result lives on the
    free coordinates (in increasing order) unless keep_dim, which zeroes them instead."""
    rhs = h.rhs
    coeffs = []
    for c, v in zip(h.coeffs, rho.values):
        if v is None:
            coeffs.append(c)
        else:
            rhs -= c * v
            if keep_dim:
                coeffs.append(0)
    # with nothing free this is a bare truth value 0 >= rhs over R^0
    return LinIneq(tuple(coeffs), rhs)


def restrict_system(sys: LinSystemFq, rho: Restriction) -> Restricted:
    q = sys.q
    eqs, bad, origin = [], [], []
    for j, (supp, coeffs, rhs) in enumerate(sys.equations):
        s2, c2 = [], []
        r = rhs
        for v, c in zip(supp, coeffs):
            if rho.values[v] is None:
                s2.append(v)
                c2.append(c)
            else:
                r = (r - c * rho.values[v]) % q
        if not s2:
            if r % q:
                bad.append(j)
            continue
        eqs.append((tuple(s2), tuple(c2), r))
        origin.append(j)
    return Restricted(LinSystemFq(q, sys.d, tuple(eqs), sys.n), tuple(bad), tuple(origin))


def restrict_cnf(f: Cnf, rho: Restriction) -> Restricted:
    out, bad, origin = [], [], []
    for j, c in enumerate(f.clauses):
        rest = []
        sat = False
        for lit in c:
            val = rho.values[abs(lit) - 1]
            if val is None:
                rest.append(lit)
            elif (val == 1) == (lit > 0):
                sat = True
                break
        if sat:
            continue
        if not rest:
            bad.append(j)
            continue
        out.append(tuple(rest))
        origin.append(j)
    return Restricted(Cnf(f.num_vars, tuple(out)), tuple(bad), tuple(origin))


def apply_restriction(obj, rho: Restriction, keep_dim: bool = False):
    """Dispatch on LinIneq / LinSystemFq / Cnf."""
    if isinstance(obj, LinIneq):
        return restrict_ineq(obj, rho, keep_dim)
    if isinstance(obj, LinSystemFq):
        return restrict_system(obj, rho)
    if isinstance(obj, Cnf):
        return restrict_cnf(obj, rho)
    raise TypeError(f"cannot restrict {type(obj).__name__}")


def is_satisfiable_system(sys: LinSystemFq):
    """Witness assignment or None, via elimination mod q."""
    from .exact import ModSolution, solve_mod_p
    A, b = sys.matrix()
    if not A:
        return (0,) * sys.n
    res = solve_mod_p(A, b, sys.q)
    return res.x if isinstance(res, ModSolution) else None
