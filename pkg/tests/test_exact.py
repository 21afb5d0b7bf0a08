import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cutplanes import exact as E
from cutplanes.exact import (INFEASIBLE, OPTIMAL, UNBOUNDED, LinIneq, LPResult, ModCertificate,
                             ModSolution, Polytope, box_rows, ceil_frac, combine, farkas_check,
                             fm_bounds, lp_optimum, nullspace_vector, solve_mod_p)
from cutplanes.instances import complete_graph, tseitin


def test_linineq_le_and_negation():
    h = LinIneq.le((1, 2), 3)
    assert h.coeffs == (-1, -2) and h.rhs == -3
    assert h.negation() == LinIneq((1, 2), Fraction(4))   # integer complement
    assert LinIneq.contradiction(2).is_contradiction()
    assert LinIneq.universal(2).is_universal()


def test_ceil_frac():
    assert ceil_frac(Fraction(1, 2)) == 1
    assert ceil_frac(Fraction(-1, 2)) == 0
    assert ceil_frac(3) == 3


def test_lp_box_max():
    r = lp_optimum(Polytope(box_rows(1), 1), (1,), "max")
    assert r.status == OPTIMAL and r.value == 1 and r.witness == (1,)


def test_lp_unbounded():
    r = lp_optimum(Polytope([LinIneq.ge((1,), 0)], 1), (1,), "max")
    assert r.status == UNBOUNDED


def test_lp_clause_polytope_max():
    P = Polytope([LinIneq.ge((1, 1), 1)] + box_rows(2), 2)
    r = lp_optimum(P, (1, 1), "max")
    assert r.status == OPTIMAL and r.value == 2
    # dual certificate proves -x1-x2 >= -2
    assert farkas_check(P.ineqs, r.dual, LinIneq.ge((-1, -1), -2))


def test_farkas_examples():
    rows = [LinIneq.ge((1, 1), 1), LinIneq.ge((-1, 0), 0), LinIneq.ge((0, -1), 0)]
    assert farkas_check(rows, (1, 1, 1), LinIneq.contradiction(2))
    assert not farkas_check([LinIneq.ge((1,), 0)], (1,), LinIneq.contradiction(1))


def test_infeasible_lp_certificate_is_exact_contradiction():
    rows = [LinIneq.ge((2,), 1), LinIneq.le((2,), 1), LinIneq.ge((1,), 1)]
    r = lp_optimum(1, (0,), "min", rows=rows)
    assert r.status == INFEASIBLE
    c, rhs = combine(rows, r.dual)
    assert not any(c) and rhs == 1


def test_nullspace_examples():
    v = nullspace_vector([(1, 0, 0), (0, 1, 0)], 3)
    assert v[0] == 0 and v[1] == 0 and v[2] != 0
    assert nullspace_vector([(1, 0), (0, 1)], 2) is None


@given(st.lists(st.lists(st.integers(-4, 4), min_size=6, max_size=6), min_size=3, max_size=3))
def test_nullspace_orthogonal(rows):
    v = nullspace_vector(rows, 6)
    assert v is not None and any(v)
    for r in rows:
        assert sum(a * b for a, b in zip(r, v)) == 0


def test_mod_p_examples():
    cert = solve_mod_p([[1, 1], [1, 1]], [1, 0], 2)
    assert isinstance(cert, ModCertificate) and cert.alpha == (1, 1)
    sol = solve_mod_p([[1]], [1], 2)
    assert isinstance(sol, ModSolution) and sol.x == (1,)
    s = tseitin(complete_graph(4))
    A, b = s.matrix()
    c = solve_mod_p(A, b, 2)
    assert isinstance(c, ModCertificate) and c.alpha == (1, 1, 1, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5]))
def test_mod_p_either_solves_or_refutes(seed, p):
    rng = random.Random(seed)
    m, n = rng.randint(1, 5), rng.randint(1, 4)
    A = [[rng.randrange(p) for _ in range(n)] for _ in range(m)]
    b = [rng.randrange(p) for _ in range(m)]
    out = solve_mod_p(A, b, p)
    if isinstance(out, ModSolution):
        assert all(sum(a * x for a, x in zip(row, out.x)) % p == bi for row, bi in zip(A, b))
    else:
        al = out.alpha
        assert all(sum(al[i] * A[i][j] for i in range(m)) % p == 0 for j in range(n))
        assert sum(al[i] * b[i] for i in range(m)) % p != 0


def _check(rows, obj, n, direction, r, bounds):
    P = Polytope(rows, n)
    if bounds is None:
        return r.status == INFEASIBLE and farkas_check(rows, r.dual, LinIneq.contradiction(n))
    want = bounds[0] if direction == "min" else bounds[1]
    if want is None:
        return r.status == UNBOUNDED
    tgt = LinIneq.ge(obj, want) if direction == "min" else LinIneq.ge([-v for v in obj], -want)
    return (r.status == OPTIMAL and r.value == want and P.contains(r.witness)
            and farkas_check(rows, r.dual, tgt))


def test_lp_matches_fourier_motzkin_oracle():
    """Both the guided path and the exact simplex agree with Fourier-Motzkin."""
    rng = random.Random(1)
    for _ in range(150):
        n, m = rng.randint(1, 4), rng.randint(1, 8)
        rows = [LinIneq.ge([rng.randint(-3, 3) for _ in range(n)],
                           Fraction(rng.randint(-6, 6), rng.randint(1, 3))) for _ in range(m)]
        if rng.random() < 0.7:
            rows += box_rows(n)
        obj = [rng.randint(-3, 3) for _ in range(n)]
        bounds = fm_bounds(rows, obj, n)
        for direction in ("min", "max"):
            assert _check(rows, obj, n, direction, lp_optimum(n, obj, direction, rows=rows), bounds)
            A, b, L = E._scaled(rows)
            c = obj if direction == "min" else [-v for v in obj]
            r = E._exact(A, b, L, c, n)
            if r.status == OPTIMAL and direction == "max":
                r = LPResult(OPTIMAL, -r.value, r.witness, r.dual)
            assert _check(rows, obj, n, direction, r, bounds)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3), st.lists(st.tuples(st.lists(st.integers(-3, 3), min_size=3, max_size=3),
                                            st.integers(-4, 4)), min_size=1, max_size=6),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_lp_property_against_oracle(n, raw, obj):
    rows = [LinIneq.ge(c[:n], r) for c, r in raw] + box_rows(n)
    bounds = fm_bounds(rows, obj[:n], n)
    for direction in ("min", "max"):
        assert _check(rows, obj[:n], n, direction, lp_optimum(n, obj[:n], direction, rows=rows), bounds)
