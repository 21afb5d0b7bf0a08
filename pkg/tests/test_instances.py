from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from cutplanes.exact import LinIneq, solve_mod_p, ModSolution
from cutplanes.instances import (BudgetExceeded, Cnf, GraphWithLabels, LinSystemFq, Restriction,
                                 apply_restriction, boundary_expansion, cnf_to_kxor, complete_graph,
                                 cycle_graph, is_satisfiable_system, lift_system, random_kcnf,
                                 random_kxor, to_cnf, to_polytope, tseitin, xor4_image, xor4_lift)


def _points(n):
    return product((0, 1), repeat=n)


def test_tseitin_k3_all_ones():
    s = tseitin(complete_graph(3, [1, 1, 1]))
    assert s.m == 3 and s.n == 3 and all(len(e[0]) == 2 for e in s.equations)
    assert is_satisfiable_system(s) is None


def test_tseitin_k4_one_label():
    s = tseitin(complete_graph(4, [1, 0, 0, 0]))
    assert s.m == 4 and s.n == 6 and all(len(e[0]) == 3 for e in s.equations)


def test_tseitin_even_cycle_satisfiable():
    s = tseitin(cycle_graph(4, [0, 0, 0, 0]))
    assert s.satisfied_by((0,) * s.n)


def test_tseitin_rejects_disconnected():
    with pytest.raises(ValueError):
        tseitin(GraphWithLabels(4, ((0, 1), (2, 3)), (1, 0, 0, 0)))


def test_to_cnf_examples():
    s = LinSystemFq(2, 2, (((0, 1), (1, 1), 1),), 2)
    assert {frozenset(c) for c in to_cnf(s).clauses} == {frozenset({1, 2}), frozenset({-1, -2})}
    f = to_cnf(tseitin(complete_graph(4)))
    assert len(f.clauses) == 16 and all(len(c) == 3 for c in f.clauses)


def test_to_cnf_f3_value_two():
    f = to_cnf(LinSystemFq(3, 1, (((0,), (1,), 2),), 1))
    # bits b0 = var 1, b1 = var 2; satisfying assignments encode exactly x = 2
    sols = [x for x in _points(2) if f.satisfied_by(x)]
    assert sols == [(0, 1)]
    assert (-1, -2) in f.clauses   # range clause forbidding the value 3


@pytest.mark.parametrize("w", range(1, 7))
def test_to_cnf_clause_counts_and_semantics(w):
    for rhs in (0, 1):
        f = to_cnf(LinSystemFq(2, w, ((tuple(range(w)), (1,) * w, rhs),), w))
        assert len(f.clauses) == 2 ** (w - 1)
        for x in _points(w):
            assert f.satisfied_by(x) == (sum(x) % 2 == rhs)


def test_to_polytope_examples():
    P = to_polytope(Cnf(2, ((1, -2),)))
    assert P.ineqs[0] == LinIneq((1, -1), 0)
    assert len(to_polytope(Cnf(3, ())).ineqs) == 6
    Q = to_polytope(to_cnf(tseitin(complete_graph(3, [1, 1, 1]))))
    assert len(Q.ineqs) == 12
    assert not any(Q.contains(x) for x in _points(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_polytope_integral_points_are_models(seed):
    f = random_kcnf(5, 8, 3, seed)
    P = to_polytope(f)
    for x in _points(5):
        assert P.contains(x) == f.satisfied_by(x)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_unsat_systems_have_no_integral_points(seed, q):
    import random
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    eqs = []
    for _ in range(rng.randint(1, 5)):
        k = rng.randint(1, min(2, n))
        supp = tuple(sorted(rng.sample(range(n), k)))
        eqs.append((supp, tuple(rng.randint(1, q - 1) for _ in supp), rng.randrange(q)))
    s = LinSystemFq(q, 2, tuple(eqs), n)
    f = to_cnf(s)
    models = {x for x in _points(f.num_vars) if f.satisfied_by(x)}
    L = s.bits
    decoded = {tuple(sum(x[i * L + t] << t for t in range(L)) for i in range(n)) for x in models}
    truth = {y for y in product(range(q), repeat=n) if s.satisfied_by(y)}
    assert decoded == truth
    assert (is_satisfiable_system(s) is None) == (not truth)


def test_random_generators_deterministic():
    assert random_kxor(6, 12, 3, 1) == random_kxor(6, 12, 3, 1)
    assert random_kcnf(6, 12, 3, 1) == random_kcnf(6, 12, 3, 1)
    with pytest.raises(ValueError):
        random_kxor(2, 3, 3, 0)


def test_cnf_to_kxor_examples():
    s = cnf_to_kxor(Cnf(2, ((1, 2),)))
    assert s.equations == (((0, 1), (1, 1), 1),)
    with pytest.raises(ValueError):
        cnf_to_kxor(Cnf(3, ((1, 2), (1, 2, 3))), 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cnf_to_kxor_containment(seed):
    f = random_kcnf(6, 7, 3, seed)
    enc = {frozenset(c) for c in to_cnf(cnf_to_kxor(f)).clauses}
    assert all(frozenset(c) in enc for c in f.clauses)


def test_xor4_lift_sizes():
    u = xor4_lift(Cnf(1, ((1,),)))
    assert len(u.clauses) == 8 and all(len(c) == 4 for c in u.clauses)
    w = xor4_lift(Cnf(2, ((1, -2),)))
    assert len(w.clauses) == 64 and all(len(c) == 8 for c in w.clauses)


def test_xor4_lift_semantics_exhaustive():
    f = Cnf(2, ((1, -2), (2,)))
    g = xor4_lift(f)
    for x in _points(8):
        assert g.satisfied_by(x) == f.satisfied_by(xor4_image(x, 2))


def test_lift_system_matches_clause_lift():
    s = tseitin(complete_graph(3, [1, 1, 1]))
    a = {frozenset(c) for c in to_cnf(lift_system(s)).clauses}
    b = {frozenset(c) for c in xor4_lift(to_cnf(s)).clauses}
    assert a == b


def _recount(sys, r):
    best = None
    for k in range(1, r + 1):
        for W in combinations(range(sys.m), k):
            cnt = {}
            for i in W:
                for v in sys.equations[i][0]:
                    cnt[v] = cnt.get(v, 0) + 1
            ratio = Fraction(sum(1 for c in cnt.values() if c == 1), k)
            if best is None or (ratio, W) < (best[1], best[0]):
                best = (W, ratio)
    return best


def test_boundary_expansion_examples():
    k4 = tseitin(complete_graph(4))
    W, ratio = boundary_expansion(k4, 1)
    assert ratio == 3 and len(W) == 1
    W, ratio = boundary_expansion(tseitin(complete_graph(6)), 2)
    assert ratio == 4 and len(W) == 2
    disjoint = LinSystemFq(2, 3, (((0, 1), (1, 1), 0), ((2, 3, 4), (1, 1, 1), 1)), 5)
    assert boundary_expansion(disjoint, 2)[1] == 2


def test_boundary_expansion_budget(monkeypatch):
    with pytest.raises(BudgetExceeded):
        boundary_expansion(tseitin(complete_graph(6)), 3, limit=10)
    monkeypatch.setenv("CUTPLANES_ENUM_BUDGET", "5")
    with pytest.raises(BudgetExceeded):
        boundary_expansion(tseitin(complete_graph(6)), 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_boundary_expansion_matches_recount(seed, r):
    s = random_kxor(8, 8, 3, seed)
    assert boundary_expansion(s, r) == _recount(s, r)


def test_restriction_examples():
    rho = Restriction((1, None))
    assert apply_restriction(LinIneq.ge((1, 1), 1), rho) == LinIneq((1,), 0)
    eq = LinSystemFq(2, 2, (((0, 1), (1, 1), 1),), 2)
    r = apply_restriction(eq, Restriction((0, None)))
    assert r.obj.equations == (((1,), (1,), 1),) and r.falsified == ()
    c = apply_restriction(Cnf(2, ((1, 2),)), Restriction((0, 0)))
    assert c.falsified == (0,)


def test_restriction_extend_conflict():
    with pytest.raises(ValueError):
        Restriction((1, None)).extend({0: 0})
    assert str(Restriction((1, None)).extend({1: 0})) == "10"


def test_tseitin_parity_vs_mod_p():
    """Unsatisfiable iff the label sum is odd, on small complete graphs and cycles."""
    for k in range(3, 7):
        for labels in product((0, 1), repeat=k):
            for g in (cycle_graph(k, labels),) + ((complete_graph(k, labels),) if k <= 5 else ()):
                s = tseitin(g)
                A, b = s.matrix()
                sat = isinstance(solve_mod_p(A, b, 2), ModSolution)
                assert sat == (sum(labels) % 2 == 0)
