import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from cutplanes.cp import CpProof, ResStep, resolution_to_cp, stats, verify_cp
from cutplanes.exact import LinIneq, Polytope, box_rows, lp_optimum
from cutplanes.instances import Cnf, LinSystemFq, complete_graph, tseitin
from cutplanes.refuter import SatisfiableSystem, refute_sp
from cutplanes.sp import (FACELIKE, GENERAL, PATHLIKE, Leaf, Query, SpProof, Valid, classify_all,
                          is_path, preorder, verify_sp)
from cutplanes.translate import (NonFacelike, NonPathlike, _certify, bound_holds, compile_system,
                                 count_leaves, cp_to_pathlike, facelike_to_pathlike,
                                 pathlike_to_cp, random_integer_free_polytope, random_lift_case,
                                 random_sp_proof, schrijver_lift, sp_star_to_facelike)

K3 = tseitin(complete_graph(3, [1, 1, 1]))


def queries(p):
    return [(q.a, q.b) for _, q, _ in preorder(p.root) if isinstance(q, Query)]


# -- schrijver_lift ---------------------------------------------------------

def test_lift_unit_square_example():
    sq = box_rows(2)
    P = Polytope([LinIneq.ge((2, 1), 1)] + sq, 2)
    # face x2 = 0; on it 2 x1 >= 1, hence x1 >= 1
    dual = [Fraction(1, 2)] + [0] * 4 + [0, Fraction(1, 2)]
    lifted = schrijver_lift(P, ((0, 1), 0), LinIneq.ge((1, 0), 1), dual)
    assert lifted == LinIneq((1, 1), 1)
    # P' ∩ F ⊆ F' by LP
    r = lp_optimum(2, (1, 0), "min", rows=list(P.ineqs) + [lifted, LinIneq.ge((0, 1), 0), LinIneq.le((0, 1), 0)])
    assert r.value >= 1


def test_lift_with_face_equal_to_p():
    P = Polytope([LinIneq.ge((0, -1), 0), LinIneq.ge((2, 0), 1)] + box_rows(2), 2)
    dual = [0, Fraction(1, 2)] + [0] * 4 + [0, 0]
    cut = LinIneq.ge((1, 0), 1)
    assert schrijver_lift(P, ((0, 1), 0), cut, dual) == cut


def test_lift_rejects_inconsistent_dual():
    P = Polytope([LinIneq.ge((2, 1), 1)] + box_rows(2), 2)
    with pytest.raises(ValueError):
        schrijver_lift(P, ((0, 1), 0), LinIneq.ge((1, 0), 1), [1] + [0] * 6)
    with pytest.raises(ValueError):
        schrijver_lift(P, ((0, 1), 0), LinIneq.ge((1, 0), 1), [-1] + [0] * 6)


@settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_lift_fuzz(seed, n):
    case = random_lift_case(np.random.default_rng(seed), n)
    if case is None:
        return
    p, face, cut, dual = case
    lifted = schrijver_lift(p, face, cut, dual)   # runs the LP post-checks
    assert all(isinstance(c, int) for c in lifted.coeffs) and lifted.rhs.denominator == 1


# -- facelike -> pathlike ---------------------------------------------------

def test_pathlike_input_keeps_queries():
    once = facelike_to_pathlike(refute_sp(tseitin(complete_graph(4))))
    twice = facelike_to_pathlike(once)
    assert queries(twice) == queries(once) and isinstance(verify_sp(twice), Valid)
    P = Polytope([LinIneq.ge((2,), 1), LinIneq.le((2,), 1)], 1)
    single = SpProof(P, _certify(P, Query((1,), 1, "leaf", "leaf")))
    assert queries(facelike_to_pathlike(single)) == [((1,), 1)]


def test_lp_empty_axioms_need_no_queries():
    f = Cnf(2, ((1, 2), (-2,), (-1,)))
    steps = [ResStep((1, 2), None, 0), ResStep((-2,), None, 1), ResStep((1,), (0, 1)),
             ResStep((-1,), None, 2), ResStep((), (2, 3))]
    out = facelike_to_pathlike(cp_to_pathlike(resolution_to_cp(f, steps)))
    assert queries(out) == [] and isinstance(verify_sp(out), Valid)


def test_k3_refutation_to_pathlike():
    out = facelike_to_pathlike(refute_sp(K3))
    assert isinstance(verify_sp(out), Valid) and is_path(out.root)
    assert all(c.kind == PATHLIKE for c in classify_all(out))


def _toy():
    rows = box_rows(2) + [LinIneq.ge((2, 2), 1), LinIneq.le((2, 2), 3),
                          LinIneq.le((2, -2), 1), LinIneq.le((-2, 2), 1)]
    P = Polytope(rows, 2)
    inner = lambda: Query((0, 1), 1, "leaf", "leaf")
    return SpProof(P, _certify(P, Query((1, 0), 1, inner(), inner())))


def test_depth_two_facelike_toy():
    toy = _toy()
    assert isinstance(verify_sp(toy), Valid)
    assert classify_all(toy)[0] == (FACELIKE, "left")
    out = facelike_to_pathlike(toy)
    assert is_path(out.root) and len(queries(out)) == 3
    assert isinstance(verify_sp(out), Valid)


def test_general_query_rejected():
    P = Polytope(box_rows(1) + [LinIneq.ge((4,), 1), LinIneq.le((4,), 3)], 1)
    wide = Polytope([LinIneq.ge((1,), 0), LinIneq.le((1,), 4), LinIneq.ge((2,), 3), LinIneq.le((2,), 3)], 1)
    p = SpProof(wide, _certify(wide, Query((1,), 1, "leaf", Query((1,), 2, "leaf", "leaf"))))
    assert isinstance(verify_sp(p), Valid)
    general = SpProof(wide, _certify(wide, Query((1,), 2, "leaf", "leaf")))
    if classify_all(general)[0].kind == GENERAL:
        with pytest.raises(NonFacelike):
            facelike_to_pathlike(general)


# -- pathlike <-> CP ----------------------------------------------------------

def test_single_cut_pathlike_to_cp():
    P = Polytope([LinIneq.ge((2,), 1), LinIneq.le((1,), 0)], 1)
    left = Leaf(((("src", 0), 1), (("edge", 0), 2)))
    right = Leaf(((("src", 1), 1), (("edge", 0), 1)))
    cp = pathlike_to_cp(SpProof(P, Query((1,), 1, left, right)))
    assert verify_cp(cp) and len(cp.lines) == 4   # axiom, cut, axiom, closing sum
    assert cp.last().is_zero() and cp.last().rhs == 1


def test_round_trip_five_lines():
    f = Cnf(2, ((1, 2), (-2,), (-1,)))
    steps = [ResStep((1, 2), None, 0), ResStep((-2,), None, 1), ResStep((1,), (0, 1)),
             ResStep((-1,), None, 2), ResStep((), (2, 3))]
    cp = resolution_to_cp(f, steps)
    path = cp_to_pathlike(cp)
    assert isinstance(verify_sp(path), Valid)
    back = pathlike_to_cp(path)
    assert verify_cp(back)
    q = len(queries(path))
    assert len(back.lines) <= (cp.n + len(cp.axioms.ineqs) + 2) * q + len(cp.axioms.ineqs) + 2


def test_pathlike_to_cp_rejects_branching():
    with pytest.raises(NonPathlike):
        pathlike_to_cp(_toy())


# -- SP* -> facelike ----------------------------------------------------------

def test_already_facelike_input_keeps_queries():
    p = facelike_to_pathlike(refute_sp(K3))
    out = sp_star_to_facelike(p)
    assert queries(out) == queries(p) and isinstance(verify_sp(out), Valid)


def test_unit_square_general_query_chain_length():
    P = _toy().axioms
    sub = lambda: Query((1, 0), 1, Query((0, 1), 1, "leaf", "leaf"), Query((0, 1), 1, "leaf", "leaf"))
    p = SpProof(P, _certify(P, Query((3, 2), 3, sub(), sub())))
    assert isinstance(verify_sp(p), Valid)
    assert classify_all(p)[0].kind == GENERAL
    c = 3
    out = sp_star_to_facelike(p, c=c)
    assert isinstance(verify_sp(out), Valid)
    assert all(k.kind != GENERAL for k in classify_all(out))
    t = sum(1 for a, _ in queries(out) if a == (3, 2))
    assert 1 <= t <= c * math.sqrt(2) * math.sqrt(2)


def test_coefficient_bound_enforced():
    P = Polytope(box_rows(1) + [LinIneq.ge((2,), 1), LinIneq.le((2,), 1)], 1)
    p = SpProof(P, _certify(P, Query((5,), 3, "leaf", "leaf")))
    with pytest.raises(ValueError):
        sp_star_to_facelike(p, c=2)
    Q = Polytope([LinIneq.ge((2,), 1), LinIneq.le((2,), 1)], 1)
    with pytest.raises(ValueError):
        sp_star_to_facelike(SpProof(Q, _certify(Q, Query((1,), 1, "leaf", "leaf"))))


@settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 3))
def test_sp_star_fuzz(seed, n):
    rng = np.random.default_rng(seed)
    P = random_integer_free_polytope(n, rng)
    if P is None:
        return
    p = random_sp_proof(P, rng, c=3)
    assert isinstance(verify_sp(p), Valid)
    rep = {}
    out = sp_star_to_facelike(p, c=3, report=rep)
    assert isinstance(verify_sp(out), Valid)
    assert all(k.kind != GENERAL for k in classify_all(out))
    assert rep["within_bound"]
    assert bound_holds(count_leaves(out.root), count_leaves(p.root), 3, n, n)


# -- pipeline ----------------------------------------------------------------

@pytest.mark.parametrize("sys", [K3, tseitin(complete_graph(4)),
                                 LinSystemFq(3, 2, (((0, 1), (1, 1), 1), ((0, 1), (1, 1), 0)), 2)],
                         ids=["k3", "k4", "f3"])
def test_compile_valid(sys):
    rep = {}
    cp = compile_system(sys, rep)
    assert verify_cp(cp)
    assert set(rep) >= {"refute_sp", "pathlike", "cp"}
    s = stats(cp)
    assert s.depth * 20 >= s.size
    assert rep["pathlike"].size <= rep["refute_sp"].size or "facelike" in rep


def test_compile_satisfiable():
    with pytest.raises(SatisfiableSystem):
        compile_system(LinSystemFq(2, 1, (((0,), (1,), 1),), 1))
