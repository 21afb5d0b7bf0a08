"""Acceptance criteria, one test each.  Every test prints a single
`CRITERION n: PASS|FAIL ...` line (run with -s to see them inline; they also
appear in the captured output of failures)."""
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from cutplanes import formats as fm
from cutplanes.cp import cp_to_scp, decision_tree_resolution, resolution_to_cp, verify_cp, verify_scp
from cutplanes.depthlab import Game, crux_select, consistent_restriction, expander_walk, lifted_walk
from cutplanes.exact import LinIneq
from cutplanes.instances import (LinSystemFq, boundary_expansion, complete_graph, cycle_graph,
                                 is_satisfiable_system, lift_system, random_kxor, to_cnf,
                                 to_polytope, tseitin)
from cutplanes.refuter import refute_sp, refute_sp_stats
from cutplanes.sp import FACELIKE, PATHLIKE, Valid, classify_all, verify_sp
from cutplanes.translate import (bound_holds, compile_system, count_leaves, facelike_size_bound,
                                 random_integer_free_polytope, random_lift_case, random_sp_proof,
                                 schrijver_lift, sp_star_to_facelike)

import oracles
from test_depthlab import random_cover_triple


def report(n, ok, detail):
    print(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def corpus():
    """Tseitin K3 (all-1), K4, C5..C9 (odd labels) and ten unsatisfiable seeded 3-XOR systems, n = 12."""
    out = [("K3", tseitin(complete_graph(3, [1, 1, 1]))), ("K4", tseitin(complete_graph(4)))]
    out += [(f"C{k}", tseitin(cycle_graph(k))) for k in range(5, 10)]
    seed = 0
    found = 0
    while found < 10:
        s = random_kxor(12, 16, 3, seed)
        if is_satisfiable_system(s) is None:
            out.append((f"xor3-seed{seed}", s))
            found += 1
        seed += 1
    return out


def test_criterion_1_end_to_end_compilation():
    t0 = time.time()
    bad = []
    items = corpus()
    for name, s in items:
        cp = compile_system(s, verify=False)
        last = cp.last()
        if not (verify_cp(cp).valid and last.is_zero() and last.rhs == 1):
            bad.append(name)
    dt = time.time() - t0
    report(1, not bad and dt < 60, f"{len(items) - len(bad)}/{len(items)} valid, {dt:.1f}s (limit 60s)")


def test_criterion_2_refuter_validity_and_facelikeness():
    t0 = time.time()
    items = corpus()
    invalid, general, total = [], 0, 0
    for name, s in items:
        p = refute_sp(s)
        if not isinstance(verify_sp(p), Valid):
            invalid.append(name)
        for c in classify_all(p):
            total += 1
            general += c.kind not in (PATHLIKE, FACELIKE)
    dt = time.time() - t0
    ok = not invalid and general == 0 and dt < 30
    report(2, ok, f"{len(items) - len(invalid)}/{len(items)} valid, {general}/{total} general queries, {dt:.1f}s (limit 30s)")


def test_criterion_3_depth_growth():
    t0 = time.time()
    ratios, depths, ms = [], [], []
    for k in range(4, 15):
        s = tseitin(cycle_graph(k))
        _, depth = refute_sp_stats(s)
        mqd = s.m * s.q * s.d
        ratios.append(depth / math.log2(mqd) ** 2)
        depths.append(depth)
        ms.append(s.m)
    monotone = all(a <= b for a, b in zip(depths, depths[1:]))
    c = max(ratios)
    dt = time.time() - t0
    report(3, c <= 10 and monotone and dt < 30,
           f"depths {depths}, max depth/log2(mqd)^2 = {c:.2f} (threshold 10), monotone={monotone}, {dt:.1f}s")


def test_criterion_4_schrijver_lift():
    t0 = time.time()
    rng = np.random.default_rng(1)
    done = fails = 0
    while done < 500:
        n = int(rng.integers(1, 5))
        case = random_lift_case(rng, n, cmax=5)
        if case is None:
            continue
        p, face, cut, dual = case
        try:
            schrijver_lift(p, face, cut, dual, lp_check=True)
        except AssertionError:
            fails += 1
        done += 1
    dt = time.time() - t0
    report(4, fails == 0 and dt < 60, f"{done} triples, {fails} post-check failures, {dt:.1f}s (limit 60s)")


def test_criterion_5_crux_oracle():
    t0 = time.time()
    rng = random.Random(2024)
    done = fails = 0
    while done < 1000:
        tr = random_cover_triple(rng, rng.randint(1, 8))
        if tr is None:
            continue
        H, H1, H2 = tr
        try:
            cx = crux_select(H, H1, H2)
            child = (H1, H2)[cx.child - 1]
            fixed = {j: v for j, v in enumerate(cx.rho.values) if v is not None}
            ok = (cx.y in oracles.crux_witnesses(child) and len(fixed) <= 2
                  and oracles.good_after(child, fixed))
        except Exception:
            ok = False
        fails += not ok
        done += 1
    dt = time.time() - t0
    report(5, fails == 0 and dt < 120, f"{done} covered triples, {fails} failures, {dt:.1f}s (limit 120s)")


def test_criterion_6_consistent_restriction():
    t0 = time.time()
    rng = random.Random(6)
    done = fails = 0
    while done < 1000:
        n = rng.randint(2, 10)
        w = [rng.randint(-9, 9) for _ in range(n)]
        h = LinIneq.ge(w, Fraction(rng.randint(-3 * n, 3 * n), rng.randint(1, 4)))
        if not oracles.good_after(h, {}):
            continue
        I = sorted(rng.sample(range(n), rng.randint(2, n)))
        b = rng.randint(0, 1)
        rho = consistent_restriction(h, I, b)
        fixed = {j: v for j, v in enumerate(rho.values) if v is not None}
        ok = set(fixed) == set(I) and sum(fixed.values()) % 2 == b and oracles.good_after(h, fixed)
        fails += not ok
        done += 1
    dt = time.time() - t0
    report(6, fails == 0 and dt < 10, f"{done} cases, {fails} failures, {dt:.2f}s (limit 10s)")


LIFT_CASES = {
    1: LinSystemFq(2, 1, (((0,), (1,), 0), ((0,), (1,), 1)), 1),
    2: LinSystemFq(2, 2, (((0, 1), (1, 1), 0), ((0, 1), (1, 1), 1)), 2),
    3: tseitin(complete_graph(3, [1, 1, 1])),
}


def test_criterion_7_lifted_walk():
    t0 = time.time()
    rows = []
    ok = True
    for want, s in LIFT_CASES.items():
        f = to_cnf(s)
        game = Game(f)
        depth = game.depth()
        lift = lift_system(s)
        d = cp_to_scp(compile_system(lift), to_cnf(lift))
        try:
            w = lifted_walk(d, f, game)
            length = w.length
        except AssertionError as e:      # InvariantViolation
            length, ok = -1, False
        good = depth == want and length >= math.ceil(depth / 2)
        ok = ok and good
        rows.append(f"res_depth {depth}: path {length}")
    dt = time.time() - t0
    report(7, ok and dt < 120, f"{'; '.join(rows)}; {dt:.1f}s (limit 120s)")


def test_criterion_8_expander_walk():
    t0 = time.time()
    s = tseitin(complete_graph(6))
    f = to_cnf(s)
    W, ratio = boundary_expansion(s, 2)
    d = cp_to_scp(resolution_to_cp(f, decision_tree_resolution(f)), f)
    valid = verify_scp(d, f).valid
    w = expander_walk(d, s, f, 2, 1)   # re-verifies the invariant triple at every step
    dt = time.time() - t0
    ok = ratio == 4 and valid and w.length >= 1 and dt < 60
    report(8, ok, f"ratio {ratio} at r=2 (worst {W}), DAG valid={valid}, path {w.length}, {dt:.1f}s (limit 60s)")


def _mutation_corpus():
    systems = [tseitin(complete_graph(3, [1, 1, 1])), tseitin(complete_graph(4)), tseitin(cycle_graph(5))]
    for seed in range(4, 8):
        s = random_kxor(8, 12, 3, seed)
        if is_satisfiable_system(s) is None:
            systems.append(s)
    files = []
    for s in systems:
        cnf = to_cnf(s)
        P = to_polytope(cnf)
        files.append(("sp", fm.write_sp(refute_sp(s)), P, cnf))
        files.append(("cp", fm.write_cp(compile_system(s)), P, cnf))
    return files


def _mutate(text, rng):
    lines = text.split("\n")
    body = [i for i, l in enumerate(lines) if l and not l.startswith(("c ", "p ", "ax "))]
    i = rng.choice(body)
    toks = lines[i].split(" ")
    j = rng.randrange(len(toks))
    try:
        v = Fraction(toks[j]) + rng.choice([-2, -1, 1, 2])
        new = fm._fmt(v)
    except ValueError:
        new = rng.choice(["lin", "div", "axiom", "src", "edge", "q", "leaf", ":", ";", "*", "(", ")", ">=", ","])
        if new == toks[j]:
            new = "?"
    toks[j] = new
    lines[i] = " ".join(toks)
    return "\n".join(lines)


def _verifier_accepts(kind, text, P):
    try:
        if kind == "sp":
            return isinstance(verify_sp(fm.read_sp(text, P)), Valid)
        return verify_cp(fm.read_cp(text, P)).valid
    except ValueError:          # FormatError and malformed objects
        return False


def test_criterion_9_soundness_fuzz():
    t0 = time.time()
    files = _mutation_corpus()
    rng = random.Random(0)
    accepted = false_accepts = 0
    for _ in range(1000):
        kind, text, P, cnf = files[rng.randrange(len(files))]
        mutant = _mutate(text, rng)
        if _verifier_accepts(kind, mutant, P):
            accepted += 1
            rows = oracles.cnf_rows(cnf)
            still_valid = (oracles.sp_text_valid(mutant, rows) if kind == "sp"
                           else oracles.cp_text_valid(mutant, rows))
            false_accepts += not still_valid
    dt = time.time() - t0
    report(9, false_accepts == 0 and dt < 60,
           f"1000 mutants, {accepted} accepted and independently confirmed valid, "
           f"{false_accepts} false accepts, {dt:.1f}s (limit 60s)")


def test_criterion_10_size_bound():
    t0 = time.time()
    rng = np.random.default_rng(10)
    done = over = 0
    worst = 0.0
    while done < 40:
        n = int(rng.integers(2, 4))
        P = random_integer_free_polytope(n, rng)
        if P is None:
            continue
        p = random_sp_proof(P, rng, c=3)
        rep = {}
        out = sp_star_to_facelike(p, c=3, report=rep)
        s, m = count_leaves(p.root), count_leaves(out.root)
        if not bound_holds(m, s, 3, n, n):
            over += 1
        if s > 1:
            worst = max(worst, math.log(m) / math.log(facelike_size_bound(s, 3, n, n)))
        done += 1
    dt = time.time() - t0
    report(10, over == 0 and dt < 30,
           f"{done} fuzzed proofs, {over} over the bound, max log(size)/log(bound) {worst:.3f}, {dt:.1f}s (limit 30s)")
