"""cutplanes command line.  Exit codes: 0 ok, 1 invalid input/proof, 2 usage, 3 budget."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import formats as fm
from .cp import cp_to_scp, stats, verify_cp, verify_scp
from .depthlab import (Game, InvariantViolation, NonExpanding, NotARefutation, expander_walk,
                       lifted_walk)
from .instances import (BudgetExceeded, Cnf, LinSystemFq, boundary_expansion, complete_graph,
                        cycle_graph, lift_system, random_kcnf, random_kxor, random_regular_graph,
                        to_cnf, to_polytope, tseitin, xor4_lift)
from .refuter import SatisfiableSystem, refute_sp
from .sp import Valid, verify_sp
from .translate import (NonFacelike, NonPathlike, compile_system, cp_to_pathlike,
                        facelike_to_pathlike, pathlike_to_cp, sp_star_to_facelike)

OK, INVALID, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _instance(path: str):
    """(kind, object) for a lin/cnf/graph file."""
    kind, obj = fm.read_any(_read(path))
    if kind not in ("lin", "cnf", "graph"):
        raise UsageError(f"{path} is not an instance file")
    return kind, obj


def _system(path: str) -> LinSystemFq:
    kind, obj = _instance(path)
    if kind == "graph":
        return tseitin(obj)
    if kind != "lin":
        raise UsageError(f"{path} is not a linear system")
    return obj


def _cnf(path: str) -> Cnf:
    kind, obj = _instance(path)
    if kind == "cnf":
        return obj
    return to_cnf(obj if kind == "lin" else tseitin(obj))


def _axioms(path):
    return None if path is None else to_polytope(_cnf(path))


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(a) -> int:
    if a.family == "tseitin":
        labels = None if a.labels == "odd" else (1,) * a.k
        if a.graph == "complete":
            g = complete_graph(a.k, labels)
        elif a.graph == "cycle":
            g = cycle_graph(a.k, labels)
        else:
            if a.seed is None or a.deg is None:
                raise UsageError("random regular graphs need --deg and --seed")
            g = random_regular_graph(a.k, a.deg, a.seed, labels)
        text = fm.write_graph(g) if a.emit == "graph" else fm.write_system(tseitin(g))
    elif a.family in ("kxor", "kcnf"):
        if a.seed is None:
            raise UsageError(f"gen {a.family} needs --seed")
        if None in (a.n, a.m, a.k):
            raise UsageError(f"gen {a.family} needs --n, --m and --k")
        if a.family == "kxor":
            text = fm.write_system(random_kxor(a.n, a.m, a.k, a.seed))
        else:
            text = fm.write_cnf(random_kcnf(a.n, a.m, a.k, a.seed))
    else:
        if a.input is None:
            raise UsageError("gen lift-xor4 needs --input")
        kind, obj = _instance(a.input)
        if kind == "lin":
            text = fm.write_system(lift_system(obj))
        elif kind == "cnf":
            text = fm.write_cnf(xor4_lift(obj))
        else:
            text = fm.write_system(lift_system(tseitin(obj)))
    _write(a.output, text)
    return OK


def cmd_refute(a) -> int:
    s = _system(a.system)
    log = [] if a.transcript else None
    p = refute_sp(s, transcript=log)
    _write(a.output, fm.write_sp(p))
    if a.transcript:
        _write(a.transcript, "\n".join(log) + "\n")
    return OK


def cmd_compile(a) -> int:
    s = _system(a.system)
    rep: dict = {}
    p = compile_system(s, rep)
    _write(a.output, fm.write_cp(p))
    if a.stage_report:
        _write(a.stage_report, json.dumps(_jsonable(rep), indent=2, sort_keys=True) + "\n")
    return OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):
        return {k: _jsonable(v) for k, v in obj._asdict().items()}
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj if isinstance(obj, (int, float, str, bool, type(None))) else str(obj)


STAGES = ["sp", "facelike", "pathlike", "cp"]


def cmd_translate(a) -> int:
    axioms = _axioms(a.instance)
    text = _read(a.input)
    if a.src == "cp":
        obj = fm.read_cp(text, axioms)
    else:
        obj = fm.read_sp(text, axioms)
    if a.dst == "scp":
        if a.src != "cp" or a.instance is None:
            raise UsageError("--to scp needs --from cp and --instance")
        _write(a.output, fm.write_scp(cp_to_scp(obj, _cnf(a.instance))))
        return OK
    src, dst = a.src, a.dst
    if dst == "sp":
        dst = "pathlike"
    if src == "cp" and dst == "pathlike":
        _write(a.output, fm.write_sp(cp_to_pathlike(obj)))
        return OK
    i, j = STAGES.index(src), STAGES.index(dst)
    if j <= i:
        raise UsageError(f"no translation from {a.src} to {a.dst}")
    for stage in STAGES[i + 1:j + 1]:
        if stage == "facelike":
            obj = sp_star_to_facelike(obj, c=a.c, diam2=a.diam2)
        elif stage == "pathlike":
            obj = facelike_to_pathlike(obj)
        else:
            obj = pathlike_to_cp(obj)
    _write(a.output, fm.write_cp(obj) if dst == "cp" else fm.write_sp(obj))
    return OK


def cmd_verify(a) -> int:
    text = _read(a.proof)
    if a.kind == "scp":
        if a.instance is None:
            raise UsageError("verify scp needs --instance")
        v = verify_scp(fm.read_scp(text), _cnf(a.instance))
        ok, where, why = v.valid, v.where, v.reason
        unit = "node"
    elif a.kind == "cp":
        v = verify_cp(fm.read_cp(text, _axioms(a.instance)))
        ok, where, why = v.valid, v.where, v.reason
        unit = "line"
    else:
        v = verify_sp(fm.read_sp(text, _axioms(a.instance)))
        ok = isinstance(v, Valid)
        where, why = (None, "") if ok else (v.node, v.reason)
        unit = "node"
    if ok:
        print("Valid")
        return OK
    print(f"Invalid at {unit} {where + 1 if where is not None else '?'}: {why}")
    return INVALID


def cmd_stats(a) -> int:
    kind, obj = fm.read_any(_read(a.proof))
    if kind not in ("cp", "sp", "scp"):
        raise UsageError(f"{a.proof} is not a proof file")
    st = stats(obj)
    print(f"size {st.size} depth {st.depth} max_coeff_bits {st.max_coeff_bits}")
    return OK


def cmd_expansion(a) -> int:
    s = _system(a.system)
    W, ratio = boundary_expansion(s, a.r)
    print(f"worst {' '.join(str(j + 1) for j in W)} ratio {fm._fmt(ratio)}")
    return OK


def cmd_resdepth(a) -> int:
    d = Game(_cnf(a.cnf)).depth()
    print("inf" if d == math.inf else d)
    return OK


def cmd_walk(a) -> int:
    d = fm.read_scp(_read(a.scp))
    if a.mode == "lifted":
        w = lifted_walk(d, _cnf(a.instance))
    else:
        if a.r is None or a.s is None:
            raise UsageError("walk expander needs --r and --s")
        s = _system(a.instance)
        w = expander_walk(d, s, to_cnf(s), a.r, a.s)
    _write(a.output, fm.write_transcript(w))
    return OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cutplanes", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="write an instance file")
    g.add_argument("family", choices=["tseitin", "kxor", "kcnf", "lift-xor4"])
    g.add_argument("--graph", choices=["complete", "cycle", "regular"], default="complete")
    g.add_argument("--k", type=int, help="graph size, or equation width for kxor/kcnf")
    g.add_argument("--deg", type=int)
    g.add_argument("--labels", choices=["odd", "ones"], default="odd")
    g.add_argument("--emit", choices=["system", "graph"], default="system")
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--input")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("refute", help="stabbing planes refutation of a linear system")
    r.add_argument("system_kind", choices=["sp"])
    r.add_argument("--system", required=True)
    r.add_argument("-o", "--output")
    r.add_argument("--transcript")
    r.set_defaults(func=cmd_refute)

    c = sub.add_parser("compile", help="cutting planes refutation via the SP pipeline")
    c.add_argument("--system", required=True)
    c.add_argument("-o", "--output")
    c.add_argument("--stage-report")
    c.set_defaults(func=cmd_compile)

    t = sub.add_parser("translate", help="convert between proof forms")
    t.add_argument("--from", dest="src", choices=["sp", "facelike", "pathlike", "cp"], required=True)
    t.add_argument("--to", dest="dst", choices=["sp", "facelike", "pathlike", "cp", "scp"], required=True)
    t.add_argument("input")
    t.add_argument("output")
    t.add_argument("--instance")
    t.add_argument("--c", type=int)
    t.add_argument("--diam2", type=int)
    t.set_defaults(func=cmd_translate)

    v = sub.add_parser("verify", help="check a proof")
    v.add_argument("kind", choices=["sp", "cp", "scp"])
    v.add_argument("proof")
    v.add_argument("--instance")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", help="size, depth and coefficient bits")
    s.add_argument("proof")
    s.set_defaults(func=cmd_stats)

    e = sub.add_parser("expansion", help="worst boundary expansion up to size r")
    e.add_argument("--system", required=True)
    e.add_argument("--r", type=int, required=True)
    e.set_defaults(func=cmd_expansion)

    d = sub.add_parser("resdepth", help="exact resolution depth via the Prover-Adversary game")
    d.add_argument("--cnf", required=True)
    d.set_defaults(func=cmd_resdepth)

    w = sub.add_parser("walk", help="adversary walk through a semantic CP DAG")
    w.add_argument("mode", choices=["lifted", "expander"])
    w.add_argument("--scp", required=True)
    w.add_argument("--instance", required=True)
    w.add_argument("--r", type=int)
    w.add_argument("--s", type=int)
    w.add_argument("-o", "--output")
    w.set_defaults(func=cmd_walk)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return a.func(a)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return USAGE
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return BUDGET
    except fm.FormatError as e:
        print(f"Invalid: {e}", file=sys.stderr)
        return INVALID
    except (SatisfiableSystem, NonFacelike, NonPathlike, NotARefutation, NonExpanding,
            InvariantViolation, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
