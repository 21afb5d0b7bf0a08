"""Text formats.  Every index in a file is 1-based; everything in memory is 0-based.

Each emitted file opens with a `c cutplanes-format 1` comment.  Comment lines
(starting with `c `) and blank lines are ignored by every reader.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .cp import Axiom, CpLine, CpProof, Division, LinComb, ScpDag, ScpNode
from .exact import LinIneq, Polytope
from .instances import Cnf, GraphWithLabels, LinSystemFq
from .sp import Leaf, Query, SpProof

VERSION_LINE = "c cutplanes-format 1"


class FormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _num(tok: str, lineno: int) -> Fraction:
    try:
        if "/" in tok:
            p, q = tok.split("/")
            if not q.isdigit() or int(q) == 0:
                raise ValueError
            return Fraction(int(p), int(q))
        return Fraction(int(tok))
    except ValueError:
        raise FormatError(lineno, f"not a number: {tok!r}") from None


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(lineno, f"not an integer: {tok!r}") from None


def _fmt(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _strict_num(tok: str, lineno: int) -> Fraction:
    """Numbers must be written in lowest terms, as the writer emits them."""
    v = _num(tok, lineno)
    if _fmt(v) != tok:
        raise FormatError(lineno, f"non-canonical number {tok!r}")
    return v


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s == "c" or s.startswith("c "):
            continue
        yield i, s


def _header(it, kind: str, nfields: int):
    try:
        lineno, s = next(it)
    except StopIteration:
        raise FormatError(0, "empty file") from None
    toks = s.split()
    if len(toks) != 2 + nfields or toks[0] != "p" or toks[1] != kind:
        raise FormatError(lineno, f"expected header 'p {kind}' with {nfields} fields")
    vals = [_int(t, lineno) for t in toks[2:]]
    if any(v < 0 for v in vals):
        raise FormatError(lineno, "negative header field")
    return vals


def _ineq_str(h: LinIneq) -> str:
    return " ".join(str(c) for c in h.coeffs) + " >= " + _fmt(h.rhs)


def _parse_ineq(toks, n, lineno) -> LinIneq:
    if len(toks) != n + 2 or toks[n] != ">=":
        raise FormatError(lineno, f"expected {n} coefficients then '>= r'")
    return LinIneq(tuple(_int(t, lineno) for t in toks[:n]), _strict_num(toks[n + 1], lineno))


# ---------------------------------------------------------------------------
# instances

def write_cnf(f: Cnf) -> str:
    out = [VERSION_LINE, f"p cnf {f.num_vars} {len(f.clauses)}"]
    out += [" ".join(str(l) for l in c) + " 0" for c in f.clauses]
    return "\n".join(out) + "\n"


def read_cnf(text: str) -> Cnf:
    it = _lines(text)
    n, m = _header(it, "cnf", 2)
    clauses = []
    for lineno, s in it:
        toks = s.split()
        if toks[-1] != "0":
            raise FormatError(lineno, "clause must end with 0")
        lits = tuple(_int(t, lineno) for t in toks[:-1])
        if any(l == 0 or abs(l) > n for l in lits):
            raise FormatError(lineno, "literal out of range")
        clauses.append(lits)
    if len(clauses) != m:
        raise FormatError(0, f"header announces {m} clauses, found {len(clauses)}")
    try:
        return Cnf(n, tuple(clauses))
    except ValueError as e:
        raise FormatError(0, str(e)) from None


def write_system(sys: LinSystemFq) -> str:
    out = [VERSION_LINE, f"p lin {sys.n} {sys.m} {sys.q} {sys.d}"]
    for supp, coeffs, rhs in sys.equations:
        body = " ".join(f"{c} {v + 1}" for v, c in zip(supp, coeffs))
        out.append(f"{body} = {rhs}")
    return "\n".join(out) + "\n"


def read_system(text: str) -> LinSystemFq:
    it = _lines(text)
    n, m, q, d = _header(it, "lin", 4)
    eqs = []
    for lineno, s in it:
        toks = s.split()
        if len(toks) < 2 or toks[-2] != "=" or len(toks) % 2:
            raise FormatError(lineno, "expected 'c1 v1 ... = b'")
        rhs = _int(toks[-1], lineno)
        if not 0 <= rhs < q:
            raise FormatError(lineno, f"right-hand side {rhs} outside 0..{q - 1}")
        pairs = toks[:-2]
        coeffs = [_int(t, lineno) for t in pairs[0::2]]
        supp = [_int(t, lineno) - 1 for t in pairs[1::2]]
        if any(not 0 < c < q for c in coeffs):
            raise FormatError(lineno, f"coefficient outside 1..{q - 1}")
        if any(not 0 <= v < n for v in supp):
            raise FormatError(lineno, "variable index out of range")
        eqs.append((tuple(supp), tuple(coeffs), rhs))
    if len(eqs) != m:
        raise FormatError(0, f"header announces {m} equations, found {len(eqs)}")
    try:
        return LinSystemFq(q, d, tuple(eqs), n)
    except ValueError as e:
        raise FormatError(0, str(e)) from None


def write_graph(g: GraphWithLabels) -> str:
    out = [VERSION_LINE, f"p graph {g.num_vertices} {len(g.edges)}"]
    out += [f"{u + 1} {v + 1}" for u, v in g.edges]
    out += [f"l {v + 1} {b}" for v, b in enumerate(g.labels)]
    return "\n".join(out) + "\n"


def read_graph(text: str) -> GraphWithLabels:
    it = _lines(text)
    n, m = _header(it, "graph", 2)
    edges, labels = [], {}
    for lineno, s in it:
        toks = s.split()
        if toks[0] == "l":
            if len(toks) != 3:
                raise FormatError(lineno, "expected 'l v b'")
            v, b = _int(toks[1], lineno) - 1, _int(toks[2], lineno)
            if not 0 <= v < n or b not in (0, 1) or v in labels:
                raise FormatError(lineno, "bad label line")
            labels[v] = b
        else:
            if len(toks) != 2:
                raise FormatError(lineno, "expected 'u v'")
            u, v = (_int(t, lineno) - 1 for t in toks)
            if not (0 <= u < n and 0 <= v < n):
                raise FormatError(lineno, "vertex out of range")
            edges.append((u, v))
    if len(edges) != m or len(labels) != n:
        raise FormatError(0, "edge or label count does not match the header")
    try:
        return GraphWithLabels(n, tuple(edges), tuple(labels[v] for v in range(n)))
    except ValueError as e:
        raise FormatError(0, str(e)) from None


# ---------------------------------------------------------------------------
# embedded axioms

def _axiom_lines(p: Polytope):
    return [f"ax {j + 1} : {_ineq_str(h)}" for j, h in enumerate(p.ineqs)]


def _read_axiom(toks, n, expect, lineno) -> LinIneq:
    if len(toks) < 3 or toks[2] != ":" or _int(toks[1], lineno) != expect:
        raise FormatError(lineno, f"expected 'ax {expect} : ...'")
    return _parse_ineq(toks[3:], n, lineno)


def _resolve_axioms(embedded: list, n: int, axioms: Optional[Polytope], lineno: int) -> Polytope:
    if axioms is None:
        if not embedded:
            raise FormatError(lineno, "no axioms: pass an instance or embed 'ax' lines")
        return Polytope(tuple(embedded), n)
    if axioms.dim != n:
        raise FormatError(lineno, "instance dimension does not match the proof")
    if embedded and tuple(embedded) != tuple(axioms.ineqs):
        raise FormatError(lineno, "embedded axioms differ from the instance")
    return axioms


# ---------------------------------------------------------------------------
# CP

def write_cp(p: CpProof, embed_axioms: bool = True) -> str:
    out = [VERSION_LINE, f"p cp {p.n} {len(p.lines)}"]
    if embed_axioms:
        out += _axiom_lines(p.axioms)
    for i, line in enumerate(p.lines):
        js = line.just
        if isinstance(js, Axiom):
            j = f"axiom {js.index + 1}"
        elif isinstance(js, LinComb):
            j = "lin " + " ".join(f"{k + 1}*{lam}" for k, lam in js.terms)
        else:
            j = f"div {js.line + 1} {js.divisor}"
        out.append(f"{i + 1} : {_ineq_str(line.ineq)} ; {j.rstrip()}")
    return "\n".join(out) + "\n"


def read_cp(text: str, axioms: Optional[Polytope] = None) -> CpProof:
    it = _lines(text)
    n, L = _header(it, "cp", 2)
    embedded, lines = [], []
    last = 0
    for lineno, s in it:
        last = lineno
        toks = s.split()
        if toks[0] == "ax":
            if lines:
                raise FormatError(lineno, "axiom lines must precede proof lines")
            embedded.append(_read_axiom(toks, n, len(embedded) + 1, lineno))
            continue
        if len(toks) < 2 or toks[1] != ":" or _int(toks[0], lineno) != len(lines) + 1:
            raise FormatError(lineno, f"expected line number {len(lines) + 1}")
        try:
            semi = toks.index(";")
        except ValueError:
            raise FormatError(lineno, "missing ';'") from None
        ineq = _parse_ineq(toks[2:semi], n, lineno)
        rule = toks[semi + 1:]
        if not rule:
            raise FormatError(lineno, "missing justification")
        if rule[0] == "axiom" and len(rule) == 2:
            just = Axiom(_int(rule[1], lineno) - 1)
            if just.index < 0:
                raise FormatError(lineno, "axiom index must be positive")
        elif rule[0] == "lin":
            terms = []
            for t in rule[1:]:
                if t.count("*") != 1:
                    raise FormatError(lineno, f"bad term {t!r}")
                a, b = t.split("*")
                k = _int(a, lineno) - 1
                lam = _int(b, lineno)
                if k < 0:
                    raise FormatError(lineno, "line reference must be positive")
                terms.append((k, lam))
            just = LinComb(tuple(terms))
        elif rule[0] == "div" and len(rule) == 3:
            just = Division(_int(rule[1], lineno) - 1, _int(rule[2], lineno))
        else:
            raise FormatError(lineno, f"unknown justification {' '.join(rule)!r}")
        lines.append(CpLine(ineq, just))
    if len(lines) != L:
        raise FormatError(last, f"header announces {L} lines, found {len(lines)}")
    return CpProof(_resolve_axioms(embedded, n, axioms, last), lines)


# ---------------------------------------------------------------------------
# semantic CP DAG

def write_scp(d: ScpDag) -> str:
    out = [VERSION_LINE, f"p scp {d.n} {len(d.nodes)}"]
    for v, node in enumerate(d.nodes):
        if node.sink is not None:
            tail = f"sink {node.sink + 1}"
        else:
            tail = "children " + " ".join(str(c + 1) for c in node.children)
        out.append(f"{v + 1} : {_ineq_str(node.ineq)} ; {tail}")
    return "\n".join(out) + "\n"


def read_scp(text: str) -> ScpDag:
    it = _lines(text)
    n, N = _header(it, "scp", 2)
    nodes = []
    for lineno, s in it:
        toks = s.split()
        if len(toks) < 2 or toks[1] != ":" or _int(toks[0], lineno) != len(nodes) + 1:
            raise FormatError(lineno, f"expected node number {len(nodes) + 1}")
        try:
            semi = toks.index(";")
        except ValueError:
            raise FormatError(lineno, "missing ';'") from None
        ineq = _parse_ineq(toks[2:semi], n, lineno)
        rest = toks[semi + 1:]
        if rest and rest[0] == "sink" and len(rest) == 2:
            k = _int(rest[1], lineno) - 1
            if k < 0:
                raise FormatError(lineno, "clause index must be positive")
            nodes.append(ScpNode(ineq, (), k))
        elif rest and rest[0] == "children" and 1 <= len(rest) - 1 <= 2:
            ch = tuple(_int(t, lineno) - 1 for t in rest[1:])
            if any(c < 0 or c >= N for c in ch):
                raise FormatError(lineno, "child index out of range")
            nodes.append(ScpNode(ineq, ch, None))
        else:
            raise FormatError(lineno, "expected 'children v1 [v2]' or 'sink k'")
    if len(nodes) != N:
        raise FormatError(0, f"header announces {N} nodes, found {len(nodes)}")
    return ScpDag(n, nodes)


# ---------------------------------------------------------------------------
# SP

def write_sp(p: SpProof, embed_axioms: bool = True) -> str:
    out = [VERSION_LINE, f"p sp {p.n}"]
    if embed_axioms:
        out += _axiom_lines(p.axioms)
    stack = [p.root]
    while stack:
        node = stack.pop()
        if isinstance(node, str):
            out.append(node)
        elif isinstance(node, Query):
            out.append(f"q : {' '.join(str(c) for c in node.a)} , {node.b}")
            stack += [")", node.right, "(", ")", node.left, "("]
        else:
            terms = " ".join(f"{k} {i + 1} * {_fmt(lam)}" for (k, i), lam in node.cert)
            out.append(f"leaf : {terms}".rstrip())
    return "\n".join(out) + "\n"


def read_sp(text: str, axioms: Optional[Polytope] = None) -> SpProof:
    it = _lines(text)
    (n,) = _header(it, "sp", 1)
    embedded = []
    body = []
    for lineno, s in it:
        toks = s.split()
        if toks[0] == "ax":
            if body:
                raise FormatError(lineno, "axiom lines must precede the tree")
            embedded.append(_read_axiom(toks, n, len(embedded) + 1, lineno))
        else:
            body.append((lineno, toks))
    pos = [0]

    def take():
        if pos[0] >= len(body):
            raise FormatError(body[-1][0] if body else 0, "unexpected end of tree")
        item = body[pos[0]]
        pos[0] += 1
        return item

    def bracket(sym):
        lineno, toks = take()
        if toks != [sym]:
            raise FormatError(lineno, f"expected '{sym}'")

    def node():
        lineno, toks = take()
        if toks[0] == "q":
            if len(toks) != n + 4 or toks[1] != ":" or toks[n + 2] != ",":
                raise FormatError(lineno, f"expected 'q : c1 .. c{n} , b'")
            a = tuple(_int(t, lineno) for t in toks[2:n + 2])
            b = _int(toks[n + 3], lineno)
            bracket("(")
            left = node()
            bracket(")")
            bracket("(")
            right = node()
            bracket(")")
            return Query(a, b, left, right)
        if toks[0] == "leaf":
            if len(toks) < 2 or toks[1] != ":" or (len(toks) - 2) % 4:
                raise FormatError(lineno, "expected 'leaf : kind idx * lam ...'")
            cert = []
            for j in range(2, len(toks), 4):
                kind, idx, star, lam = toks[j:j + 4]
                if kind not in ("src", "edge") or star != "*":
                    raise FormatError(lineno, f"bad certificate term near {kind!r}")
                i = _int(idx, lineno) - 1
                if i < 0:
                    raise FormatError(lineno, "certificate index must be positive")
                cert.append(((kind, i), _strict_num(lam, lineno)))
            return Leaf(tuple(cert))
        raise FormatError(lineno, f"expected a query or leaf, got {toks[0]!r}")

    import sys as _sys
    old = _sys.getrecursionlimit()
    _sys.setrecursionlimit(max(old, 4 * len(body) + 1000))
    try:
        root = node()
    finally:
        _sys.setrecursionlimit(old)
    if pos[0] != len(body):
        raise FormatError(body[pos[0]][0], "trailing lines after the tree")
    last = body[-1][0] if body else 0
    return SpProof(_resolve_axioms(embedded, n, axioms, last), root)


# ---------------------------------------------------------------------------
# walk transcripts

def write_transcript(walk, checks: Optional[int] = None) -> str:
    out = []
    for i, st in enumerate(walk.steps):
        fixed = " ".join(f"x{j + 1}={b}" for j, b in st.fixed)
        tail = f" ; k={st.k}" if st.k is not None else ""
        out.append(f"step {i + 1} : node {st.node + 1} ; fixed {fixed}".rstrip() + tail)
    out.append(f"summary : length {walk.length} ; checks {checks if checks is not None else len(walk.steps) + 1}"
               f" ; end {walk.end}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# sniffing

def read_any(text: str):
    """Dispatch on the 'p <kind>' header."""
    for _, s in _lines(text):
        toks = s.split()
        if len(toks) >= 2 and toks[0] == "p":
            kind = toks[1]
            break
        raise FormatError(0, "missing header")
    else:
        raise FormatError(0, "empty file")
    readers = {"cnf": read_cnf, "lin": read_system, "graph": read_graph, "cp": read_cp,
               "scp": read_scp, "sp": read_sp}
    if kind not in readers:
        raise FormatError(0, f"unknown kind {kind!r}")
    return kind, readers[kind](text)
