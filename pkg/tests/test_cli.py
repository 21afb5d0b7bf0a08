import json
import subprocess
import sys

import pytest

from cutplanes.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def k3(tmp_path):
    p = tmp_path / "k3.lin"
    assert run("gen", "tseitin", "--graph", "complete", "--k", 3, "--labels", "ones", "-o", p) == 0
    return p


def test_compile_then_verify(k3, tmp_path, capsys):
    cp = tmp_path / "k3.cp"
    rep = tmp_path / "rep.json"
    assert run("compile", "--system", k3, "-o", cp, "--stage-report", rep) == 0
    assert run("verify", "cp", cp, "--instance", k3) == 0
    assert capsys.readouterr().out.strip().endswith("Valid")
    assert {"refute_sp", "pathlike", "cp"} <= set(json.loads(rep.read_text()))


def test_corrupted_cp_is_invalid(k3, tmp_path, capsys):
    cp = tmp_path / "k3.cp"
    run("compile", "--system", k3, "-o", cp)
    lines = cp.read_text().splitlines()
    j = next(i for i, l in enumerate(lines) if "; lin" in l)
    head, tail = lines[j].split(" : ", 1)
    lhs, just = tail.split(" ; ")
    coeffs, rhs = lhs.split(" >= ")
    lines[j] = f"{head} : {coeffs} >= {int(rhs) + 1} ; {just}"
    cp.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    assert run("verify", "cp", cp, "--instance", k3) == 1
    out = capsys.readouterr().out
    assert out.startswith(f"Invalid at line {head}:")


def test_refute_and_translate_chain(k3, tmp_path, capsys):
    sp = tmp_path / "k3.sp"
    tr = tmp_path / "k3.tr"
    assert run("refute", "sp", "--system", k3, "-o", sp, "--transcript", tr) == 0
    assert tr.read_text().startswith("root")
    path = tmp_path / "k3.path.sp"
    cp = tmp_path / "k3.cp"
    assert run("translate", "--from", "sp", "--to", "pathlike", sp, path) == 0
    assert run("translate", "--from", "pathlike", "--to", "cp", path, cp) == 0
    assert run("verify", "sp", path) == 0 and run("verify", "cp", cp) == 0
    scp = tmp_path / "k3.scp"
    assert run("translate", "--from", "cp", "--to", "scp", cp, scp, "--instance", k3) == 0
    assert run("verify", "scp", scp, "--instance", k3) == 0
    assert run("stats", cp) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1].startswith("size ")


def test_expansion_k6(tmp_path, capsys):
    g = tmp_path / "k6.lin"
    run("gen", "tseitin", "--graph", "complete", "--k", 6, "-o", g)
    capsys.readouterr()
    assert run("expansion", "--system", g, "--r", 2) == 0
    assert capsys.readouterr().out.strip().endswith("ratio 4")


def test_resdepth(tmp_path, capsys):
    f = tmp_path / "f.cnf"
    f.write_text("p cnf 2 3\n1 2 0\n1 -2 0\n-1 0\n")
    assert run("resdepth", "--cnf", f) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_walk_lifted(tmp_path, capsys):
    base = tmp_path / "x.lin"
    base.write_text("p lin 1 2 2 1\n1 1 = 0\n1 1 = 1\n")
    lift = tmp_path / "lift.lin"
    assert run("gen", "lift-xor4", "--input", base, "-o", lift) == 0
    cp = tmp_path / "lift.cp"
    scp = tmp_path / "lift.scp"
    assert run("compile", "--system", lift, "-o", cp) == 0
    assert run("translate", "--from", "cp", "--to", "scp", cp, scp, "--instance", lift) == 0
    out = tmp_path / "walk.txt"
    assert run("walk", "lifted", "--scp", scp, "--instance", base, "-o", out) == 0
    assert out.read_text().splitlines()[-1].startswith("summary : length ")


def test_seeded_generation_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for p in (a, b):
        assert run("gen", "kxor", "--n", 8, "--m", 12, "--k", 3, "--seed", 5, "-o", p) == 0
    assert a.read_bytes() == b.read_bytes()


def test_exit_codes(tmp_path, monkeypatch, k3):
    assert run("gen", "kxor", "--n", 8, "--m", 12, "--k", 3) == 2          # no seed
    assert run("verify", "cp", tmp_path / "missing.cp") == 2
    assert run("bogus") == 2
    sat = tmp_path / "sat.lin"
    sat.write_text("p lin 1 1 2 1\n1 1 = 0\n")
    assert run("refute", "sp", "--system", sat, "-o", tmp_path / "o.sp") == 1
    junk = tmp_path / "junk.cp"
    junk.write_text("p cp 1 1\nnonsense\n")
    assert run("verify", "cp", junk) == 1
    monkeypatch.setenv("CUTPLANES_ENUM_BUDGET", "3")
    assert run("expansion", "--system", k3, "--r", 2) == 3


def test_module_entry_point(k3):
    r = subprocess.run([sys.executable, "-m", "cutplanes", "expansion", "--system", str(k3), "--r", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "ratio" in r.stdout
