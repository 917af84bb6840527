import csv
import json
import shutil

import pytest

from muckit import refutation as rf
from muckit.cli import BENCH_FIELDS, main
from muckit.formula import parse_dimacs, read_dimacs
from muckit.proof import ProofLog

from conftest import FIG1_MUC

QUICK = ["fig1.cnf", "rand3_v20_s1.cnf", "rand3_v20_s2.cnf", "php_6_5.cnf"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def fig1_path(corpus_dir):
    return corpus_dir / "fig1.cnf"


def test_extract_crr_example(capsys, fig1_path):
    code, out, _ = run(capsys, "extract", "--algo", "crr", fig1_path)
    assert code == 20
    core = parse_dimacs(out)
    assert len(core) == 5
    assert "c core of fig1.cnf by crr" in out
    assert "c clauses 2 3 5 6 7" in out


def test_extract_satisfiable_input(capsys, tmp_path):
    p = tmp_path / "sat.cnf"
    p.write_text("p cnf 1 1\n1 0\n")
    code, out, _ = run(capsys, "extract", "--algo", "ec", p)
    assert code == 10
    assert out == "s SATISFIABLE\nv 1 0\n"


def test_extract_outputs(capsys, tmp_path, fig1_path):
    core, rep, prf = tmp_path / "core.cnf", tmp_path / "r.json", tmp_path / "p.trace"
    code, out, _ = run(capsys, "extract", "--algo", "crr-rrp", "-o", core, "--report", rep,
                       "--emit-proof", prf, "--check", fig1_path)
    assert code == 20 and out == ""
    assert len(read_dimacs(core)) == 5
    report = json.loads(rep.read_text())
    assert report["core"] == FIG1_MUC and report["algorithm"] == "crr-rrp"
    f = read_dimacs(fig1_path)
    pi = rf.trim(rf.build(f, ProofLog.read(prf)))
    assert rf.validate(pi, f) == [] and pi.core() == FIG1_MUC


@pytest.mark.parametrize("algo", ["naive", "ec-fp"])
def test_emit_proof_without_final_refutation(capsys, tmp_path, fig1_path, algo):
    prf = tmp_path / "p.trace"
    assert run(capsys, "extract", "--algo", algo, "--emit-proof", prf, fig1_path)[0] == 20
    f = read_dimacs(fig1_path)
    pi = rf.trim(rf.build(f, ProofLog.read(prf)))
    assert pi.core() == FIG1_MUC


def test_extract_seeded_with_proof(capsys, corpus_dir, fig1_path, tmp_path):
    rep = tmp_path / "r.json"
    code, out, _ = run(capsys, "extract", "--algo", "crr", "--proof", corpus_dir / "fig1.proof",
                       "--report", rep, fig1_path)
    assert code == 20
    trace = json.loads(rep.read_text())["trace"]
    assert trace[0] == {"index": 0, "decision": "removed", "by": "sub-solve"}


def test_extract_rejects_bad_proof(capsys, tmp_path, fig1_path):
    p = tmp_path / "bad.trace"
    p.write_text("1 1 4 -2 0 0\n8 0 1 0\n")
    code, _, err = run(capsys, "extract", "--proof", p, fig1_path)
    assert code == 1 and "error" in err


@pytest.mark.parametrize("algo", ["ec", "ec-fp", "naive", "crr", "crr-rrp"])
def test_extract_is_deterministic(capsys, corpus_dir, algo, monkeypatch):
    path = corpus_dir / "rand3_v20_s3.cnf"
    first = run(capsys, "extract", "--algo", algo, path)[1]
    assert run(capsys, "extract", "--algo", algo, "--seed", 0, path)[1] == first
    monkeypatch.setenv("MUCKIT_SEED", "4")
    a = run(capsys, "extract", "--algo", algo, path)[1]
    assert run(capsys, "extract", "--algo", algo, "--seed", 4, path)[1] == a


def test_bad_seed_env(capsys, fig1_path, monkeypatch):
    monkeypatch.setenv("MUCKIT_SEED", "x")
    assert run(capsys, "extract", fig1_path)[0] == 1


@pytest.mark.parametrize("name", QUICK)
@pytest.mark.parametrize("algo", ["ec", "ec-fp", "naive", "crr", "crr-rrp"])
def test_verify_accepts_extracted_cores(capsys, tmp_path, corpus_dir, name, algo):
    core = tmp_path / "core.cnf"
    assert run(capsys, "extract", "--algo", algo, "-o", core, corpus_dir / name)[0] == 20
    code, out, _ = run(capsys, "verify", core, "--against", corpus_dir / name)
    assert code == 0 and out.startswith("ok")


def test_verify_oracle(capsys, tmp_path, fig1_path):
    core = tmp_path / "core.cnf"
    run(capsys, "extract", "-o", core, fig1_path)
    code, out, _ = run(capsys, "verify", core, "--against", fig1_path, "--oracle")
    assert code == 0 and "minimal" in out
    code, out, _ = run(capsys, "verify", fig1_path, "--against", fig1_path, "--oracle")
    assert code == 1 and "clause 1" in out


def test_verify_failures(capsys, tmp_path, fig1_path):
    foreign = tmp_path / "foreign.cnf"
    foreign.write_text("p cnf 4 2\n1 0\n-1 0\n")
    code, out, _ = run(capsys, "verify", foreign, "--against", fig1_path)
    assert code == 1 and "not in" in out
    sat = tmp_path / "sat.cnf"
    sat.write_text("p cnf 4 2\n-2 0\n-1 3 0\n")
    code, out, _ = run(capsys, "verify", sat, "--against", fig1_path)
    assert code == 1 and "satisfiable" in out


def test_solve(capsys, tmp_path, fig1_path):
    prf = tmp_path / "p.trace"
    code, out, _ = run(capsys, "solve", "--proof", prf, fig1_path)
    assert code == 20 and out == "s UNSATISFIABLE\n"
    assert rf.validate(rf.build(read_dimacs(fig1_path), ProofLog.read(prf))) == []
    sat = tmp_path / "sat.cnf"
    sat.write_text("p cnf 2 1\n-2 0\n")
    code, out, _ = run(capsys, "solve", sat)
    assert code == 10 and out.splitlines()[0] == "s SATISFIABLE"
    assert out.splitlines()[1] in ("v 1 -2 0", "v -1 -2 0")


def test_errors(capsys, tmp_path):
    code, _, err = run(capsys, "extract", tmp_path / "missing.cnf")
    assert code == 1 and "cannot read" in err
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 1 1\n2 0\n")
    code, _, err = run(capsys, "extract", bad)
    assert code == 1 and "exceeds" in err
    with pytest.raises(SystemExit) as e:
        main(["extract", "--algo", "fast", str(bad)])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1


def test_dump_dot(capsys, fig1_path, corpus_dir):
    code, out, _ = run(capsys, "dump-dot", fig1_path)
    assert code == 20 and out.startswith("digraph")
    code, out, _ = run(capsys, "dump-dot", "--proof", corpus_dir / "fig1.proof", fig1_path)
    assert out.count("->") == 12


def test_gen(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "php", "-n", 3)
    f = parse_dimacs(out)
    assert code == 0 and f.num_vars == 12 and len(f) == 4 + 3 * 6
    code, out, _ = run(capsys, "gen", "random", "--vars", 10, "--clauses", 60, "--unsat", "--seed", 2)
    assert code == 0 and len(parse_dimacs(out)) == 60
    code, _, err = run(capsys, "gen", "random", "--vars", 10, "--clauses", 5, "--unsat", "--tries", 3)
    assert code == 1


def test_bench_appends_and_flags_timeouts(capsys, tmp_path, corpus_dir):
    d = tmp_path / "inst"
    d.mkdir()
    shutil.copy(corpus_dir / "fig1.cnf", d)
    (d / "sat.cnf").write_text("p cnf 1 1\n1 0\n")
    (d / "notes.txt").write_text("ignored")
    out = tmp_path / "out.csv"
    assert run(capsys, "bench", "--algos", "ec,crr", "--out", out, d)[0] == 0
    assert run(capsys, "bench", "--algos", "naive", "--out", out, "--jobs", 2, d)[0] == 0
    rows = list(csv.DictReader(out.open()))
    assert out.read_text().count("instance,") == 1
    assert len(rows) == 6
    by = {(r["instance"], r["algo"]): r for r in rows}
    assert by[("sat.cnf", "ec")]["status"] == "satisfiable-input"
    assert by[("fig1.cnf", "crr")]["rel_hardness"] == "1.6000"
    assert by[("fig1.cnf", "ec")]["rel_hardness"] == ""
    # satisfiable input is not ok under --strict
    assert run(capsys, "bench", "--algos", "ec", "--out", out, "--strict", d)[0] == 1


def test_bench_timeout_row(capsys, tmp_path, corpus_dir):
    d = tmp_path / "inst"
    d.mkdir()
    shutil.copy(corpus_dir / "php_8_7.cnf", d)
    code, out, _ = run(capsys, "bench", "--algos", "naive", "--timeout", 0.5, "--strict", d)
    assert code == 1
    rows = list(csv.DictReader(out.splitlines()))
    assert list(rows[0]) == BENCH_FIELDS
    assert rows[0]["status"] == "timeout" and rows[0]["clauses"] == "204"


def test_bench_rejects_unknown_algorithm(capsys, corpus_dir):
    code, _, err = run(capsys, "bench", "--algos", "ec,magic", corpus_dir)
    assert code == 1 and "magic" in err
