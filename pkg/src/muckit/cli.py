"""Command-line front end.

Exit codes follow the SAT-competition convention: 10 when the input is
satisfiable, 20 when it is unsatisfiable (a core or refutation was produced),
0 for other successful commands and 1 for usage errors or failed checks.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import subprocess
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from . import refutation as rf
from .extractors import ALGORITHMS, PREPROCESS, SatisfiableInput, extract, refute
from .formula import CnfFormula, DimacsError, emit_dimacs, read_dimacs
from .generators import pigeonhole, random_kcnf
from .oracle import Minimal, NotMinimal, NotUnsat, OracleBoundExceeded, check_muc
from .proof import ProofError, ProofLog
from .refutation import RefutationError
from .rrp import DEFAULT_DEPTH_LIMIT
from .solver import solve, solve_subset

EXIT_OK, EXIT_ERROR, EXIT_SAT, EXIT_UNSAT = 0, 1, 10, 20

BENCH_FIELDS = ["instance", "vars", "clauses", "algo", "core_size", "ms", "sat_calls",
                "rel_hardness", "status"]


class CliError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("MUCKIT_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"MUCKIT_SEED must be an integer, got {raw!r}") from None


def _load(path: str) -> CnfFormula:
    try:
        if path == "-":
            from .formula import parse_dimacs
            return parse_dimacs(sys.stdin)
        return read_dimacs(path)
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror or e}") from None
    except DimacsError as e:
        raise CliError(f"{path}: {e}") from None


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _model_lines(model: dict[int, bool]) -> str:
    lits = [v if model[v] else -v for v in sorted(model)]
    return "s SATISFIABLE\nv " + " ".join(map(str, lits + [0])) + "\n"


# -- solve -----------------------------------------------------------------

def cmd_solve(args) -> int:
    f = _load(args.file)
    res = solve(f, seed=args.seed)
    if res.sat:
        sys.stdout.write(_model_lines(res.model))
        return EXIT_SAT
    sys.stdout.write("s UNSATISFIABLE\n")
    if args.proof:
        Path(args.proof).write_text(res.proof.dumps())
    return EXIT_UNSAT


# -- extract ---------------------------------------------------------------

def cmd_extract(args) -> int:
    f = _load(args.file)
    proof = None
    if args.proof:
        try:
            proof = ProofLog.read(args.proof)
        except (OSError, ProofError) as e:
            raise CliError(f"cannot use proof {args.proof}: {e}") from None
    try:
        report = extract(f, args.algo, preprocess=args.preprocess, seed=args.seed,
                         depth_limit=args.rrp_depth, root=args.rrp_root, proof=proof,
                         check=args.check)
    except SatisfiableInput as e:
        sys.stdout.write(_model_lines(e.model))
        return EXIT_SAT
    except RefutationError as e:
        raise CliError(f"bad proof: {e}") from None
    core = f.subformula(report.core)
    comments = [f"core of {Path(args.file).name} by {report.algorithm}",
                f"clauses {' '.join(str(i + 1) for i in report.core)}"]
    _write(emit_dimacs(core, comments), args.output)
    if args.emit_proof:
        pi = report.refutation
        if pi is None:
            pi = refute(f, report.core, seed=args.seed)
        Path(args.emit_proof).write_text(rf.export_proof(pi, len(f)).dumps())
    if args.report:
        Path(args.report).write_text(report.to_json(indent=2) + "\n")
    return EXIT_UNSAT


# -- verify ----------------------------------------------------------------

def cmd_verify(args) -> int:
    core = _load(args.core)
    full = _load(args.against)
    where: dict[frozenset, list[int]] = {}
    for i, c in enumerate(full.clauses):
        where.setdefault(frozenset(c), []).append(i)
    indices = []
    for j, c in enumerate(core.clauses):
        hits = where.get(frozenset(c))
        if not hits:
            print(f"FAIL: core clause {j + 1} ({' '.join(map(str, c))}) is not in {args.against}")
            return EXIT_ERROR
        indices.append(hits.pop(0) if len(hits) > 1 else hits[0])
    res = solve_subset(full.num_vars, {i + 1: full.clauses[i] for i in set(indices)}, seed=args.seed)
    if res.sat:
        print("FAIL: core is satisfiable")
        return EXIT_ERROR
    print(f"ok: {len(core)} clauses contained in {args.against}, unsatisfiable")
    if args.oracle:
        try:
            verdict = check_muc(full, indices)
        except OracleBoundExceeded as e:
            print(f"FAIL: {e}")
            return EXIT_ERROR
        if isinstance(verdict, NotUnsat):
            print("FAIL: oracle found a model of the core")
            return EXIT_ERROR
        if isinstance(verdict, NotMinimal):
            print(f"FAIL: not minimal, clause {verdict.witness + 1} of {args.against} is redundant")
            return EXIT_ERROR
        assert isinstance(verdict, Minimal)
        print("ok: minimal (oracle)")
    return EXIT_OK


# -- dump-dot --------------------------------------------------------------

def cmd_dump_dot(args) -> int:
    f = _load(args.file)
    try:
        if args.proof:
            pi = rf.trim(rf.build(f, ProofLog.read(args.proof)))
        else:
            pi = refute(f, seed=args.seed)
    except SatisfiableInput:
        print("input is satisfiable, no refutation", file=sys.stderr)
        return EXIT_SAT
    except (OSError, ProofError, RefutationError) as e:
        raise CliError(str(e)) from None
    _write(pi.to_dot(), args.output)
    return EXIT_UNSAT


# -- gen -------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.family == "php":
        f = pigeonhole(args.n)
        comments = [f"pigeonhole: {args.n + 1} pigeons, {args.n} holes"]
    else:
        import random
        rng = random.Random(args.seed)
        for _ in range(args.tries):
            f = random_kcnf(args.vars, args.clauses, args.k, rng)
            if not args.unsat or solve(f).unsat:
                break
        else:
            raise CliError(f"no unsatisfiable instance in {args.tries} tries")
        comments = [f"random {args.k}-cnf, seed {args.seed}"]
    _write(emit_dimacs(f, comments), args.output)
    return EXIT_OK


# -- bench -----------------------------------------------------------------

def _bench_one(path: str, algo: str, preprocess: str | None, seed: int) -> dict:
    """Run one extraction in this process and describe the outcome."""
    f = read_dimacs(path)
    row = {"vars": f.num_vars, "clauses": len(f)}
    try:
        t0 = time.perf_counter()
        r = extract(f, algo, preprocess=preprocess, seed=seed)
        ms = (time.perf_counter() - t0) * 1000
    except SatisfiableInput:
        return {**row, "status": "satisfiable-input"}
    except MemoryError:
        return {**row, "status": "memout"}
    hard = "" if r.final_hardness is None else f"{float(r.final_hardness):.4f}"
    return {**row, "core_size": len(r.core), "ms": f"{ms:.1f}", "sat_calls": r.sat_calls,
            "rel_hardness": hard, "status": "ok"}


def cmd_bench_one(args) -> int:
    if args.mem_mb:
        import resource
        lim = args.mem_mb * 1024 * 1024
        resource.setrlimit(resource.RLIMIT_AS, (lim, lim))
    print(json.dumps(_bench_one(args.file, args.algo, args.preprocess, args.seed)))
    return EXIT_OK


def _instances(d: Path) -> list[Path]:
    if d.is_file():
        return [d]
    if not d.is_dir():
        raise CliError(f"{d} is not a directory")
    return sorted(p for p in d.iterdir() if p.suffix in (".cnf", ".dimacs"))


def _header_counts(path: Path) -> dict:
    try:
        f = read_dimacs(path)
        return {"vars": f.num_vars, "clauses": len(f)}
    except (OSError, DimacsError):
        return {"vars": "", "clauses": ""}


def run_task(path: Path, algo: str, timeout: float, preprocess: str | None, seed: int,
             mem_mb: int | None) -> dict:
    cmd = [sys.executable, "-m", "muckit", "_bench-one", str(path), algo, "--seed", str(seed)]
    if preprocess:
        cmd += ["--preprocess", preprocess]
    if mem_mb:
        cmd += ["--mem-mb", str(mem_mb)]
    row = {"instance": path.name, "algo": algo}
    t0 = time.perf_counter()
    try:
        out = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        return {**row, **_header_counts(path), "ms": f"{(time.perf_counter() - t0) * 1000:.1f}",
                "status": "timeout"}
    lines = out.stdout.strip().splitlines()
    if out.returncode != 0 or not lines:
        status = "memout" if "MemoryError" in out.stderr else "error"
        return {**row, **_header_counts(path), "status": status}
    return {**row, **json.loads(lines[-1])}


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad or not algos:
        raise CliError(f"unknown algorithm(s) {','.join(bad)}; choose from {','.join(ALGORITHMS)}")
    tasks = [(p, a) for p in _instances(Path(args.dir)) for a in algos]
    out_path = Path(args.out) if args.out else None
    new_file = out_path is None or not out_path.exists() or out_path.stat().st_size == 0
    fh = open(out_path, "a", newline="") if out_path else sys.stdout
    writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDS, restval="")
    lock = threading.Lock()
    failed = 0
    try:
        if new_file:
            writer.writeheader()
            fh.flush()

        def work(task):
            nonlocal failed
            row = run_task(task[0], task[1], args.timeout, args.preprocess, args.seed, args.mem_mb)
            with lock:
                writer.writerow(row)
                fh.flush()
                if row["status"] != "ok":
                    failed += 1

        if args.jobs <= 1:
            for t in tasks:
                work(t)
        else:
            with ThreadPoolExecutor(args.jobs) as pool:
                list(pool.map(work, tasks))
    finally:
        if out_path:
            fh.close()
    return EXIT_ERROR if args.strict and failed else EXIT_OK


# -- parser ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share exit code 1 with other failures
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="muckit", description="Minimal unsatisfiable core extraction.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def seeded(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="solver seed (default: $MUCKIT_SEED or 0)")

    sp = sub.add_parser("solve", help="decide satisfiability")
    sp.add_argument("file")
    sp.add_argument("--proof", metavar="P", help="write the resolution trace here when unsatisfiable")
    seeded(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("extract", help="extract an unsatisfiable core")
    sp.add_argument("file")
    sp.add_argument("--algo", choices=ALGORITHMS, default="crr")
    sp.add_argument("--preprocess", choices=PREPROCESS, default=None,
                    help="first-refutation preprocessing (crr default: ec, naive default: none)")
    sp.add_argument("--rrp-depth", type=int, default=DEFAULT_DEPTH_LIMIT, metavar="N")
    sp.add_argument("--rrp-root", choices=("empty", "clause"), default="empty")
    sp.add_argument("--proof", metavar="P", help="start from this refutation trace instead of solving")
    sp.add_argument("--emit-proof", metavar="P", help="write a refutation of the core")
    sp.add_argument("--report", metavar="J", help="write a JSON report")
    sp.add_argument("--check", action="store_true", help="validate every intermediate refutation")
    sp.add_argument("-o", "--output", help="core destination (default stdout)")
    seeded(sp)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("verify", help="check a core against its formula")
    sp.add_argument("core")
    sp.add_argument("--against", required=True, metavar="FULL")
    sp.add_argument("--oracle", action="store_true", help="also check minimality by enumeration")
    seeded(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="run algorithms over a directory, CSV out")
    sp.add_argument("dir")
    sp.add_argument("--algos", default="ec,ec-fp,crr,crr-rrp")
    sp.add_argument("--timeout", type=float, default=600.0, metavar="SECS")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", help="CSV file to append to (default stdout)")
    sp.add_argument("--preprocess", choices=PREPROCESS, default=None)
    sp.add_argument("--mem-mb", type=int, default=None)
    sp.add_argument("--strict", action="store_true", help="exit 1 if any run is not ok")
    seeded(sp)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("_bench-one", help=argparse.SUPPRESS)
    sp.add_argument("file")
    sp.add_argument("algo", choices=ALGORITHMS)
    sp.add_argument("--preprocess", choices=PREPROCESS, default=None)
    sp.add_argument("--mem-mb", type=int, default=None)
    seeded(sp)
    sp.set_defaults(func=cmd_bench_one)

    sp = sub.add_parser("dump-dot", help="Graphviz rendering of a trimmed refutation")
    sp.add_argument("file")
    sp.add_argument("--proof", metavar="P")
    sp.add_argument("-o", "--output")
    seeded(sp)
    sp.set_defaults(func=cmd_dump_dot)

    sp = sub.add_parser("gen", help="generate benchmark instances")
    sp.add_argument("family", choices=("php", "random"))
    sp.add_argument("-n", type=int, default=5, help="holes (php)")
    sp.add_argument("--vars", type=int, default=20)
    sp.add_argument("--clauses", type=int, default=100)
    sp.add_argument("-k", type=int, default=3)
    sp.add_argument("--unsat", action="store_true", help="retry until unsatisfiable")
    sp.add_argument("--tries", type=int, default=1000)
    sp.add_argument("-o", "--output")
    seeded(sp)
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except CliError as e:
        print(f"muckit: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as e:
        print(f"muckit: error: {e}", file=sys.stderr)
        return EXIT_ERROR
