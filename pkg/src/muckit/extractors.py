"""Unsatisfiable core extraction: EC, EC-fp, Naive and CRR.

All cores are reported as clause indices (0-based positions) of the input
formula, whatever preprocessing or splicing happened in between.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import refutation as rf
from .formula import CnfFormula
from .proof import ProofLog
from .refutation import Refutation
from .rrp import DEFAULT_DEPTH_LIMIT, ProofPathGraph, RrpHook, proof_path_graph
from .solver import SolveResult, solve_subset

PREPROCESS = ("none", "ec", "ec-fp")


class SatisfiableInput(Exception):
    def __init__(self, model: dict[int, bool]):
        super().__init__("input formula is satisfiable")
        self.model = model


class CoreInvariantError(RuntimeError):
    """Internal consistency check failed during extraction."""


@dataclass(frozen=True)
class TraceEntry:
    index: int
    decision: str  # "marked" | "removed"
    by: str  # "sub-solve" | "trim"


@dataclass
class CoreReport:
    algorithm: str
    core: list[int]
    minimal: bool
    sat_calls: int
    elapsed: float
    final_hardness: Optional[Fraction] = None
    trace: list[TraceEntry] = field(default_factory=list)
    refutation: Optional[Refutation] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "core": self.core,
            "core_size": len(self.core),
            "minimal": self.minimal,
            "sat_calls": self.sat_calls,
            "elapsed_ms": round(self.elapsed * 1000, 3),
            "final_hardness": None if self.final_hardness is None else float(self.final_hardness),
            "final_hardness_ratio": None if self.final_hardness is None else str(self.final_hardness),
            "trace": [{"index": t.index, "decision": t.decision, "by": t.by} for t in self.trace],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _check(pi: Refutation, f: CnfFormula, when: str) -> None:
    bad = rf.validate(pi, f)
    if bad:
        raise CoreInvariantError(f"invalid refutation {when}: {bad[0]}")


def refute(f: CnfFormula, indices=None, seed: int = 0) -> Refutation:
    """Trimmed refutation of the clauses of ``f`` at ``indices`` (default: all).

    Source keys are indices of ``f``. Raises SatisfiableInput.
    """
    if indices is None:
        indices = range(len(f))
    keep = {i + 1: f.clauses[i] for i in indices}
    res = solve_subset(f.num_vars, keep, seed=seed)
    if res.sat:
        raise SatisfiableInput(res.model)
    return rf.trim(rf.from_proof(res.proof, lambda i: i - 1, check=False))


def _seeded(f: CnfFormula, proof: ProofLog, check: bool) -> Refutation:
    pi = rf.build(f, proof, check=True)
    if check:
        _check(pi, f, "after build")
    return rf.trim(pi)


def extract_ec(f: CnfFormula, seed: int = 0, proof: Optional[ProofLog] = None,
               check: bool = False) -> CoreReport:
    """Initial clauses connected to the empty clause in one refutation."""
    t0 = time.perf_counter()
    pi = _seeded(f, proof, check) if proof is not None else refute(f, seed=seed)
    if check:
        _check(pi, f, "after trim")
    return CoreReport("ec", pi.core(), False, 0 if proof is not None else 1,
                      time.perf_counter() - t0, refutation=pi)


def extract_ec_fp(f: CnfFormula, seed: int = 0, check: bool = False) -> CoreReport:
    """Re-run EC on its own core until the core size stops shrinking."""
    t0 = time.perf_counter()
    pi = refute(f, seed=seed)
    calls = 1
    while True:
        core = pi.core()
        nxt = refute(f, core, seed=seed)
        calls += 1
        if check:
            _check(nxt, f, "in EC-fp iteration")
        if len(nxt.initial) == len(core):
            break
        pi = nxt
    return CoreReport("ec-fp", core, False, calls, time.perf_counter() - t0, refutation=pi)


def _preprocess(f: CnfFormula, how: str, seed: int, check: bool) -> tuple[Refutation, int]:
    if how in ("none", "ec"):
        # The first trimmed refutation already has exactly the EC core as sources.
        r = extract_ec(f, seed=seed, check=check)
    elif how == "ec-fp":
        r = extract_ec_fp(f, seed=seed, check=check)
    else:
        raise ValueError(f"unknown preprocessing {how!r}")
    return r.refutation, r.sat_calls


def extract_naive(f: CnfFormula, seed: int = 0, preprocess: str = "none") -> CoreReport:
    """Drop each clause in turn if the rest stays unsatisfiable."""
    t0 = time.perf_counter()
    if preprocess == "none":
        res = solve_subset(f.num_vars, {i + 1: c for i, c in enumerate(f.clauses)}, seed=seed)
        if res.sat:
            raise SatisfiableInput(res.model)
        current = list(range(len(f)))
        calls = 1
    else:
        pi, calls = _preprocess(f, preprocess, seed, False)
        current = pi.core()
    trace = [TraceEntry(i, "removed", "trim") for i in range(len(f)) if i not in set(current)]
    alive = set(current)
    for i in current:
        trial = {j + 1: f.clauses[j] for j in sorted(alive) if j != i}
        res = solve_subset(f.num_vars, trial, seed=seed)
        calls += 1
        if res.sat:
            trace.append(TraceEntry(i, "marked", "sub-solve"))
        else:
            alive.discard(i)
            trace.append(TraceEntry(i, "removed", "sub-solve"))
    return CoreReport("naive", sorted(alive), True, calls, time.perf_counter() - t0, trace=trace)


SubsolveObserver = Callable[[Refutation, int, dict, SolveResult, Optional[ProofPathGraph]], None]


def extract_crr(f: CnfFormula, rrp: bool = False, preprocess: str = "ec",
                depth_limit: int = DEFAULT_DEPTH_LIMIT, root: str = "empty", seed: int = 0,
                proof: Optional[ProofLog] = None, check: bool = False,
                observer: Optional[SubsolveObserver] = None) -> CoreReport:
    """Complete-resolution-refutation MUC extraction.

    Keeps a non-redundant refutation of the remaining clauses. For each
    initial clause C, in formula order, the vertices unreachable from C are
    handed to a fresh sub-solve: satisfiable means C is necessary (marked);
    otherwise the sub-solve's refutation is spliced in place of everything
    reachable from C.

    ``proof`` seeds the first refutation instead of solving ``f``. With
    ``check`` every intermediate refutation is validated. ``observer`` sees
    each sub-solve as ``(pi, c, keep, result, graph)``.
    """
    t0 = time.perf_counter()
    if proof is not None:
        pi = _seeded(f, proof, check)
        calls = 0
    else:
        pi, calls = _preprocess(f, preprocess, seed, check)
    if check:
        _check(pi, f, "after trim")
    trace = [TraceEntry(i, "removed", "trim") for i in range(len(f)) if i not in set(pi.core())]
    marked: set[int] = set()
    for key in pi.core():
        try:
            c = pi.vertex_of(key)
        except KeyError:
            continue  # dropped by an earlier splice, already traced
        gone = rf.reachable(pi, c)
        keep = {v: pi.clauses[v] for v in pi.clauses if v not in gone}
        graph = proof_path_graph(pi, c, root) if rrp else None
        hook = RrpHook(graph, depth_limit) if rrp else None
        res = solve_subset(f.num_vars, keep, hook=hook, seed=seed)
        calls += 1
        if observer is not None:
            observer(pi, c, keep, res, graph)
        if res.sat:
            marked.add(key)
            trace.append(TraceEntry(key, "marked", "sub-solve"))
            continue
        before = set(pi.core())
        sub = rf.from_proof(res.proof, check=check)
        pi = rf.splice(pi, c, sub, check=check)
        if check:
            _check(pi, f, f"after splicing out clause {key}")
        after = set(pi.core())
        if not marked <= after:
            raise CoreInvariantError(f"marked clauses {sorted(marked - after)} vanished from the refutation")
        trace.append(TraceEntry(key, "removed", "sub-solve"))
        trace.extend(TraceEntry(i, "removed", "trim") for i in sorted(before - after - {key}))
    name = "crr-rrp" if rrp else "crr"
    return CoreReport(name, pi.core(), True, calls, time.perf_counter() - t0,
                      rf.relative_hardness(pi), trace, pi)


def extract(f: CnfFormula, algo: str, preprocess: Optional[str] = None, seed: int = 0,
            depth_limit: int = DEFAULT_DEPTH_LIMIT, root: str = "empty",
            proof: Optional[ProofLog] = None, check: bool = False) -> CoreReport:
    """Dispatch by algorithm name: ec, ec-fp, naive, crr, crr-rrp."""
    if algo == "ec":
        return extract_ec(f, seed=seed, proof=proof, check=check)
    if algo == "ec-fp":
        return extract_ec_fp(f, seed=seed, check=check)
    if algo == "naive":
        return extract_naive(f, seed=seed, preprocess=preprocess or "none")
    if algo in ("crr", "crr-rrp"):
        return extract_crr(f, rrp=algo == "crr-rrp", preprocess=preprocess or "ec",
                           depth_limit=depth_limit, root=root, seed=seed, proof=proof, check=check)
    raise ValueError(f"unknown algorithm {algo!r}")


ALGORITHMS = ("ec", "ec-fp", "naive", "crr", "crr-rrp")
