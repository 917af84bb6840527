"""CDCL SAT solver with resolution proof logging.

Two watched literals, 1UIP learning with recursive minimization, VSIDS-style
variable activities, phase saving, Luby restarts and LBD-based deletion of
learned clauses. Every learned clause is logged together with the ordered
list of clauses that were resolved to obtain it, including minimization steps
and the unit clauses used to strip level-0 literals. Deleting a learned clause
drops it from the active database, never from the log.

Input unit clauses are not pre-asserted: they are watched like any other
clause and surface through conflicts, which keeps level-0 reasoning inside
the logged derivation.

An optional decision hook is consulted before the activity heuristic; see
:class:`DecisionHook`.
"""

from __future__ import annotations

import heapq
import random
from collections import Counter, deque
from dataclasses import dataclass
from typing import Mapping, Optional, Protocol, Sequence

from .formula import Clause, CnfFormula, make_clause
from .proof import ProofLog

RECENT_WINDOW = 256


class DecisionHook(Protocol):
    def next_decision(self, assignment) -> Optional[int]:
        """A currently unassigned literal to decide, or None to defer."""

    def on_backjump(self, assignment, level: int) -> None:
        """Called after conflict analysis or restart, before undoing levels above ``level``."""


@dataclass(frozen=True)
class SolveResult:
    sat: bool
    model: Optional[dict[int, bool]] = None
    proof: Optional[ProofLog] = None
    conflicts: int = 0
    decisions: int = 0

    @property
    def unsat(self) -> bool:
        return not self.sat


def _luby(i: int) -> int:
    # i-th element (0-based) of 1,1,2,1,1,2,4,...
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class Solver:
    """Single-use CDCL solver over ``clauses`` keyed by positive proof ids.

    Internally a literal ``l`` is encoded as ``2*var(l) + (l < 0)``.
    """

    def __init__(self, num_vars: int, clauses: Mapping[int, Sequence[int]],
                 hook: Optional[DecisionHook] = None, seed: int = 0,
                 restart_base: int = 100, reduce_base: int = 2000):
        self.num_vars = n = num_vars
        self.hook = hook
        self.restart_base = restart_base
        self.val = [0] * (2 * n + 2)
        self.level_ = [-1] * (n + 1)
        self.reason = [-1] * (n + 1)
        self.trail_pos = [0] * (n + 1)
        self.phase = [True] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.seen = bytearray(n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 2)]
        self.unit_watch: list[list[int]] = [[] for _ in range(2 * n + 2)]
        # clause store, indexed by cref
        self.clauses: list[Optional[list[int]]] = []
        self.cid: list[int] = []
        self.learnt_lbd: dict[int, int] = {}
        self.source_clause: dict[int, Clause] = {}
        self.used_sources: set[int] = set()
        self.log: list[tuple[int, Clause, tuple[int, ...]]] = []
        self.empty_source: Optional[int] = None
        self.conflicts = 0
        self.decisions = 0
        self.max_learnts = max(reduce_base, 0)
        self.recent: deque[Clause] = deque()
        self.recent_literal_counts: Counter = Counter()

        for key in sorted(clauses):
            if key <= 0:
                raise ValueError("clause ids must be positive")
            lits = make_clause(clauses[key])
            for l in lits:
                if abs(l) > n:
                    raise ValueError(f"clause {key}: literal {l} out of range 1..{n}")
            self.source_clause[key] = lits
            if not lits:
                if self.empty_source is None:
                    self.empty_source = key
                continue
            self._attach(key, [self._code(l) for l in lits])
        self.next_id = max(clauses, default=0) + 1
        self.max_learnts = max(self.max_learnts, len(self.clauses) // 3)

        if seed:
            rng = random.Random(seed)
            for v in range(1, n + 1):
                self.activity[v] = rng.random() * 1e-5
        self.heap = [(-self.activity[v], v) for v in range(1, n + 1)]
        heapq.heapify(self.heap)

    # -- literal helpers ---------------------------------------------------

    @staticmethod
    def _code(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    @staticmethod
    def _lit(code: int) -> int:
        return -(code >> 1) if code & 1 else code >> 1

    def value(self, lit: int) -> Optional[bool]:
        v = self.val[self._code(lit)]
        return None if v == 0 else v == 1

    def level(self, v: int) -> Optional[int]:
        return self.level_[v] if self.val[2 * v] else None

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    # -- clause store ------------------------------------------------------

    def _attach(self, id: int, codes: list[int], lbd: Optional[int] = None) -> int:
        cr = len(self.clauses)
        self.clauses.append(codes)
        self.cid.append(id)
        if lbd is not None:
            self.learnt_lbd[cr] = lbd
        if len(codes) == 1:
            self.unit_watch[codes[0]].append(cr)
        elif len(codes) > 1:
            self.watches[codes[0]].append(cr)
            self.watches[codes[1]].append(cr)
        return cr

    def _log(self, codes: Sequence[int], chain: list[int]) -> int:
        id = self.next_id
        self.next_id += 1
        for a in chain:
            if a in self.source_clause:
                self.used_sources.add(a)
        self.log.append((id, tuple(self._lit(c) for c in codes), tuple(chain)))
        return id

    def _note_learnt(self, clause: Clause) -> None:
        self.recent.append(clause)
        self.recent_literal_counts.update(clause)
        if len(self.recent) > RECENT_WINDOW:
            self.recent_literal_counts.subtract(self.recent.popleft())

    # -- assignment --------------------------------------------------------

    def _enqueue(self, code: int, cr: int) -> None:
        v = code >> 1
        self.val[code] = 1
        self.val[code ^ 1] = -1
        self.level_[v] = len(self.trail_lim)
        self.reason[v] = cr
        self.trail_pos[v] = len(self.trail)
        self.trail.append(code)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        val, phase, heap, act = self.val, self.phase, self.heap, self.activity
        for code in self.trail[start:]:
            v = code >> 1
            val[code] = 0
            val[code ^ 1] = 0
            phase[v] = not (code & 1)
            self.reason[v] = -1
            heapq.heappush(heap, (-act[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = start

    def _unit_reason(self, cr: int) -> int:
        """At level 0, replace a multi-literal reason by a logged unit clause."""
        c = self.clauses[cr]
        chain = [self.cid[cr]]
        reason, cid = self.reason, self.cid
        for q in c[1:]:
            chain.append(cid[reason[q >> 1]])
        id = self._log(c[:1], chain)
        return self._attach_reason_only(id, c[0])

    def _attach_reason_only(self, id: int, code: int) -> int:
        cr = len(self.clauses)
        self.clauses.append([code])
        self.cid.append(id)
        return cr

    # -- propagation -------------------------------------------------------

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting cref or -1."""
        val, clauses, watches, trail = self.val, self.clauses, self.watches, self.trail
        unit_watch = self.unit_watch
        at_root = not self.trail_lim
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = p ^ 1
            units = unit_watch[false_lit]
            if units:
                self.qhead = len(trail)
                return units[0]
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                cr = ws[i]
                i += 1
                c = clauses[cr]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = cr
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if val[c[k]] != -1:
                        c[1] = c[k]
                        c[k] = false_lit
                        watches[c[1]].append(cr)
                        break
                else:
                    ws[j] = cr
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return cr
                    self._enqueue(first, self._unit_reason(cr) if at_root else cr)
            del ws[j:]
        return -1

    # -- conflict analysis -------------------------------------------------

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.num_vars + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.num_vars + 1) if not self.val[2 * u]]
            heapq.heapify(self.heap)

    def _analyze(self, confl: int):
        """1UIP analysis. Returns (learnt codes, resolution chain of ids)."""
        seen, level, reason, clauses, cid = self.seen, self.level_, self.reason, self.clauses, self.cid
        trail = self.trail
        dl = len(self.trail_lim)
        learnt = [0]
        chain = [cid[confl]]
        zero_vars: list[int] = []
        to_clear: list[int] = []
        path = 0
        idx = len(trail) - 1
        c = clauses[confl]
        start = 0
        while True:
            for k in range(start, len(c)):
                q = c[k]
                v = q >> 1
                if not seen[v]:
                    seen[v] = 1
                    to_clear.append(v)
                    lv = level[v]
                    if lv == 0:
                        zero_vars.append(v)
                    else:
                        self._bump(v)
                        if lv >= dl:
                            path += 1
                        else:
                            learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            seen[p >> 1] = 0
            path -= 1
            if path == 0:
                break
            confl = reason[p >> 1]
            c = clauses[confl]
            chain.append(cid[confl])
            start = 1
        learnt[0] = p ^ 1

        # recursive minimization; removed literals are resolved away with their reasons
        resolved: list[int] = []
        out = [learnt[0]]
        for q in learnt[1:]:
            v = q >> 1
            if reason[v] != -1 and self._redundant(v, resolved, zero_vars, to_clear):
                resolved.append(v)
            else:
                out.append(q)
        if resolved:
            pos = self.trail_pos
            resolved.sort(key=lambda u: -pos[u])
            chain.extend(cid[reason[u]] for u in resolved)
        chain.extend(cid[reason[u]] for u in zero_vars)
        for v in to_clear:
            seen[v] = 0
        return out, chain

    def _redundant(self, v0: int, resolved: list[int], zero_vars: list[int], to_clear: list[int]) -> bool:
        seen, level, reason, clauses = self.seen, self.level_, self.reason, self.clauses
        stack = [v0]
        local: list[int] = []
        local_zero: list[int] = []
        while stack:
            c = clauses[reason[stack.pop()]]
            for k in range(1, len(c)):
                u = c[k] >> 1
                if seen[u]:
                    continue
                if level[u] == 0:
                    seen[u] = 1
                    local_zero.append(u)
                    continue
                if reason[u] == -1:
                    for w in local:
                        seen[w] = 0
                    for w in local_zero:
                        seen[w] = 0
                    return False
                seen[u] = 1
                local.append(u)
                stack.append(u)
        resolved.extend(local)
        zero_vars.extend(local_zero)
        to_clear.extend(local)
        to_clear.extend(local_zero)
        return True

    def _refute_at_root(self, confl: int) -> None:
        c = self.clauses[confl]
        chain = [self.cid[confl]]
        chain.extend(self.cid[self.reason[q >> 1]] for q in c)
        self._log((), chain)

    # -- decisions ---------------------------------------------------------

    def _pick_branch(self) -> int:
        if self.hook is not None:
            lit = self.hook.next_decision(self)
            if lit is not None:
                code = self._code(lit)
                if abs(lit) > self.num_vars or self.val[code] != 0:
                    raise RuntimeError(f"decision hook returned assigned or unknown literal {lit}")
                return code
        heap, val, act = self.heap, self.val, self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[2 * v] or -a != act[v]:
                continue
            return 2 * v + (0 if self.phase[v] else 1)
        return -1

    # -- clause database reduction ----------------------------------------

    def _reduce_db(self) -> None:
        locked = {self.reason[c >> 1] for c in self.trail}
        cand = [cr for cr, lbd in self.learnt_lbd.items()
                if lbd > 2 and cr not in locked and len(self.clauses[cr]) > 2]
        cand.sort(key=lambda cr: (-self.learnt_lbd[cr], -len(self.clauses[cr])))
        dead = set(cand[:len(cand) // 2])
        if not dead:
            return
        for cr in dead:
            self.clauses[cr] = None
            del self.learnt_lbd[cr]
        for ws in self.watches:
            if ws:
                ws[:] = [cr for cr in ws if cr not in dead]

    # -- main loop ---------------------------------------------------------

    def _finish_unsat(self) -> SolveResult:
        proof = ProofLog()
        if self.empty_source is not None and not self.log:
            proof.add(self.empty_source, ())
        else:
            for key in sorted(self.used_sources):
                proof.add(key, self.source_clause[key])
            for id, clause, ants in self.log:
                proof.add(id, clause, ants)
        return SolveResult(False, None, proof, self.conflicts, self.decisions)

    def solve(self) -> SolveResult:
        if self.empty_source is not None:
            return self._finish_unsat()
        hook = self.hook
        track_recent = hook is not None
        restart_idx = 0
        next_restart = _luby(0) * self.restart_base
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl != -1:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    self._refute_at_root(confl)
                    return self._finish_unsat()
                out, chain = self._analyze(confl)
                if len(out) == 1:
                    bt = 0
                else:
                    lv = self.level_
                    best = 1
                    for k in range(2, len(out)):
                        if lv[out[k] >> 1] > lv[out[best] >> 1]:
                            best = k
                    out[1], out[best] = out[best], out[1]
                    bt = lv[out[1] >> 1]
                if hook is not None:
                    hook.on_backjump(self, bt)
                lbd = len({self.level_[c >> 1] for c in out})
                self._cancel_until(bt)
                if len(chain) == 1 and len(out) == 1:
                    # conflict on a unit clause whose literal was decided: reuse it
                    cr = confl
                else:
                    id = self._log(out, chain)
                    if len(out) == 1:
                        cr = self._attach_reason_only(id, out[0])
                    else:
                        cr = self._attach(id, out, lbd)
                if track_recent:
                    self._note_learnt(tuple(self._lit(c) for c in out))
                self._enqueue(out[0], cr)
                self.var_inc *= 1.0 / 0.95
                if since_restart >= next_restart:
                    restart_idx += 1
                    next_restart = _luby(restart_idx) * self.restart_base
                    since_restart = 0
                    if hook is not None:
                        hook.on_backjump(self, 0)
                    self._cancel_until(0)
                if len(self.learnt_lbd) - len(self.trail) >= self.max_learnts:
                    self._reduce_db()
                    self.max_learnts = int(self.max_learnts * 1.1)
            else:
                code = self._pick_branch()
                if code == -1:
                    model = {v: self.val[2 * v] == 1 for v in range(1, self.num_vars + 1)}
                    return SolveResult(True, model, None, self.conflicts, self.decisions)
                self.decisions += 1
                self.trail_lim.append(len(self.trail))
                self._enqueue(code, -1)


def solve(f: CnfFormula, hook: Optional[DecisionHook] = None, seed: int = 0) -> SolveResult:
    """Solve ``f``; clause ``i`` of ``f`` has proof id ``i + 1``."""
    return Solver(f.num_vars, {i + 1: c for i, c in enumerate(f.clauses)}, hook, seed).solve()


def solve_subset(num_vars: int, keep: Mapping[int, Sequence[int]],
                 hook: Optional[DecisionHook] = None, seed: int = 0) -> SolveResult:
    """Solve exactly the clauses in ``keep``, whose keys become the proof's source ids.

    Learned clauses get ids above ``max(keep)``.
    """
    return Solver(num_vars, keep, hook, seed).solve()
