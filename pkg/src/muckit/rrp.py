"""Refutation-guided decisions for the sub-solves of CRR.

When checking whether initial clause C is needed, any model of the clauses
unreachable from C must falsify every clause on some path from C to the
empty clause. The hook below walks the paths of the refutation between C and
the empty clause depth-first and proposes decisions that falsify the clause
under the cursor. Once a whole path is falsified, or every path has been
found to contain a satisfied clause, it stops proposing and the solver's own
heuristic takes over.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .formula import Clause, Status, clause_status
from .refutation import Refutation, RefutationError, backward_reachable, reachable

DEFAULT_DEPTH_LIMIT = 50


class State(enum.Enum):
    NORM = "Norm"
    SAT = "Sat"
    FALSE = "False"
    EOT = "EoT"  # every path explored
    EOP = "EoP"  # current path completely falsified


@dataclass
class ProofPathGraph:
    root: int
    children: Mapping[int, tuple[int, ...]]
    clauses: Mapping[int, Clause]

    @property
    def vertices(self) -> set[int]:
        return set(self.children)


def proof_path_graph(pi: Refutation, c: int, root: str = "empty") -> ProofPathGraph:
    """Vertices and edges on paths from initial vertex ``c`` to the sink.

    With ``root="empty"`` edges are reversed and traversal starts at the
    empty clause; with ``root="clause"`` it starts at ``c``.
    """
    if c not in pi.clauses or not pi.is_initial(c):
        raise RefutationError(f"{c} is not an initial vertex")
    keep = reachable(pi, c) & backward_reachable(pi, pi.sink)
    if root == "empty":
        children = {v: tuple(u for u in pi.preds[v] if u in keep) for v in keep}
        start = pi.sink
    elif root == "clause":
        children = {v: tuple(w for w in pi.succs[v] if w in keep) for v in keep}
        start = c
    else:
        raise ValueError(f"unknown root {root!r}")
    return ProofPathGraph(start, children, {v: pi.clauses[v] for v in keep})


@dataclass
class RrpCursor:
    state: State
    stack: list[int]
    depth_limit: int = DEFAULT_DEPTH_LIMIT
    visited: set[int] = field(default_factory=set)
    visit_log: list[int] = field(default_factory=list)
    # len(visit_log) when each stack frame was entered
    marks: list[int] = field(default_factory=list)

    @classmethod
    def start(cls, g: ProofPathGraph, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> "RrpCursor":
        state = State.NORM if depth_limit > 0 else State.EOP
        return cls(state, [g.root], depth_limit, marks=[0])

    @property
    def current(self) -> int:
        return self.stack[-1]

    @property
    def depth(self) -> int:
        return len(self.stack) - 1

    def _descend(self, child: int) -> None:
        self.visited.add(child)
        self.visit_log.append(child)
        self.stack.append(child)
        self.marks.append(len(self.visit_log))

    def _ascend(self) -> None:
        self.stack.pop()
        self.marks.pop()


def _pick_literal(clause: Clause, a, counts: Optional[Mapping[int, int]]) -> int:
    best, best_n = 0, -1
    for lit in clause:
        if a.value(lit) is None:
            n = counts.get(lit, 0) if counts else 0
            if n > best_n:
                best, best_n = lit, n
    return best


def rrp_step(g: ProofPathGraph, cur: RrpCursor, a) -> tuple[bool, Optional[int]]:
    """One transition of the cursor.

    Returns ``(True, lit)`` when the walk yields a decision literal or gives
    up (``lit`` None), and ``(False, None)`` when another step is needed.
    """
    st = cur.state
    if st is State.EOT or st is State.EOP:
        return True, None
    d = cur.stack[-1]
    if st is State.NORM:
        status = clause_status(g.clauses[d], a)
        if status is Status.UNDETERMINED:
            # decide a literal of D false
            counts = getattr(a, "recent_literal_counts", None)
            return True, -_pick_literal(g.clauses[d], a, counts)
        cur.state = State.SAT if status is Status.SATISFIED else State.FALSE
        return False, None
    if st is State.SAT:
        if len(cur.stack) > 1:
            cur._ascend()
            cur.state = State.NORM
            return False, None
        cur.state = State.EOT
        return True, None
    kids = g.children[d] if cur.depth < cur.depth_limit else ()
    if not kids:
        cur.state = State.EOP
        return True, None
    nxt = next((k for k in kids if k not in cur.visited), None)
    if nxt is not None:
        cur._descend(nxt)
        cur.state = State.NORM
        return False, None
    if len(cur.stack) > 1:
        cur._ascend()
        cur.state = State.NORM
        return False, None
    cur.state = State.EOT
    return True, None


def rrp_next_decision(g: ProofPathGraph, cur: RrpCursor, a) -> Optional[int]:
    """Advance the cursor; return a literal to decide or None (unknown)."""
    while True:
        done, lit = rrp_step(g, cur, a)
        if done:
            return lit


def max_decision_level(clause: Clause, a) -> int:
    """Highest decision level among the assigned literals of ``clause``; -1 if none."""
    best = -1
    for lit in clause:
        lv = a.level(abs(lit))
        if lv is not None and lv > best:
            best = lv
    return best


def rrp_on_backjump(g: ProofPathGraph, cur: RrpCursor, a, bl: int) -> RrpCursor:
    """Move the cursor up to the highest path clause the backjump unassigns.

    Must be called before the solver undoes the levels above ``bl``.
    """
    if cur.state is State.EOT or cur.state is State.EOP:
        return cur
    if bl >= max_decision_level(g.clauses[cur.current], a):
        return cur
    for i, b in enumerate(cur.stack):
        if bl < max_decision_level(g.clauses[b], a):
            break
    for v in cur.visit_log[cur.marks[i]:]:
        cur.visited.discard(v)
    del cur.visit_log[cur.marks[i]:]
    del cur.stack[i + 1:]
    del cur.marks[i + 1:]
    cur.state = State.NORM
    return cur


class RrpHook:
    """Decision hook driving a solver along the paths of a proof path graph."""

    def __init__(self, g: ProofPathGraph, depth_limit: int = DEFAULT_DEPTH_LIMIT):
        self.graph = g
        self.cursor = RrpCursor.start(g, depth_limit)
        self.decisions = 0

    def next_decision(self, assignment) -> Optional[int]:
        lit = rrp_next_decision(self.graph, self.cursor, assignment)
        if lit is not None:
            self.decisions += 1
        return lit

    def on_backjump(self, assignment, level: int) -> None:
        rrp_on_backjump(self.graph, self.cursor, assignment, level)


def falsified_path(pi: Refutation, c: int, model: Mapping[int, bool]) -> Optional[list[int]]:
    """A path from ``c`` to the sink every clause of which ``model`` falsifies."""

    def falsified(v: int) -> bool:
        return all(model[abs(l)] != (l > 0) for l in pi.clauses[v])

    if not falsified(c):
        return None
    parent: dict[int, Optional[int]] = {c: None}
    todo = [c]
    while todo:
        v = todo.pop()
        if v == pi.sink:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for w in pi.succs[v]:
            if w not in parent and falsified(w):
                parent[w] = v
                todo.append(w)
    return None
