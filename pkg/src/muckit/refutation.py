"""Resolution refutation DAGs and the graph operations core extraction needs.

A :class:`Refutation` holds vertices (clauses) with ordered antecedent lists.
Initial vertices have no antecedents; each of them carries a *source key*
linking it to the clause it came from (a clause index of the input formula
for a refutation of that formula, or a vertex id of an enclosing refutation
for a sub-solve's refutation). Conflict vertices are reproducible by
resolving their antecedents left to right.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

from .formula import Clause, CnfFormula
from .proof import ProofError, ProofLog, resolve_chain


class RefutationError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    vertex: Optional[int]
    detail: str

    def __str__(self) -> str:
        where = f" at {self.vertex}" if self.vertex is not None else ""
        return f"{self.kind}{where}: {self.detail}"


class Refutation:
    """Immutable refutation DAG. Vertex ids ascend along derivation order."""

    __slots__ = ("clauses", "preds", "succs", "sink", "source_map", "next_id")

    def __init__(self, clauses: Mapping[int, Clause], preds: Mapping[int, tuple[int, ...]],
                 sink: int, source_map: Mapping[int, int], next_id: Optional[int] = None):
        self.clauses = dict(clauses)
        self.preds = {v: tuple(preds.get(v, ())) for v in self.clauses}
        succs: dict[int, list[int]] = {v: [] for v in self.clauses}
        for v in sorted(self.clauses):
            for u in self.preds[v]:
                if u not in succs:
                    raise RefutationError(f"vertex {v}: antecedent {u} unknown")
                succs[u].append(v)
        self.succs = {v: tuple(s) for v, s in succs.items()}
        if sink not in self.clauses:
            raise RefutationError(f"sink {sink} is not a vertex")
        self.sink = sink
        self.source_map = dict(source_map)
        self.next_id = next_id if next_id is not None else max(self.clauses, default=0) + 1

    # -- views -------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.clauses)

    def __contains__(self, v: int) -> bool:
        return v in self.clauses

    @property
    def vertices(self) -> list[int]:
        return sorted(self.clauses)

    def is_initial(self, v: int) -> bool:
        return not self.preds[v]

    @property
    def initial(self) -> list[int]:
        return [v for v in sorted(self.clauses) if not self.preds[v]]

    @property
    def conflict(self) -> list[int]:
        return [v for v in sorted(self.clauses) if self.preds[v]]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for v in sorted(self.clauses) for u in self.preds[v]]

    def core(self) -> list[int]:
        """Source keys of the initial vertices."""
        return sorted(self.source_map[v] for v in self.initial)

    def vertex_of(self, key: int) -> int:
        for v, k in self.source_map.items():
            if k == key and v in self.clauses and not self.preds[v]:
                return v
        raise KeyError(key)

    # -- (de)serialization -------------------------------------------------

    def to_proof(self) -> ProofLog:
        log = ProofLog()
        for v in sorted(self.clauses):
            log.add(v, self.clauses[v], self.preds[v])
        return log

    def to_dot(self, name: str = "refutation") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for v in sorted(self.clauses):
            label = " ∨ ".join(_fmt_lit(l) for l in self.clauses[v]) or "□"
            if self.preds[v]:
                shape = "box"
            else:
                shape = "ellipse"
                label += f"\\n[{self.source_map.get(v, '?')}]"
            lines.append(f'  v{v} [label="{label}", shape={shape}];')
        for u, v in self.edges():
            lines.append(f"  v{u} -> v{v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _fmt_lit(l: int) -> str:
    return f"¬x{-l}" if l < 0 else f"x{l}"


def from_proof(proof: ProofLog, source_key: Callable[[int], int] = lambda i: i,
               check: bool = True) -> Refutation:
    """Refutation whose vertices are exactly the entries of ``proof``.

    ``source_key`` maps a source entry's id to its key. With ``check`` the
    resolution of every derived entry is replayed.
    """
    try:
        proof.check_structure()
    except ProofError as e:
        raise RefutationError(str(e)) from None
    clauses: dict[int, Clause] = {}
    preds: dict[int, tuple[int, ...]] = {}
    source_map: dict[int, int] = {}
    for e in proof:
        clauses[e.id] = e.clause
        preds[e.id] = tuple(dict.fromkeys(e.antecedents))
        if e.is_source:
            source_map[e.id] = source_key(e.id)
    if check:
        for e in proof:
            if e.antecedents:
                got = resolve_chain([clauses[a] for a in e.antecedents])
                if got is None or got != frozenset(e.clause):
                    raise RefutationError(f"entry {e.id}: antecedents do not resolve to its clause")
    return Refutation(clauses, preds, proof.last.id, source_map)


def build(f: CnfFormula, proof: ProofLog, check: bool = True) -> Refutation:
    """Refutation of ``f`` from a proof whose source ids are ``index + 1``.

    Clauses of ``f`` the proof never references become isolated initial
    vertices; :func:`trim` removes them.
    """
    for e in proof:
        if e.is_source:
            if not 1 <= e.id <= len(f):
                raise RefutationError(f"source {e.id} is not a clause of the formula")
            if frozenset(e.clause) != frozenset(f.clauses[e.id - 1]):
                raise RefutationError(f"source {e.id} differs from clause {e.id - 1} of the formula")
        elif e.id <= len(f):
            raise RefutationError(f"derived entry {e.id} uses an id reserved for formula clauses")
    pi = from_proof(proof, lambda i: i - 1, check)
    missing = [i for i in range(len(f)) if i + 1 not in pi.clauses]
    if not missing:
        return pi
    clauses = dict(pi.clauses)
    preds = dict(pi.preds)
    source_map = dict(pi.source_map)
    for i in missing:
        clauses[i + 1] = f.clauses[i]
        preds[i + 1] = ()
        source_map[i + 1] = i
    return Refutation(clauses, preds, pi.sink, source_map, max(pi.next_id, len(f) + 1))


def _walk(adj: Mapping[int, tuple[int, ...]], start: int) -> set[int]:
    out = {start}
    todo = [start]
    while todo:
        for w in adj[todo.pop()]:
            if w not in out:
                out.add(w)
                todo.append(w)
    return out


def reachable(pi: Refutation, v: int) -> set[int]:
    """Vertices with a path (of zero or more edges) from ``v``."""
    if v not in pi.clauses:
        raise KeyError(v)
    return _walk(pi.succs, v)


def backward_reachable(pi: Refutation, v: int) -> set[int]:
    """Vertices with a path to ``v``."""
    if v not in pi.clauses:
        raise KeyError(v)
    return _walk(pi.preds, v)


def restrict(pi: Refutation, keep: Iterable[int]) -> Refutation:
    keep = set(keep)
    if pi.sink not in keep:
        raise RefutationError("restriction must keep the sink")
    return Refutation({v: pi.clauses[v] for v in keep},
                      {v: tuple(u for u in pi.preds[v] if u in keep) for v in keep},
                      pi.sink, {v: k for v, k in pi.source_map.items() if v in keep}, pi.next_id)


def trim(pi: Refutation) -> Refutation:
    """Restrict to the vertices with a path to the sink."""
    keep = backward_reachable(pi, pi.sink)
    if len(keep) == len(pi.clauses):
        return pi
    return restrict(pi, keep)


def is_non_redundant(pi: Refutation) -> bool:
    return len(backward_reachable(pi, pi.sink)) == len(pi.clauses)


def relative_hardness(pi: Refutation) -> Fraction:
    """Total number of clauses over the number of initial clauses."""
    n_init = len(pi.initial)
    if n_init == 0:
        raise RefutationError("refutation has no initial clauses")
    return Fraction(len(pi.clauses), n_init)


def validate(pi: Refutation, f: Optional[CnfFormula] = None) -> list[Violation]:
    """All violations of the refutation conditions; an empty list means valid.

    With ``f``, initial vertices must also be clauses of ``f`` under the
    source map.
    """
    out: list[Violation] = []
    # acyclicity (Kahn) and derivation order
    indeg = {v: len(p) for v, p in pi.preds.items()}
    queue = deque(v for v, d in indeg.items() if d == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for w in pi.succs[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if seen != len(pi.clauses):
        out.append(Violation("cycle", None, "graph is not acyclic"))
    for v, ps in pi.preds.items():
        for u in ps:
            if u >= v:
                out.append(Violation("order", v, f"antecedent {u} does not precede {v}"))
    empties = [v for v, c in pi.clauses.items() if not c]
    if empties != [pi.sink]:
        if len(empties) > 1:
            out.append(Violation("multiple sinks", None, f"empty clauses at {sorted(empties)}"))
        if pi.sink not in empties:
            out.append(Violation("sink", pi.sink, "sink is not the empty clause"))
    if pi.succs[pi.sink]:
        out.append(Violation("sink", pi.sink, "sink has outgoing edges"))
    for v in pi.initial:
        if v not in pi.source_map:
            out.append(Violation("source", v, "initial vertex has no source key"))
        elif f is not None:
            k = pi.source_map[v]
            if not 0 <= k < len(f) or frozenset(f.clauses[k]) != frozenset(pi.clauses[v]):
                out.append(Violation("source", v, f"does not match clause {k} of the formula"))
    for v in pi.conflict:
        got = resolve_chain([pi.clauses[u] for u in pi.preds[v]])
        if got is None or got != frozenset(pi.clauses[v]):
            out.append(Violation("bad derivation", v, "antecedents do not resolve to the clause"))
    return out


def splice(pi: Refutation, c: int, sub: Refutation, check: bool = True) -> Refutation:
    """Replace the part of ``pi`` reachable from initial vertex ``c`` by ``sub``.

    ``sub`` refutes the vertices of ``pi`` unreachable from ``c``; its source
    keys are vertex ids of ``pi``. Its conflict vertices get fresh ids. The
    result is trimmed.
    """
    if c not in pi.clauses or not pi.is_initial(c):
        raise RefutationError(f"{c} is not an initial vertex")
    gone = reachable(pi, c)
    for v in sub.initial:
        key = sub.source_map.get(v)
        if key is None or key not in pi.clauses or key in gone:
            raise RefutationError(f"sub-refutation source {v} (key {key}) is not outside the cone of {c}")
        if frozenset(sub.clauses[v]) != frozenset(pi.clauses[key]):
            raise RefutationError(f"sub-refutation source {v} differs from vertex {key}")
    if check:
        bad = validate(sub)
        if bad:
            raise RefutationError(f"sub-refutation invalid: {bad[0]}")
    if sub.is_initial(sub.sink):
        raise RefutationError("sub-refutation sink is an initial vertex")
    clauses = {v: cl for v, cl in pi.clauses.items() if v not in gone}
    preds = {v: pi.preds[v] for v in clauses}
    rename: dict[int, int] = {v: sub.source_map[v] for v in sub.initial}
    nid = pi.next_id
    for v in sub.conflict:
        rename[v] = nid
        clauses[nid] = sub.clauses[v]
        preds[nid] = tuple(rename[u] for u in sub.preds[v])
        nid += 1
    source_map = {v: k for v, k in pi.source_map.items() if v in clauses}
    return trim(Refutation(clauses, preds, rename[sub.sink], source_map, nid))


def export_proof(pi: Refutation, num_clauses: int) -> ProofLog:
    """Trace of ``pi`` in formula numbering: sources ``key + 1``, derived above ``num_clauses``.

    Source keys must be clause indices of the formula.
    """
    ids: dict[int, int] = {}
    nid = num_clauses + 1
    log = ProofLog()
    for v in sorted(pi.clauses):
        if pi.preds[v]:
            ids[v] = nid
            nid += 1
        else:
            ids[v] = pi.source_map[v] + 1
    for v in sorted(pi.initial, key=ids.__getitem__):
        log.add(ids[v], pi.clauses[v])
    for v in pi.conflict:
        log.add(ids[v], pi.clauses[v], [ids[u] for u in pi.preds[v]])
    return log
