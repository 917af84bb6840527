"""CNF data model, assignments and DIMACS text I/O.

Literals are signed integers in the DIMACS convention: ``v`` is the positive
literal of variable ``v`` and ``-v`` its negation. A clause is a tuple of
literals; the empty tuple is the empty clause.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, TextIO

Literal = int
Clause = tuple[int, ...]


class DimacsError(ValueError):
    """Raised for malformed DIMACS input."""


def var(lit: Literal) -> int:
    return lit if lit > 0 else -lit


def negate(lit: Literal) -> Literal:
    return -lit


def make_clause(lits: Iterable[int]) -> Clause:
    """Normalize ``lits``: drop repeated literals, keep first-occurrence order.

    Raises ValueError on a zero literal or a tautology.
    """
    out: list[int] = []
    seen: set[int] = set()
    for lit in lits:
        if lit == 0:
            raise ValueError("0 is not a literal")
        if -lit in seen:
            raise ValueError(f"tautological clause: contains {lit} and {-lit}")
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return tuple(out)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        for i, c in enumerate(self.clauses):
            for lit in c:
                if lit == 0 or var(lit) > self.num_vars:
                    raise ValueError(f"clause {i}: literal {lit} out of range 1..{self.num_vars}")

    @classmethod
    def from_clauses(cls, clauses: Iterable[Iterable[int]], num_vars: Optional[int] = None) -> "CnfFormula":
        cs = tuple(make_clause(c) for c in clauses)
        if num_vars is None:
            num_vars = max((var(l) for c in cs for l in c), default=0)
        return cls(num_vars, cs)

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __getitem__(self, index: int) -> Clause:
        return self.clauses[index]

    def subformula(self, indices: Iterable[int]) -> "CnfFormula":
        """Clauses at ``indices`` (ascending), over the same variable range."""
        return CnfFormula(self.num_vars, tuple(self.clauses[i] for i in sorted(indices)))


class Status(enum.Enum):
    SATISFIED = "satisfied"
    FALSIFIED = "falsified"
    UNDETERMINED = "undetermined"


class Assignment:
    """Partial assignment with a decision level per assigned variable."""

    def __init__(self, values: Optional[dict[int, bool]] = None, levels: Optional[dict[int, int]] = None):
        self._values: dict[int, bool] = {}
        self._levels: dict[int, int] = {}
        for v, b in (values or {}).items():
            self.assign(v, b, (levels or {}).get(v, 0))

    def assign(self, v: int, value: bool, level: int = 0) -> None:
        if v < 1:
            raise ValueError("variables are positive integers")
        if v in self._values and self._values[v] != value:
            raise ValueError(f"variable {v} already assigned {self._values[v]}")
        if level < 0:
            raise ValueError("decision levels are non-negative")
        self._values[v] = bool(value)
        self._levels[v] = level

    def unassign(self, v: int) -> None:
        self._values.pop(v, None)
        self._levels.pop(v, None)

    def value(self, lit: Literal) -> Optional[bool]:
        """Truth value of ``lit``; None when its variable is unassigned."""
        b = self._values.get(var(lit))
        if b is None:
            return None
        return b if lit > 0 else not b

    def level(self, v: int) -> Optional[int]:
        return self._levels.get(v)

    def __contains__(self, v: int) -> bool:
        return v in self._values

    def __len__(self) -> int:
        return len(self._values)

    def as_dict(self) -> dict[int, bool]:
        return dict(self._values)

    def __repr__(self) -> str:
        return f"Assignment({self._values!r})"


def clause_status(clause: Sequence[int], a) -> Status:
    """Status of ``clause`` under ``a`` (anything with a ``value(lit)`` method).

    The empty clause is always falsified.
    """
    undetermined = False
    for lit in clause:
        b = a.value(lit)
        if b is None:
            undetermined = True
        elif b:
            return Status.SATISFIED
    return Status.UNDETERMINED if undetermined else Status.FALSIFIED


def satisfies(model: dict[int, bool], clauses: Iterable[Sequence[int]]) -> bool:
    """Literal check of a total model against every clause."""
    for c in clauses:
        if not any(model[var(l)] == (l > 0) for l in c):
            return False
    return True


def parse_dimacs(text: str | TextIO) -> CnfFormula:
    if not isinstance(text, str):
        text = text.read()
    header: Optional[tuple[int, int]] = None
    clauses: list[Clause] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise DimacsError(f"line {lineno}: second header")
            fields = line.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: non-integer token {tok!r}") from None
            if lit == 0:
                try:
                    clauses.append(make_clause(current))
                except ValueError as e:
                    raise DimacsError(f"line {lineno}: clause {len(clauses) + 1}: {e}") from None
                current = []
                continue
            if var(lit) > header[0]:
                raise DimacsError(f"line {lineno}: literal {lit} exceeds declared {header[0]} variables")
            current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise DimacsError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses))


def read_dimacs(path) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh.read())


def emit_dimacs(f: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    for c in f.clauses:
        lines.append(" ".join(map(str, c + (0,))))
    return "\n".join(lines) + "\n"
