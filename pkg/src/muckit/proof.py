"""Proof logs: per-clause antecedent lists, and the text trace format.

Trace format, one entry per line::

    <id> <lit>... 0 <antecedent-id>... 0

Source clauses have an empty antecedent section. Antecedents are listed in
resolution order: resolving them left to right reproduces the clause.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

from .formula import Clause


class ProofError(ValueError):
    pass


@dataclass(frozen=True)
class ProofEntry:
    id: int
    clause: Clause
    antecedents: tuple[int, ...] = ()

    @property
    def is_source(self) -> bool:
        return not self.antecedents


@dataclass
class ProofLog:
    entries: list[ProofEntry] = field(default_factory=list)

    def add(self, id: int, clause: Iterable[int], antecedents: Iterable[int] = ()) -> ProofEntry:
        e = ProofEntry(id, tuple(clause), tuple(antecedents))
        self.entries.append(e)
        return e

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def last(self) -> ProofEntry:
        return self.entries[-1]

    def sources(self) -> list[int]:
        return [e.id for e in self.entries if e.is_source]

    def check_structure(self) -> None:
        """Ids unique, antecedents known and strictly earlier, last entry empty."""
        seen: set[int] = set()
        for e in self.entries:
            if e.id in seen:
                raise ProofError(f"duplicate id {e.id}")
            for a in e.antecedents:
                if a not in seen:
                    raise ProofError(f"entry {e.id}: antecedent {a} unknown or not earlier")
                if a >= e.id:
                    raise ProofError(f"entry {e.id}: antecedent {a} does not precede it")
            seen.add(e.id)
        if not self.entries or self.entries[-1].clause:
            raise ProofError("last entry is not the empty clause")

    def dumps(self) -> str:
        out = []
        for e in self.entries:
            out.append(" ".join(map(str, (e.id, *e.clause, 0, *e.antecedents, 0))))
        return "\n".join(out) + ("\n" if out else "")

    def write(self, fh: TextIO) -> None:
        fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "ProofLog":
        log = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("c"):
                continue
            try:
                nums = [int(t) for t in line.split()]
            except ValueError:
                raise ProofError(f"line {lineno}: non-integer token") from None
            if len(nums) < 3 or nums[-1] != 0:
                raise ProofError(f"line {lineno}: expected '<id> <lit>... 0 <ant>... 0'")
            try:
                mid = nums.index(0, 1)
            except ValueError:
                raise ProofError(f"line {lineno}: missing clause terminator") from None
            if mid == len(nums) - 1:
                raise ProofError(f"line {lineno}: missing antecedent section")
            ants = nums[mid + 1:-1]
            if 0 in ants:
                raise ProofError(f"line {lineno}: stray 0 in antecedents")
            log.add(nums[0], nums[1:mid], ants)
        return log

    @classmethod
    def read(cls, path) -> "ProofLog":
        with open(path) as fh:
            return cls.loads(fh.read())


def resolve_chain(clauses: Sequence[Sequence[int]]) -> Optional[frozenset[int]]:
    """Sequentially resolve ``clauses`` left to right.

    Each step must clash on exactly one variable. Returns the final resolvent,
    or None if some step has no pivot or more than one.
    """
    if not clauses:
        return None
    acc = set(clauses[0])
    for c in clauses[1:]:
        pivots = [l for l in c if -l in acc]
        if len(pivots) != 1:
            return None
        p = pivots[0]
        acc.discard(-p)
        acc.update(l for l in c if l != p)
    return frozenset(acc)
