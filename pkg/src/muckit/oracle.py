"""Exhaustive ground truth for small instances.

Nothing here shares code with the CDCL solver. Satisfiability is decided by
enumerating assignments (variables ascending, false before true) and cutting
a branch as soon as some clause has all its variables assigned and is
falsified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .formula import CnfFormula

DEFAULT_BOUND = 26


class OracleBoundExceeded(ValueError):
    pass


def brute_force_sat(f: CnfFormula, bound: int = DEFAULT_BOUND) -> Optional[dict[int, bool]]:
    """A model of ``f`` (the first in enumeration order), or None if unsatisfiable."""
    return _enumerate(f.num_vars, f.clauses, bound)


def _enumerate(num_vars: int, clauses: Sequence[Sequence[int]], bound: int) -> Optional[dict[int, bool]]:
    if any(not c for c in clauses):
        return None
    # Variables in no clause cannot matter; they are left False.
    used = sorted({abs(l) for c in clauses for l in c})
    if len(used) > bound:
        raise OracleBoundExceeded(f"{len(used)} variables exceed the oracle bound {bound}")
    pos_of = {v: i for i, v in enumerate(used)}
    # clause -> (mask of positive vars, mask of negative vars), grouped by last var
    checks: list[list[tuple[int, int]]] = [[] for _ in used]
    for c in clauses:
        pos = neg = 0
        for l in c:
            bit = 1 << pos_of[abs(l)]
            if l > 0:
                pos |= bit
            else:
                neg |= bit
        checks[max(pos_of[abs(l)] for l in c)].append((pos, neg))

    n = len(used)
    trues = _search(0, 0, n, checks)
    if trues is None:
        return None
    model = {v: False for v in range(1, num_vars + 1)}
    for i, v in enumerate(used):
        model[v] = bool(trues >> i & 1)
    return model


def _search(i: int, trues: int, n: int, checks) -> Optional[int]:
    if i == n:
        return trues
    for m in (trues, trues | (1 << i)):
        # every clause whose variables are now all assigned needs a true literal
        if all((pos & m) or (neg & ~m) for pos, neg in checks[i]):
            r = _search(i + 1, m, n, checks)
            if r is not None:
                return r
    return None


@dataclass(frozen=True)
class Minimal:
    pass


@dataclass(frozen=True)
class NotUnsat:
    model: dict[int, bool]


@dataclass(frozen=True)
class NotMinimal:
    witness: int


MucVerdict = Union[Minimal, NotUnsat, NotMinimal]


def check_muc(f: CnfFormula, core: Iterable[int], bound: int = DEFAULT_BOUND) -> MucVerdict:
    """Is ``core`` (clause indices of ``f``) a minimal unsatisfiable core?

    A NotMinimal witness is the lowest index whose removal keeps the core
    unsatisfiable.
    """
    idx = sorted(set(core))
    for i in idx:
        if not 0 <= i < len(f):
            raise IndexError(f"core index {i} out of range")
    model = _enumerate(f.num_vars, [f.clauses[i] for i in idx], bound)
    if model is not None:
        return NotUnsat(model)
    for i in idx:
        rest = [f.clauses[j] for j in idx if j != i]
        if _enumerate(f.num_vars, rest, bound) is None:
            return NotMinimal(i)
    return Minimal()
