"""Instance generators for tests and the bundled corpus."""

from __future__ import annotations

import itertools
import random
from typing import Optional

from .formula import CnfFormula


def pigeonhole(holes: int) -> CnfFormula:
    """PHP(holes+1, holes): holes+1 pigeons do not fit into ``holes`` holes.

    Variable ``p*holes + h + 1`` says pigeon p sits in hole h.
    """
    if holes < 1:
        raise ValueError("need at least one hole")
    pigeons = holes + 1

    def x(p, h):
        return p * holes + h + 1

    clauses = [tuple(x(p, h) for h in range(holes)) for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            clauses.append((-x(p, h), -x(q, h)))
    return CnfFormula(pigeons * holes, tuple(clauses))


def random_kcnf(num_vars: int, num_clauses: int, k: int = 3,
                rng: Optional[random.Random] = None) -> CnfFormula:
    """Uniform random k-CNF: k distinct variables per clause, random signs."""
    if k > num_vars:
        raise ValueError("k exceeds the number of variables")
    rng = rng or random.Random(0)
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), k)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(num_vars, tuple(clauses))


def random_mixed_cnf(num_vars: int, num_clauses: int, max_width: int = 4,
                     rng: Optional[random.Random] = None) -> CnfFormula:
    """Random CNF with clause widths 1..max_width; may repeat clauses."""
    rng = rng or random.Random(0)
    clauses = []
    for _ in range(num_clauses):
        w = rng.randint(1, min(max_width, num_vars))
        vs = rng.sample(range(1, num_vars + 1), w)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(num_vars, tuple(clauses))
