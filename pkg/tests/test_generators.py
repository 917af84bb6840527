import random

import pytest

from muckit.generators import pigeonhole, random_kcnf, random_mixed_cnf
from muckit.oracle import brute_force_sat


@pytest.mark.parametrize("holes", [1, 2, 3])
def test_pigeonhole_shape_and_unsat(holes):
    f = pigeonhole(holes)
    pigeons = holes + 1
    assert f.num_vars == pigeons * holes
    assert len(f) == pigeons + holes * pigeons * (pigeons - 1) // 2
    assert brute_force_sat(f) is None


def test_pigeonhole_minus_one_clause_is_sat():
    f = pigeonhole(3)
    for i in range(len(f)):
        assert brute_force_sat(f.subformula(j for j in range(len(f)) if j != i)) is not None


def test_pigeonhole_needs_a_hole():
    with pytest.raises(ValueError):
        pigeonhole(0)


def test_random_kcnf():
    f = random_kcnf(10, 40, 3, random.Random(1))
    assert len(f) == 40 and all(len({abs(l) for l in c}) == 3 for c in f)
    assert f == random_kcnf(10, 40, 3, random.Random(1))
    with pytest.raises(ValueError):
        random_kcnf(2, 1, 3)


def test_random_mixed_widths():
    f = random_mixed_cnf(5, 200, 4, random.Random(2))
    assert {len(c) for c in f} == {1, 2, 3, 4}
