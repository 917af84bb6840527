import io

import pytest
from hypothesis import given, strategies as st

from muckit.formula import (Assignment, CnfFormula, DimacsError, Status, clause_status,
                            emit_dimacs, make_clause, parse_dimacs, read_dimacs, satisfies)

FIG1_TEXT = "p cnf 4 7\n1 4 -2 0\n1 4 2 0\n1 2 -4 0\n-3 2 0\n-1 3 0\n-1 -3 0\n-2 0\n"


def test_parse_worked_example(fig1):
    f = parse_dimacs(FIG1_TEXT)
    assert f.num_vars == 4
    assert len(f) == 7
    assert f == fig1


def test_parse_empty_formula():
    f = parse_dimacs("p cnf 0 0\n")
    assert f.num_vars == 0 and f.clauses == ()


def test_parse_accepts_file_objects_comments_and_wrapped_clauses():
    f = parse_dimacs(io.StringIO("c hello\np cnf 3 2\n1 -2\n 3 0 -1\n0\n"))
    assert f.clauses == ((1, -2, 3), (-1,))


def test_parse_empty_clause():
    assert parse_dimacs("p cnf 1 2\n1 0\n0\n").clauses == ((1,), ())


def test_duplicate_literals_are_merged():
    assert parse_dimacs("p cnf 2 1\n1 2 1 0\n").clauses == ((1, 2),)


@pytest.mark.parametrize("text, msg", [
    ("1 2 0\n", "header"),
    ("p cnf 2 1\n1 3 0\n", "exceeds"),
    ("p cnf 2 2\n1 2 0\n", "declares 2"),
    ("p cnf 2 1\n1 -1 0\n", "tautolog"),
    ("p cnf 2 1\n1 2\n", "not terminated"),
    ("p cnf 2 1\n1 x 0\n", "non-integer"),
    ("p dnf 2 1\n1 0\n", "malformed"),
    ("p cnf 2 1\np cnf 2 1\n1 0\n", "second header"),
])
def test_parse_errors(text, msg):
    with pytest.raises(DimacsError, match=msg):
        parse_dimacs(text)


def test_make_clause():
    assert make_clause([3, -1, 3]) == (3, -1)
    with pytest.raises(ValueError):
        make_clause([1, 0])
    with pytest.raises(ValueError):
        make_clause([2, -2])


def test_formula_rejects_out_of_range_literals():
    with pytest.raises(ValueError):
        CnfFormula(2, ((1, 3),))


def test_from_clauses_infers_num_vars():
    f = CnfFormula.from_clauses([[1, -5], [2]])
    assert f.num_vars == 5
    assert f.subformula([1]).clauses == ((2,),)


def test_emit_includes_comments_then_header(fig1):
    text = emit_dimacs(fig1, ["core of x by crr"])
    assert text.splitlines()[0] == "c core of x by crr"
    assert text.splitlines()[1] == "p cnf 4 7"
    assert parse_dimacs(text) == fig1


def test_read_dimacs(tmp_path):
    p = tmp_path / "a.cnf"
    p.write_text(FIG1_TEXT)
    assert len(read_dimacs(p)) == 7


clauses_st = st.lists(
    st.sets(st.integers(1, 6), min_size=0, max_size=4).flatmap(
        lambda vs: st.tuples(*[st.sampled_from([v, -v]) for v in sorted(vs)])),
    max_size=12)


@given(clauses_st)
def test_dimacs_round_trip(clauses):
    f = CnfFormula(6, tuple(clauses))
    assert parse_dimacs(emit_dimacs(f)) == f


def test_assignment_and_clause_status():
    a = Assignment()
    assert clause_status((1, 2), a) is Status.UNDETERMINED
    a.assign(1, False, 0)
    assert a.value(-1) is True and a.value(1) is False and a.level(1) == 0
    assert clause_status((1, 2), a) is Status.UNDETERMINED
    a.assign(2, False, 3)
    assert clause_status((1, 2), a) is Status.FALSIFIED
    assert clause_status((1, -2), a) is Status.SATISFIED
    assert clause_status((), a) is Status.FALSIFIED
    with pytest.raises(ValueError):
        a.assign(2, True)
    a.unassign(2)
    assert a.value(2) is None and 2 not in a and len(a) == 1


def test_satisfies():
    assert satisfies({1: True, 2: False}, [(1,), (-2, 1)])
    assert not satisfies({1: True, 2: False}, [(2,)])
