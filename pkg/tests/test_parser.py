import random

import pytest
from hypothesis import given, strategies as st

from occurlab import gen
from occurlab.parser import (
    ArityConflictError,
    ParseError,
    parse_equations,
    parse_program,
    parse_query,
    render,
)
from occurlab.terms import Compound, Var, cons, vars_of


def test_round_trip_simple_term():
    e = parse_equations("f(X, g(a, Y)) = Z")
    assert render(e) == "f(X,g(a,Y)) = Z"


def test_lists_parse_to_cons_cells():
    e = parse_equations("L = [a, b | T]")
    eq = e.equations[0]
    assert eq.rhs == cons(Compound("a"), cons(Compound("b"), Var("T")))


def test_empty_list_is_nil_constant():
    e = parse_equations("L = []")
    assert render(e.equations[0].rhs) == "[]"


def test_each_underscore_is_a_distinct_fresh_variable():
    e = parse_equations("p(_, _) = p(X, Y)")
    lhs = e.equations[0].lhs
    u, v = lhs.args
    assert isinstance(u, Var) and isinstance(v, Var)
    assert u != v
    # anonymous variables never collide with named ones elsewhere
    assert u not in vars_of(e.equations[0].rhs)


def test_program_clauses_and_comments():
    prog = parse_program(
        """
        % facts
        p(a).
        p(X) :- q(X), r(X).  % rule
        """
    )
    assert len(prog.clauses) == 2
    assert prog.clauses[0].body == ()
    assert [a.predicate for a in prog.clauses[1].body] == ["q", "r"]


def test_query_parses_conjunction():
    q = parse_query("p(X), q(f(X))")
    assert len(q.atoms) == 2


def test_arity_conflict_is_rejected():
    with pytest.raises(ArityConflictError):
        parse_program("p(a). p(a,b).")


def test_same_functor_different_arity_in_terms_rejected():
    with pytest.raises(ArityConflictError):
        parse_equations("X = f(a), Y = f(a,b)")


def test_unbalanced_parens_raise_parse_error():
    with pytest.raises(ParseError):
        parse_equations("X = f(a")


def test_missing_equals_raises_parse_error():
    with pytest.raises(ParseError):
        parse_equations("f(a)")


def test_reserved_names_rejected_by_default():
    with pytest.raises(ParseError):
        parse_equations("_G1 = a")


def test_reserved_names_allowed_when_opted_in():
    e = parse_equations("_G1 = a", allow_reserved=True)
    assert e.equations[0].lhs == Var("_G1")


@st.composite
def equation_sets(draw):
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    return gen.random_equation_set(rng, max_eqs=4, max_vars=3, depth=3)


@given(equation_sets())
def test_render_parse_round_trip(eqs):
    assert parse_equations(render(eqs)) == eqs


def test_round_trip_covers_fresh_names():
    from occurlab.terms import rename_apart

    e = parse_equations("p(X, Y) = p(Y, X)")
    renamed, _ = rename_apart(e, vars_of(e))
    again = parse_equations(render(renamed), allow_reserved=True)
    assert again == renamed
