import pytest

from occurlab import corpus, mma
from occurlab.parser import parse_equations, parse_program, parse_query, render
from occurlab.sld import (
    LEFTMOST_RULE,
    RIGHTMOST_RULE,
    ROUND_ROBIN_RULE,
    EngineError,
    available_unifications,
    check_derivation_invariants,
    derive,
    engine_solver,
    resolution_step,
    seeded_rule,
    selection_rule,
    structure_signature,
)
from occurlab.terms import Var, cons, vars_of

TINY = parse_program(
    """
    p(a).
    p(f(X)) :- p(X).
    """
)


def q0prime(n):
    return corpus.query_q0prime(n, Var("L"), cons(Var("L"), Var("A")), Var("B"))


# -- single steps -------------------------------------------------------------


def test_step_against_a_matching_fact_fails_on_clash():
    res = resolution_step(parse_query("p(f(a))"), "leftmost", 0, TINY)
    assert res.kind == "unification_failure"
    assert not res.attempt.unified
    assert res.attempt.clause_index == 0


def test_step_against_the_recursive_clause_strips_one_layer():
    res = resolution_step(parse_query("p(f(a))"), "leftmost", 1, TINY)
    assert res.kind == "child"
    assert render(res.query) == "p(a)"
    assert res.attempt.unified


def test_step_renames_the_clause_apart():
    res = resolution_step(parse_query("p(f(X))"), "leftmost", 1, TINY)
    assert res.kind == "child"
    head_vars = set(vars_of(res.renamed.head))
    assert Var("X") not in head_vars


def test_step_respects_forbidden_variables():
    forbidden = {Var("X"), Var("_G1"), Var("_G2")}
    res = resolution_step(parse_query("p(f(a))"), "leftmost", 1, TINY, forbidden=forbidden)
    assert forbidden.isdisjoint(vars_of(res.renamed))


def test_step_reports_predicate_mismatches():
    prog = parse_program("q(a).")
    assert resolution_step(parse_query("p(a)"), "leftmost", 0, prog).kind == "no_matching_head"


def test_step_rejects_the_empty_query():
    with pytest.raises(ValueError):
        resolution_step(parse_query("p(a)").__class__(()), "leftmost", 0, TINY)


# -- selection rules -----------------------------------------------------------


def test_named_rule_lookup():
    assert selection_rule("leftmost") is LEFTMOST_RULE
    assert selection_rule("rightmost") is RIGHTMOST_RULE
    assert selection_rule("round-robin") is ROUND_ROBIN_RULE
    assert selection_rule(LEFTMOST_RULE) is LEFTMOST_RULE
    assert selection_rule("seeded-random:9").name == "random:9"
    with pytest.raises(ValueError):
        selection_rule("nope")


def test_positional_rules_pick_the_expected_atom():
    q = parse_query("p(a), q(b), r(c)")
    assert LEFTMOST_RULE.factory()(q, 0) == 0
    assert RIGHTMOST_RULE.factory()(q, 0) == 2


def test_round_robin_cycles_positions():
    chooser = ROUND_ROBIN_RULE.factory()
    q = parse_query("p(a), q(b), r(c)")
    assert [chooser(q, d) for d in range(5)] == [0, 1, 2, 0, 1]


def test_seeded_rules_replay_identically():
    q = parse_query("p(a), q(b), r(c), s(d)")
    picks = lambda rule: [rule.factory()(q, d) for d in range(20)]
    assert picks(seeded_rule(5)) == picks(seeded_rule(5))
    assert picks(seeded_rule(5)) != picks(seeded_rule(6))


def test_seeded_derivations_are_deterministic(nqueens):
    a = derive(nqueens, corpus.query_qin(4), "random:3", 30)
    b = derive(nqueens, corpus.query_qin(4), "random:3", 30)
    assert structure_signature(a) == structure_signature(b)


# -- whole derivations -----------------------------------------------------------


@pytest.mark.parametrize(
    "n,nodes,success",
    [(0, 2, True), (1, 5, True), (2, 12, False), (3, 28, False), (4, 82, True)],
)
def test_board_size_determines_tree_size_and_solvability(nqueens, n, nodes, success):
    tree = derive(nqueens, corpus.query_qin(n), "leftmost", 30)
    assert tree.node_count() == nodes
    assert tree.has_success is success
    # solvability must agree with the brute-force placement count
    assert success is bool(corpus.queens_oracle(n))


def test_depth_cutoff_marks_unfinished_branches(nqueens):
    tree = derive(nqueens, corpus.query_qin(4), "leftmost", depth=3)
    statuses = {n.status for n in tree.nodes()}
    assert "depth_cutoff" in statuses
    assert not tree.has_success


def test_branch_traversal_follows_one_path(nqueens):
    full = derive(nqueens, corpus.query_qin(2), "leftmost", 30)
    branch = derive(nqueens, corpus.query_qin(2), "leftmost", 30, traversal="branch")
    assert all(len(n.children) <= 1 for n in branch.nodes())
    assert branch.node_count() <= full.node_count()
    with pytest.raises(ValueError):
        derive(nqueens, corpus.query_qin(2), "leftmost", 30, traversal="zigzag")


def test_failed_attempts_are_recorded(nqueens):
    tree = derive(nqueens, corpus.query_qin(2), "leftmost", 30)
    aus = available_unifications(tree)
    assert any(au.unified for au in aus)
    assert any(not au.unified for au in aus)
    for au in aus:
        assert au.mgu is None or mma.mgu_of(au.eqs) is not None


def test_shared_variable_queries_still_resolve(nqueens):
    tree = derive(nqueens, q0prime(1), "leftmost", 30)
    assert tree.node_count() == 58
    assert len(available_unifications(tree)) == 60
    assert tree.has_success


def test_engines_agree_on_tree_structure(nqueens):
    for query in (corpus.query_qin(1), corpus.query_qin(2), q0prime(1)):
        t_checked = derive(nqueens, query, "leftmost", 30, engine="mma")
        t_free = derive(nqueens, query, "leftmost", 30, engine="mma-minus")
        assert structure_signature(t_checked) == structure_signature(t_free)


def test_engines_agree_on_the_larger_shared_variable_query(nqueens):
    t_checked = derive(nqueens, q0prime(2), "leftmost", 30, engine="mma")
    t_free = derive(nqueens, q0prime(2), "leftmost", 30, engine="mma-minus")
    assert t_checked.node_count() == 649
    assert len(available_unifications(t_checked)) == 712
    assert structure_signature(t_checked) == structure_signature(t_free)


# -- invariant aggregation --------------------------------------------------------


def test_derivation_invariants_on_the_shared_variable_query(nqueens):
    tree = derive(nqueens, q0prime(1), "leftmost", 30)
    report = check_derivation_invariants(tree)
    assert report.as_dict() == {
        "precondition_ok": True,
        "all_atoms_linear": False,
        "first_args_ground": True,
        "all_available_nsto": "no",
        "all_have_ocf_run": "yes",
    }


def test_linear_query_keeps_every_atom_linear(nqueens):
    report = check_derivation_invariants(derive(nqueens, corpus.query_qin(2), "leftmost", 30))
    assert report.precondition_ok
    assert report.all_atoms_linear
    assert report.first_args_ground
    assert report.all_have_ocf_run == "yes"


def test_nonground_first_argument_fails_the_precondition(nqueens):
    tree = derive(nqueens, parse_query("pqs(N, L, W1, W2)"), "leftmost", depth=2)
    report = check_derivation_invariants(tree)
    assert report.as_dict() == {
        "precondition_ok": False,
        "all_atoms_linear": None,
        "first_args_ground": None,
        "all_available_nsto": "unknown",
        "all_have_ocf_run": "unknown",
    }


# -- engine behaviour on cyclic bindings -------------------------------------------


def test_checked_engine_answers_none_on_cycles():
    assert engine_solver("mma")(parse_equations("X = f(X)")) is None


def test_free_engine_raises_on_cycles():
    with pytest.raises(EngineError, match="no finite unifier"):
        engine_solver("mma-minus")(parse_equations("X = f(X)"))


def test_free_engine_raises_on_nontermination():
    e = parse_equations("X = k(X,Y), Z = Y, g(k(k(Z,Z),X)) = g(Y), Z = X, g(X) = Y")
    with pytest.raises(EngineError, match="did not terminate"):
        engine_solver("mma-minus")(e)


def test_unknown_engine_is_rejected():
    with pytest.raises(ValueError):
        engine_solver("resolution-by-vibes")
