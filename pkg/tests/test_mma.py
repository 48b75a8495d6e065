import random

import pytest
from hypothesis import given, settings, strategies as st

from occurlab import gen
from occurlab.mma import (
    ADVERSARIAL,
    EAGER_BIND,
    LEFTMOST,
    RIGHTMOST,
    applicable_actions,
    canonical_key,
    enumerate_runs,
    exists_ocf_run,
    extract_mgu,
    is_nsto,
    is_solved,
    make_state,
    mgu_of,
    run,
    seeded_strategy,
    step,
    strategy,
)
from occurlab.parser import parse_equations, render
from occurlab.terms import (
    Equation,
    EquationSet,
    Substitution,
    Var,
    apply,
    equal_up_to_renaming,
    rename_apart,
    vars_of,
)


def eqs(text):
    return parse_equations(text)


def actions_at(text):
    return applicable_actions(make_state(eqs(text)))


def kinds(text):
    return {(a.pos, a.kind) for a in actions_at(text)}


# -- individual transitions ------------------------------------------------


def test_at_most_one_action_per_position():
    for text in (
        "f(X) = f(a), X = X, g(a) = g(b), X = f(X), f(a) = X",
        "X = Y, Y = X, a = a",
    ):
        acts = actions_at(text)
        positions = [a.pos for a in acts]
        assert len(positions) == len(set(positions))


def test_decompose_splits_into_argument_equations():
    assert kinds("f(X, a) = f(b, Y)") == {(0, "decompose")}
    state = step(make_state(eqs("f(X, a) = f(b, Y)")), actions_at("f(X, a) = f(b, Y)")[0])
    assert render(state.eqs) == "X = b, a = Y"


def test_decompose_of_constants_yields_empty_set():
    state = step(make_state(eqs("a = a")), actions_at("a = a")[0])
    assert len(state.eqs.equations) == 0


def test_clash_on_distinct_functors():
    assert kinds("f(X) = g(X)") == {(0, "clash")}
    state = step(make_state(eqs("f(X) = g(X)")), actions_at("f(X) = g(X)")[0])
    assert state.status == "failed_clash"


def test_clash_on_distinct_arities_is_impossible_by_construction():
    # the parser enforces one arity per functor, so a clash can only be
    # a genuine symbol mismatch
    from occurlab.parser import ArityConflictError

    with pytest.raises(ArityConflictError):
        eqs("f(X) = f(a, b)")


def test_delete_only_on_identical_variables():
    assert kinds("X = X") == {(0, "delete")}
    assert kinds("X = Y") != {(0, "delete")}


def test_orient_swaps_nonvariable_to_the_right():
    assert kinds("f(a) = X") == {(0, "orient")}
    state = step(make_state(eqs("f(a) = X")), actions_at("f(a) = X")[0])
    assert render(state.eqs) == "X = f(a)"


def test_eliminate_requires_occurrence_elsewhere():
    # X appears only in its own equation: nothing to substitute into
    assert kinds("X = f(a)") == set()
    assert (0, "eliminate") in kinds("X = f(a), Y = g(X)")


def test_eliminate_substitutes_everywhere_else():
    e = eqs("X = f(a), Y = g(X), g(X) = Z")
    acts = applicable_actions(make_state(e))
    elim = next(a for a in acts if a.kind == "eliminate")
    state = step(make_state(e), elim)
    assert render(state.eqs) == "X = f(a), Y = g(f(a)), g(f(a)) = Z"


def test_occur_halt_guard():
    assert kinds("X = f(X)") == {(0, "occur_halt")}
    e = eqs("X = f(X)")
    state = step(make_state(e), actions_at("X = f(X)")[0])
    assert state.status == "failed_occur"


def test_variable_pair_is_eliminate_not_occur_halt():
    assert kinds("X = Y, Y = X") == {(0, "eliminate"), (1, "eliminate")}


# -- full runs --------------------------------------------------------------


def test_run_solves_and_extracted_mgu_unifies_input():
    e = eqs("f(X, g(Y)) = f(g(a), g(b))")
    tr = run(e)
    assert tr.status == "solved"
    sigma = extract_mgu(tr.final)
    for q in e:
        assert apply(sigma, q.lhs) == apply(sigma, q.rhs)


def test_run_fails_on_clash():
    assert run(eqs("f(a) = f(b)")).status == "failed_clash"


def test_run_halts_on_occur_check():
    assert run(eqs("X = f(X)")).status == "failed_occur"


def test_solved_form_is_fixed_point():
    tr = run(eqs("X = a, Y = b"))
    assert is_solved(tr.final.eqs)
    assert applicable_actions(tr.final) == []


def test_mgu_of_returns_none_for_non_unifiable():
    assert mgu_of(eqs("f(a) = f(b)")) is None
    assert mgu_of(eqs("X = f(X)")) is None


def test_strategies_agree_on_the_answer():
    e = eqs("f(X, Y, Z) = f(g(Y), g(Z), a)")
    answers = []
    for strat in (LEFTMOST, RIGHTMOST, EAGER_BIND, ADVERSARIAL, seeded_strategy(11)):
        tr = run(e, strat)
        assert tr.status == "solved"
        answers.append(extract_mgu(tr.final))
    assert all(equal_up_to_renaming(s, answers[0]) for s in answers)


def test_seeded_strategy_replays_identically():
    e = eqs("f(X, Y) = f(g(Y), a), h(Z, b) = h(b, b)")
    t1 = run(e, seeded_strategy(3))
    t2 = run(e, seeded_strategy(3))
    assert [s.action for s in t1.steps] == [s.action for s in t2.steps]


def test_strategy_lookup_by_name():
    assert strategy("leftmost-first") is LEFTMOST
    assert strategy("seeded-random:7").name.endswith("7")
    assert strategy(7).name == strategy("seeded-random:7").name
    with pytest.raises(ValueError):
        strategy("no-such-strategy")


# -- run-graph queries -------------------------------------------------------


def test_enumerate_runs_sees_success_and_occur_halt():
    # one schedule eliminates Y first and halts on the cycle, another
    # clashes first: both flavors must be visible in the run graph
    summary = enumerate_runs(eqs("Y = f(Y), f(a) = f(b)"))
    assert summary.any_occur_halt
    assert not summary.any_success


def test_enumerate_runs_collects_all_mgus_up_to_renaming():
    summary = enumerate_runs(eqs("X = Y, Y = Z"))
    assert summary.any_success
    assert summary.mgus
    assert all(equal_up_to_renaming(m, summary.mgus[0]) for m in summary.mgus)


def test_is_nsto_verdicts():
    assert is_nsto(eqs("f(X) = f(a)")) == "yes"
    assert is_nsto(eqs("X = f(X)")) == "no"
    assert is_nsto(eqs("p(X, X) = p(Y, f(Y))")) == "no"


def test_is_nsto_unknown_when_bound_too_small():
    big = eqs("p(X1,X2,X3,X4) = p(f1(X2),f2(X3),f3(X4),f4(a))")
    assert is_nsto(big, bound=2) == "unknown"


def test_exists_ocf_run_witness_avoids_the_occur_check():
    w = exists_ocf_run(eqs("Y = f(Y), f(a) = f(b)"))
    assert w.verdict == "found"
    assert all(s.action.kind != "occur_halt" for s in w.trace.steps)
    assert w.trace.status == "failed_clash"


def test_exists_ocf_run_none_when_every_schedule_hits_the_check():
    assert exists_ocf_run(eqs("X = f(X)")).verdict == "none"


def test_nsto_implies_ocf_run_exists():
    e = eqs("f(X, Y) = f(a, g(b))")
    assert is_nsto(e) == "yes"
    assert exists_ocf_run(e).verdict == "found"


# -- canonical keys ----------------------------------------------------------


def test_canonical_key_ignores_order_and_names():
    e1 = eqs("X = f(Y), Y = a")
    e2 = eqs("V = a, U = f(V)")
    assert canonical_key(e1) == canonical_key(e2)


def test_canonical_key_distinguishes_structure():
    assert canonical_key(eqs("X = f(Y)")) != canonical_key(eqs("X = g(Y)"))
    assert canonical_key(eqs("X = f(X)")) != canonical_key(eqs("X = f(Y)"))


def test_canonical_key_respects_tagged_variables():
    e = eqs("X = f(Y)")
    assert canonical_key(e, [Var("X")]) != canonical_key(e, [Var("Y")])
    assert canonical_key(e, []) == canonical_key(e)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=120, deadline=None)
def test_canonical_key_invariant_under_renaming_and_shuffling(seed):
    rng = random.Random(seed)
    e = gen.random_equation_set(rng, max_eqs=4, max_vars=3, depth=2)
    renamed, _ = rename_apart(e, vars_of(e))
    shuffled = list(renamed.equations)
    rng.shuffle(shuffled)
    assert canonical_key(e) == canonical_key(EquationSet(shuffled))


# -- agreement with the substitution-based unifier ---------------------------


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_agreement_with_robinson(seed):
    from occurlab.robinson import unify_robinson

    rng = random.Random(seed)
    A, H = gen.random_atom_pair(rng)
    r = unify_robinson(A, H)
    e = EquationSet([Equation(A.as_term(), H.as_term())])
    sigma = mgu_of(e)
    if r.succeeded:
        assert sigma is not None
        assert equal_up_to_renaming(r.mgu, sigma)
    else:
        assert sigma is None


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_extracted_mgu_is_idempotent_and_most_general(seed):
    rng = random.Random(seed)
    e = gen.random_equation_set(rng, max_eqs=3, max_vars=3, depth=2)
    sigma = mgu_of(e)
    if sigma is None:
        return
    for q in e:
        assert apply(sigma, q.lhs) == apply(sigma, q.rhs)
    for v in sigma.domain():
        assert apply(sigma, apply(sigma, v)) == apply(sigma, v)
