"""End-to-end gate: the worked examples, the differential suites, and
the cross-algorithm agreements that the rest of the test tree checks
piecemeal, each with a wall-clock budget and a visible verdict line."""

import functools
import random
import time

import pytest

from occurlab import corpus, gen, mma, mma_minus, robinson, sld
from occurlab.difftest import run_theorem_suite
from occurlab.iterms import i_equivalent
from occurlab.parser import parse_equations, render
from occurlab.terms import (
    Compound,
    Equation,
    EquationSet,
    Var,
    apply,
    cons,
    is_ground,
    is_linear,
    variant,
    vars_of,
)

LOOP = parse_equations("X = f(X), X = f(f(X))")


@pytest.fixture
def announce(capsys):
    def _announce(number, label, ok, elapsed, budget):
        with capsys.disabled():
            verdict = "PASS" if ok else "FAIL"
            print(f"acceptance {number:02d} {label}: {verdict} ({elapsed:.2f}s, budget {budget:.0f}s)")

    return _announce


# shared across criteria, built inside the first test that needs them so
# the cost lands inside that test's timed budget
@functools.lru_cache(maxsize=None)
def suite_result():
    return run_theorem_suite(count=1000, seed=0)


@functools.lru_cache(maxsize=None)
def linear_query_trees():
    nqueens = corpus.nqueens_program()
    rules = ["leftmost", "rightmost"] + [f"random:{s}" for s in range(5)]
    return [
        sld.derive(nqueens, corpus.query_qin(n), rule, 30)
        for n in (1, 2, 3)
        for rule in rules
    ]


def finish(announce, number, label, budget, started, checks):
    elapsed = time.perf_counter() - started
    ok = all(checks) and elapsed < budget
    announce(number, label, ok, elapsed, budget)
    assert all(checks)
    assert elapsed < budget


def test_01_semi_solved_recognition(announce):
    t0 = time.perf_counter()
    checks = [
        mma_minus.is_semi_solved(parse_equations("X = f(X), Y = X")),
        mma_minus.is_semi_solved(parse_equations("X = f(Y), Y = f(X)")),
        not mma_minus.is_semi_solved(parse_equations("X = f(Y), Y = f(X), X = a")),
        not mma_minus.is_semi_solved(parse_equations("X = a, Y = f(X)")),
    ]
    finish(announce, 1, "semi-solved recognition on the worked examples", 1.0, t0, checks)


def test_02_nonlinear_counterexample(announce):
    t0 = time.perf_counter()
    e = corpus.nonlinear_pq_unification()
    checks = []

    summary = mma.enumerate_runs(e)
    checks.append(summary.any_occur_halt is True)
    checks.append(mma.is_nsto(e) == "no")

    witness = mma.exists_ocf_run(e)
    checks.append(witness.verdict == "found")
    checks.append(witness.trace.steps[-1].action.kind == "clash")
    checks.append(all(s.action.kind != "occur_halt" for s in witness.trace.steps))

    terminated = 0
    for mode in ("restricted", "unrestricted"):
        for strat in (mma.LEFTMOST, mma.RIGHTMOST, mma.EAGER_BIND, mma.ADVERSARIAL):
            trace = mma_minus.run_minus(e, strat, mode, 500)
            if trace.terminated:
                terminated += 1
                checks.append(trace.outcome == "failed_clash")
    checks.append(terminated > 0)
    finish(announce, 2, "nonlinear goal/head pair behaves as worked out", 5.0, t0, checks)


def test_03_differential_suite(announce):
    t0 = time.perf_counter()
    result = suite_result()
    checks = [
        len(result.cases) >= 1000,
        result.total_runs >= 5000,
        result.incorrect_runs == 0,
        result.counterexamples == [],
        result.classification_counts["correct"] > 0,
    ]
    finish(announce, 3, "no witnessed case makes a terminating run incorrect", 120.0, t0, checks)


def test_04_loop_example(announce):
    t0 = time.perf_counter()
    checks = []

    free = mma_minus.run_minus(LOOP, mma.ADVERSARIAL, "unrestricted", 100)
    states = [render(s.eqs) for s in free.states()]
    checks.append(free.outcome == "proven_loop")
    checks.append(states[3] == states[0] == "X = f(X), X = f(f(X))")
    checks.append(states[4] == states[1] == "f(f(X)) = f(f(f(X))), X = f(f(X))")
    checks.append([s.action.kind for s in free.steps]
                  == ["eliminate", "decompose", "decompose", "partial"])

    tame = mma_minus.run_minus(LOOP, mma.LEFTMOST, "restricted", 100)
    checks.append(tame.outcome == "semi_solved")
    checks.append(render(tame.final.eqs) == "X = f(X)")
    checks.append([render(s.eqs) for s in tame.states()] == [
        "X = f(X), X = f(f(X))",
        "X = f(X), f(X) = f(f(f(X)))",
        "X = f(X), X = f(f(X))",
        "X = f(X), f(X) = f(f(X))",
        "X = f(X), X = f(X)",
        "X = f(X), f(X) = f(X)",
        "X = f(X), X = X",
        "X = f(X)",
    ])
    finish(announce, 4, "loop set cycles unrestricted, answers restricted", 1.0, t0, checks)


def test_05_linearity_and_groundness(announce):
    t0 = time.perf_counter()
    checks = []
    for tree in linear_query_trees():
        for node in tree.nodes():
            for atom in node.query.atoms:
                checks.append(is_linear(atom))
                checks.append(not atom.args or is_ground(atom.args[0]))
    finish(announce, 5, "linear queries stay linear with ground first arguments", 60.0, t0, checks)


def test_06_every_unification_avoids_the_halt(announce):
    t0 = time.perf_counter()
    verdicts = {}
    for tree in linear_query_trees():
        for au in sld.available_unifications(tree):
            key = mma.canonical_key(au.eqs)
            if key not in verdicts:
                verdicts[key] = mma.is_nsto(au.eqs)
    checks = [v == "yes" for v in verdicts.values()]
    checks.append(len(verdicts) > 0)
    finish(announce, 6, "goal/head unifications under linear queries never halt", 120.0, t0, checks)


def test_07_shared_variable_queries_cross_engine(announce, nqueens):
    t0 = time.perf_counter()
    checks = []
    witnessed = {}
    for n in (1, 2):
        query = corpus.query_q0prime(n, Var("L"), cons(Var("L"), Var("A")), Var("B"))
        checked = sld.derive(nqueens, query, "leftmost", 20, engine="mma")
        free = sld.derive(nqueens, query, "leftmost", 20, engine="mma-minus")
        checks.append(sld.structure_signature(checked) == sld.structure_signature(free))
        for au in sld.available_unifications(checked):
            key = mma.canonical_key(au.eqs)
            if key not in witnessed:
                witnessed[key] = mma.exists_ocf_run(au.eqs).verdict
    checks.extend(v == "found" for v in witnessed.values())
    checks.append(len(witnessed) > 0)
    finish(announce, 7, "shared-variable queries agree across engines", 120.0, t0, checks)


def test_08_steps_preserve_rational_solutions(announce):
    t0 = time.perf_counter()
    pairs = list(suite_result().step_pairs)
    for strat, mode in ((mma.ADVERSARIAL, "unrestricted"), (mma.LEFTMOST, "restricted")):
        trace = mma_minus.run_minus(LOOP, strat, mode, 100)
        states = trace.states()
        pairs.extend((a.eqs, b.eqs) for a, b in zip(states, states[1:]))
    checks = [len(pairs) >= 200]
    checks.extend(i_equivalent(before, after, 32) for before, after in pairs)
    finish(announce, 8, "sampled steps preserve the solution set", 60.0, t0, checks)


def test_09_corpus_against_the_board_oracle(announce, nqueens):
    t0 = time.perf_counter()
    checks = []
    for n in (1, 2, 3, 4):
        solvable = bool(corpus.queens_oracle(n))
        for engine in ("mma", "mma-minus"):
            tree = sld.derive(nqueens, corpus.query_qin(n), "leftmost", 30, engine=engine)
            checks.append(tree.has_success is solvable)
            if not solvable:
                checks.append(all(node.status != "depth_cutoff" for node in tree.nodes()))
    finish(announce, 9, "derivation success matches the board oracle", 60.0, t0, checks)


def test_10_cross_algorithm_agreement(announce):
    t0 = time.perf_counter()
    rng = random.Random(10)
    checks = []
    successes = occur_failures = 0
    for _ in range(500):
        a, h = gen.random_atom_pair(rng)
        result = robinson.unify_robinson(a, h)
        eqs = EquationSet([Equation(a.as_term(), h.as_term())])
        reference = mma.mgu_of(eqs)
        checks.append(result.succeeded == (reference is not None))
        if result.succeeded and reference is not None:
            successes += 1
            names = sorted(set(vars_of(eqs)), key=lambda v: v.name)
            mine = Compound("answers", tuple(apply(result.mgu, v) for v in names))
            theirs = Compound("answers", tuple(apply(reference, v) for v in names))
            checks.append(variant(mine, theirs))
        if result.status == "occur_failure":
            occur_failures += 1
            checks.append(mma.is_nsto(eqs) == "no")
    checks.append(successes > 0)
    checks.append(occur_failures > 0)
    finish(announce, 10, "both unification algorithms agree", 60.0, t0, checks)
