"""Differential testing of the occur-check-free system against the
occur-checking reference.

The central claim under test: on any input where some occur-checking
run avoids the occur halt, every terminating occur-check-free run is
correct (fails exactly on non-unifiable input, and otherwise yields a
most general unifier). The suite samples random equation sets, keeps
those with such a witness run, executes several schedules in both
modes, classifies each terminating run, and shrinks any incorrect case
before reporting it.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from . import mma, mma_minus
from .gen import random_equation_set
from .terms import Compound, Equation, EquationSet, Var


@dataclass
class ScheduleRecord:
    mode: str
    strategy: str
    outcome: str
    classification: str
    steps: int


@dataclass
class CaseRecord:
    index: int
    eqs: EquationSet
    schedules: list[ScheduleRecord] = field(default_factory=list)

    @property
    def incorrect(self) -> bool:
        return any(s.classification == "incorrect" for s in self.schedules)


@dataclass
class Counterexample:
    eqs: EquationSet
    shrunk: EquationSet
    mode: str
    strategy: str
    outcome: str


@dataclass
class SuiteResult:
    seed: int
    cases: list[CaseRecord]
    counterexamples: list[Counterexample]
    classification_counts: Counter
    outcome_counts: Counter
    step_pairs: list[tuple[EquationSet, EquationSet]]
    generated: int
    skipped_no_witness: int

    @property
    def total_runs(self) -> int:
        return sum(len(c.schedules) for c in self.cases)

    @property
    def incorrect_runs(self) -> int:
        return self.classification_counts["incorrect"]

    def summary_lines(self) -> list[str]:
        lines = [
            f"cases with a witness run: {len(self.cases)} "
            f"(generated {self.generated}, skipped {self.skipped_no_witness})",
            f"schedules executed: {self.total_runs}",
        ]
        for key in ("correct", "incorrect", "nonterminating"):
            lines.append(f"  {key}: {self.classification_counts[key]}")
        lines.append("outcomes: " + ", ".join(f"{k}={v}" for k, v in sorted(self.outcome_counts.items())))
        if self.counterexamples:
            lines.append(f"COUNTEREXAMPLES: {len(self.counterexamples)}")
        return lines


def _schedules(case_seed: int) -> list[tuple[str, object]]:
    return [
        ("restricted", mma.LEFTMOST),
        ("restricted", mma.RIGHTMOST),
        ("restricted", mma.seeded_strategy(case_seed)),
        ("unrestricted", mma.seeded_strategy(case_seed + 1)),
        ("unrestricted", mma.seeded_strategy(case_seed + 2)),
    ]


def run_case(
    eqs: EquationSet,
    case_seed: int,
    fuel: int,
    step_pairs: list | None = None,
    step_cap: int = 0,
) -> list[tuple[ScheduleRecord, mma_minus.MinusTrace]]:
    out = []
    for mode, strat in _schedules(case_seed):
        trace = mma_minus.run_minus(eqs, strat, mode, fuel)
        verdict = mma_minus.classify_result(trace, eqs)
        if step_pairs is not None and len(step_pairs) < step_cap:
            states = trace.states()
            for before, after in zip(states, states[1:]):
                if len(step_pairs) >= step_cap:
                    break
                step_pairs.append((before.eqs, after.eqs))
        out.append(
            (
                ScheduleRecord(mode, mma.strategy(strat).name, trace.outcome, verdict, len(trace.steps)),
                trace,
            )
        )
    return out


def shrink_case(eqs: EquationSet, still_fails) -> EquationSet:
    """Greedy minimization: drop whole equations, then replace any
    compound side by one of its arguments, as long as the failure
    reproduces."""

    def side_candidates(t):
        if isinstance(t, Compound):
            yield from t.args

    changed = True
    while changed:
        changed = False
        for i in range(len(eqs)):
            smaller = eqs.remove(i)
            if len(smaller) and still_fails(smaller):
                eqs, changed = smaller, True
                break
        if changed:
            continue
        for i, eq in enumerate(eqs):
            for new_eq in [Equation(s, eq.rhs) for s in side_candidates(eq.lhs)] + [
                Equation(eq.lhs, s) for s in side_candidates(eq.rhs)
            ]:
                smaller = eqs.replace(i, [new_eq])
                if still_fails(smaller):
                    eqs, changed = smaller, True
                    break
            if changed:
                break
    return eqs


def run_theorem_suite(
    count: int = 1000,
    seed: int = 0,
    fuel: int = 200,
    witness_bound: int = 20_000,
    step_cap: int = 400,
    max_eqs: int = 6,
    max_vars: int = 4,
) -> SuiteResult:
    """Sample until ``count`` equation sets with an occur-halt-avoiding
    witness run have been exercised (or the attempt budget of 5x that
    is spent). Returns the classification table, sampled before/after
    step pairs for the equivalence spot-checks, and shrunk
    counterexamples, if any."""
    rng = random.Random(seed)
    cases: list[CaseRecord] = []
    counterexamples: list[Counterexample] = []
    classification_counts: Counter = Counter()
    outcome_counts: Counter = Counter()
    step_pairs: list[tuple[EquationSet, EquationSet]] = []
    generated = skipped = 0

    while len(cases) < count and generated < 5 * count:
        generated += 1
        eqs = random_equation_set(rng, max_eqs=max_eqs, max_vars=max_vars)
        case_seed = rng.randrange(1 << 30)
        if mma.exists_ocf_run(eqs, witness_bound).verdict != "found":
            skipped += 1
            continue
        record = CaseRecord(len(cases), eqs)
        for sched, trace in run_case(eqs, case_seed, fuel, step_pairs, step_cap):
            record.schedules.append(sched)
            classification_counts[sched.classification] += 1
            outcome_counts[sched.outcome] += 1
            if sched.classification == "incorrect":
                counterexamples.append(
                    Counterexample(
                        eqs,
                        _shrink_incorrect(eqs, sched, fuel),
                        sched.mode,
                        sched.strategy,
                        sched.outcome,
                    )
                )
        cases.append(record)

    return SuiteResult(
        seed,
        cases,
        counterexamples,
        classification_counts,
        outcome_counts,
        step_pairs,
        generated,
        skipped,
    )


def _shrink_incorrect(eqs: EquationSet, sched: ScheduleRecord, fuel: int) -> EquationSet:
    def still_fails(candidate: EquationSet) -> bool:
        if mma.exists_ocf_run(candidate, 5_000).verdict != "found":
            return False
        trace = mma_minus.run_minus(candidate, sched.strategy, sched.mode, fuel)
        return mma_minus.classify_result(trace, candidate) == "incorrect"

    return shrink_case(eqs, still_fails)
