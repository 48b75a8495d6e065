"""Nondeterministic Robinson unification over disagreement pairs.

The algorithm keeps a substitution ``theta`` and repeatedly inspects the
two instances ``a@theta`` and ``h@theta``: while they differ, one
disagreement pair is chosen, turned into a binding when one side is a
variable not occurring in the other, and composed into ``theta``.
A non-variable pair is a clash; a cyclic pair is an occur failure.
Extra observer atoms ride along and are instantiated with the same
substitution, which lets callers watch how bindings propagate into
atoms that are not themselves being unified.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .terms import (
    Atom,
    Compound,
    Substitution,
    Term,
    Var,
    apply,
    compose,
    vars_of,
)

Pair = tuple[Term, Term]
Chooser = Callable[[list[Pair]], int]


def disagreement_pairs(a: Term | Atom, h: Term | Atom) -> list[Pair]:
    """All outermost positions at which the two expressions differ,
    left to right. Expressions with different root symbols disagree at
    the root, giving the single pair ``(a, h)``."""
    if isinstance(a, Atom):
        a = a.as_term()
    if isinstance(h, Atom):
        h = h.as_term()
    out: list[Pair] = []

    def walk(s: Term, t: Term) -> None:
        if s == t:
            return
        if (
            isinstance(s, Compound)
            and isinstance(t, Compound)
            and s.functor == t.functor
            and len(s.args) == len(t.args)
        ):
            for x, y in zip(s.args, t.args):
                walk(x, y)
        else:
            out.append((s, t))

    walk(a, h)
    return out


@dataclass
class RobinsonState:
    theta: Substitution
    a_inst: Term | Atom
    h_inst: Term | Atom
    observers: tuple[Atom, ...] = ()


@dataclass
class RobinsonResult:
    status: str  # "success" | "clash_failure" | "occur_failure"
    mgu: Substitution | None
    state: RobinsonState
    states: list[RobinsonState] = field(default_factory=list)
    failed_pair: Pair | None = None

    @property
    def succeeded(self) -> bool:
        return self.status == "success"


def choose_first(pairs: list[Pair]) -> int:
    return 0


def choose_last(pairs: list[Pair]) -> int:
    return len(pairs) - 1


def seeded_chooser(seed: int) -> Chooser:
    rng = random.Random(seed)
    return lambda pairs: rng.randrange(len(pairs))


def unify_robinson(
    a: Term | Atom,
    h: Term | Atom,
    observers: tuple[Atom, ...] = (),
    choose: Chooser = choose_first,
    max_steps: int = 10_000,
) -> RobinsonResult:
    """Run one schedule of the nondeterministic algorithm.

    ``choose`` picks the disagreement pair to act on at each step. Every
    intermediate state is recorded so callers can check step invariants.
    """
    state = RobinsonState(Substitution(), a, h, tuple(observers))
    history = [state]
    for _ in range(max_steps):
        pairs = disagreement_pairs(state.a_inst, state.h_inst)
        if not pairs:
            return RobinsonResult("success", state.theta, state, history)
        s, t = pairs[choose(pairs)]
        if not isinstance(s, Var) and not isinstance(t, Var):
            return RobinsonResult("clash_failure", None, state, history, (s, t))
        if not isinstance(s, Var):
            s, t = t, s
        if s in vars_of(t):
            return RobinsonResult("occur_failure", None, state, history, (s, t))
        theta = compose(state.theta, Substitution([(s, t)]))
        state = RobinsonState(
            theta,
            apply(theta, a),
            apply(theta, h),
            tuple(apply(theta, b) for b in observers),
        )
        history.append(state)
    raise RuntimeError("disagreement-pair unification did not settle within max_steps")


def enumerate_robinson(
    a: Term | Atom,
    h: Term | Atom,
    observers: tuple[Atom, ...] = (),
    max_runs: int = 10_000,
) -> Iterator[RobinsonResult]:
    """Yield the result of every schedule (choice sequence) in turn.

    Intended for small inputs; the number of schedules can grow
    factorially with the number of simultaneous disagreement pairs.
    """
    budget = [max_runs]

    def go(state: RobinsonState, history: list[RobinsonState]) -> Iterator[RobinsonResult]:
        if budget[0] <= 0:
            return
        pairs = disagreement_pairs(state.a_inst, state.h_inst)
        if not pairs:
            budget[0] -= 1
            yield RobinsonResult("success", state.theta, state, history)
            return
        for s, t in pairs:
            if budget[0] <= 0:
                return
            if not isinstance(s, Var) and not isinstance(t, Var):
                budget[0] -= 1
                yield RobinsonResult("clash_failure", None, state, history, (s, t))
                continue
            if not isinstance(s, Var):
                s, t = t, s
            if s in vars_of(t):
                budget[0] -= 1
                yield RobinsonResult("occur_failure", None, state, history, (s, t))
                continue
            theta = compose(state.theta, Substitution([(s, t)]))
            child = RobinsonState(
                theta,
                apply(theta, a),
                apply(theta, h),
                tuple(apply(theta, b) for b in observers),
            )
            yield from go(child, history + [child])

    initial = RobinsonState(Substitution(), a, h, tuple(observers))
    yield from go(initial, [initial])
