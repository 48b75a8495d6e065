"""Equation-rewriting unification as an explicit transition system.

States are ordered multisets of equations. Six actions operate on one
equation at a time, numbered as usual:

1. decompose   f(s1..sn) = f(t1..tn)  ->  s1=t1, ..., sn=tn
2. clash       f(..) = g(..), f and g distinct      -> halt, failed
3. delete      X = X                                 -> drop the equation
4. orient      t = X, t not a variable               -> X = t
5. eliminate   X = t, X not in t, X occurs elsewhere -> apply {X/t} to the rest
6. occur_halt  X = t, X in t, X distinct from t      -> halt, failed

At any position at most one action applies, so a schedule is just the
sequence of positions acted on. ``enumerate_runs`` explores every
schedule with state memoization; ``exists_ocf_run`` searches for a
terminating schedule that never performs action 6 and returns a
replayable witness trace.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Iterable

from .terms import (
    Compound,
    Equation,
    EquationSet,
    Substitution,
    Term,
    Var,
    apply,
    is_ground,
    vars_of,
)

DEFAULT_RUN_FUEL = 10_000
DEFAULT_ENUM_BOUND = 100_000

ACTION_NUMBERS = {
    "decompose": 1,
    "clash": 2,
    "delete": 3,
    "orient": 4,
    "eliminate": 5,
    "occur_halt": 6,
}


class DivergenceError(RuntimeError):
    """Raised when a run exceeds its fuel; the full transition system
    always terminates, so hitting this means the implementation broke."""


@dataclass(frozen=True)
class MmaAction:
    kind: str
    pos: int
    binding: tuple[Var, Term] | None = None

    @property
    def number(self) -> int:
        return ACTION_NUMBERS[self.kind]

    def describe(self) -> str:
        extra = ""
        if self.binding is not None:
            from .parser import render

            extra = f" {{{self.binding[0].name}/{render(self.binding[1])}}}"
        return f"({self.number}) {self.kind}@{self.pos}{extra}"


def is_solved(eqs: EquationSet) -> bool:
    """Left-hand sides are distinct variables, none occurring in any
    right-hand side."""
    lhs: list[Var] = []
    for eq in eqs:
        if not isinstance(eq.lhs, Var):
            return False
        lhs.append(eq.lhs)
    if len(set(lhs)) != len(lhs):
        return False
    rhs_vars = set()
    for eq in eqs:
        rhs_vars.update(vars_of(eq.rhs))
    return not rhs_vars.intersection(lhs)


@dataclass(frozen=True)
class MmaState:
    eqs: EquationSet
    status: str = "running"  # "running" | "solved" | "failed_clash" | "failed_occur"

    @property
    def running(self) -> bool:
        return self.status == "running"

    @property
    def failed(self) -> bool:
        return self.status.startswith("failed")


def make_state(eqs: EquationSet) -> MmaState:
    return MmaState(eqs, "solved" if is_solved(eqs) else "running")


def _occurs_elsewhere(x: Var, eqs: EquationSet, pos: int) -> bool:
    return any(
        i != pos and (x in vars_of(eq.lhs) or x in vars_of(eq.rhs))
        for i, eq in enumerate(eqs)
    )


def _action_at(eqs: EquationSet, pos: int) -> MmaAction | None:
    lhs, rhs = eqs[pos].lhs, eqs[pos].rhs
    if isinstance(lhs, Compound):
        if isinstance(rhs, Compound):
            if lhs.functor == rhs.functor and len(lhs.args) == len(rhs.args):
                return MmaAction("decompose", pos)
            return MmaAction("clash", pos)
        return MmaAction("orient", pos)
    # lhs is a variable
    if lhs == rhs:
        return MmaAction("delete", pos)
    if isinstance(rhs, Compound) and lhs in vars_of(rhs):
        return MmaAction("occur_halt", pos)
    if _occurs_elsewhere(lhs, eqs, pos):
        return MmaAction("eliminate", pos, (lhs, rhs))
    return None


def applicable_actions(state: MmaState) -> list[MmaAction]:
    if not state.running:
        return []
    actions = []
    for pos in range(len(state.eqs)):
        a = _action_at(state.eqs, pos)
        if a is not None:
            actions.append(a)
    return actions


def step(state: MmaState, action: MmaAction) -> MmaState:
    """Perform one action; raises ValueError if it does not apply."""
    if not state.running:
        raise ValueError("cannot step a halted state")
    expected = _action_at(state.eqs, action.pos)
    if expected is None or expected.kind != action.kind:
        raise ValueError(f"action {action} is not applicable")
    eqs = state.eqs
    eq = eqs[action.pos]
    if action.kind == "decompose":
        parts = [Equation(s, t) for s, t in zip(eq.lhs.args, eq.rhs.args)]
        return make_state(eqs.replace(action.pos, parts))
    if action.kind == "clash":
        return MmaState(eqs, "failed_clash")
    if action.kind == "delete":
        return make_state(eqs.remove(action.pos))
    if action.kind == "orient":
        return make_state(eqs.swap(action.pos))
    if action.kind == "eliminate":
        binding = Substitution([(eq.lhs, eq.rhs)])
        return make_state(eqs.apply_except(action.pos, binding))
    if action.kind == "occur_halt":
        return MmaState(eqs, "failed_occur")
    raise ValueError(f"unknown action kind {action.kind!r}")


# -- strategies ---------------------------------------------------------


@dataclass(frozen=True)
class Strategy:
    """A named deterministic chooser among applicable actions.

    ``factory`` builds a fresh chooser per run so that seeded strategies
    replay identically.
    """

    name: str
    factory: Callable[[], Callable[[object, list], object]]

    def __repr__(self):
        return f"Strategy({self.name!r})"


def _leftmost(state, actions):
    return actions[0]


def _rightmost(state, actions):
    return actions[-1]


def _eager_bind(state, actions):
    """Prefer eliminating a variable against a ground right-hand side,
    leftmost first; otherwise fall back to the leftmost action."""
    for a in actions:
        if a.kind == "eliminate" and is_ground(a.binding[1]):
            return a
    return actions[0]


def _term_size_of_rhs(state, action):
    return state.eqs[action.pos].rhs


def _adversarial(state, actions):
    """Work against early bindings: chase occur halts or a looping
    partial replacement where the variant system offers one; otherwise
    keep decomposing and bind as late and as non-ground as possible."""
    from . import mma_minus

    def pick(pred):
        chosen = [a for a in actions if pred(a)]
        return chosen[-1] if chosen else None

    if isinstance(state, mma_minus.MmaMinusState):
        for pred in (
            lambda a: a.kind == "partial" and mma_minus.partial_violates_size(state, a),
            lambda a: a.kind == "decompose",
            lambda a: a.kind == "orient",
            lambda a: a.kind == "delete",
            lambda a: a.kind == "partial",
            lambda a: a.kind == "eliminate" and not is_ground(a.binding[1]),
            lambda a: a.kind == "eliminate",
            lambda a: a.kind == "clash",
        ):
            a = pick(pred)
            if a is not None:
                return a
        return actions[-1]
    for pred in (
        lambda a: a.kind == "occur_halt",
        lambda a: a.kind == "orient"
        and any(v in vars_of(state.eqs[a.pos].rhs) for v in vars_of(state.eqs[a.pos].lhs)),
        lambda a: a.kind == "decompose",
        lambda a: a.kind == "delete",
        lambda a: a.kind == "eliminate" and not is_ground(a.binding[1]),
        lambda a: a.kind == "orient",
        lambda a: a.kind == "eliminate",
        lambda a: a.kind == "clash",
    ):
        a = pick(pred)
        if a is not None:
            return a
    return actions[-1]


LEFTMOST = Strategy("leftmost-first", lambda: _leftmost)
RIGHTMOST = Strategy("rightmost-first", lambda: _rightmost)
EAGER_BIND = Strategy("bind-first-argument-eagerly", lambda: _eager_bind)
ADVERSARIAL = Strategy("adversarial-delay-binding", lambda: _adversarial)


def seeded_strategy(seed: int) -> Strategy:
    def factory():
        rng = random.Random(seed)
        return lambda state, actions: actions[rng.randrange(len(actions))]

    return Strategy(f"seeded-random:{seed}", factory)


_NAMED = {
    s.name: s for s in (LEFTMOST, RIGHTMOST, EAGER_BIND, ADVERSARIAL)
}


def strategy(spec) -> Strategy:
    """Look up a strategy by name, or build a seeded-random one from an
    integer or a ``seeded-random:<seed>`` spec."""
    if isinstance(spec, Strategy):
        return spec
    if isinstance(spec, int):
        return seeded_strategy(spec)
    if spec in _NAMED:
        return _NAMED[spec]
    if spec.startswith("seeded-random:"):
        return seeded_strategy(int(spec.split(":", 1)[1]))
    try:
        return seeded_strategy(int(spec))
    except ValueError:
        raise ValueError(f"unknown strategy {spec!r}") from None


# -- runs ---------------------------------------------------------------


@dataclass
class TraceStep:
    action: MmaAction
    state: MmaState  # state after the action


@dataclass
class MmaTrace:
    initial: MmaState
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def final(self) -> MmaState:
        return self.steps[-1].state if self.steps else self.initial

    @property
    def status(self) -> str:
        return self.final.status

    def states(self) -> list[MmaState]:
        return [self.initial] + [s.state for s in self.steps]

    def describe(self) -> str:
        from .parser import render

        lines = [f"initial: {render(self.initial.eqs)}"]
        for st in self.steps:
            lines.append(f"  {st.action.describe():40s} => {render(st.state.eqs)}")
        lines.append(f"status: {self.status}")
        return "\n".join(lines)


def run(
    eqs: EquationSet | MmaState,
    strat: Strategy = LEFTMOST,
    fuel: int = DEFAULT_RUN_FUEL,
) -> MmaTrace:
    state = eqs if isinstance(eqs, MmaState) else make_state(eqs)
    chooser = strategy(strat).factory()
    trace = MmaTrace(state)
    for _ in range(fuel):
        if not state.running:
            return trace
        actions = applicable_actions(state)
        if not actions:
            return trace
        action = chooser(state, actions)
        state = step(state, action)
        trace.steps.append(TraceStep(action, state))
    raise DivergenceError("run exceeded its fuel")


def extract_mgu(state: MmaState) -> Substitution:
    """Read the most general unifier off a solved state."""
    if state.status != "solved":
        raise ValueError(f"state is {state.status}, not solved")
    return Substitution([(eq.lhs, eq.rhs) for eq in state.eqs])


def mgu_of(eqs: EquationSet, fuel: int = DEFAULT_RUN_FUEL) -> Substitution | None:
    """Unify with the leftmost schedule: the mgu, or None when the set
    has no unifier."""
    trace = run(eqs, LEFTMOST, fuel)
    if trace.status == "solved":
        return extract_mgu(trace.final)
    return None


# -- canonical state keys ------------------------------------------------


def _shape(t: Term) -> str:
    if isinstance(t, Var):
        return "*"
    if not t.args:
        return t.functor
    return t.functor + "(" + ",".join(_shape(a) for a in t.args) + ")"


def _serialize(eqs: Iterable[Equation], naming: dict[Var, str]) -> str:
    def ser(t: Term) -> str:
        if isinstance(t, Var):
            if t not in naming:
                naming[t] = f"v{len(naming)}"
            return naming[t]
        if not t.args:
            return t.functor
        return t.functor + "(" + ",".join(ser(a) for a in t.args) + ")"

    return ";".join(f"{ser(eq.lhs)}={ser(eq.rhs)}" for eq in eqs)


_PERMUTATION_CAP = 720


def canonical_key(eqs: EquationSet, tagged_vars: Iterable[Var] = ()) -> str:
    """A key equal for two equation sets exactly when they coincide up
    to equation order and variable names.

    Equations are sorted by their variable-free shape; ties are broken
    by taking the minimum serialization over all permutations within
    tie groups. When the tie groups are too large for that, the key
    falls back to preserving the current order (still sound for
    memoization: distinct keys may then denote equal states, never the
    other way around). ``tagged_vars`` lets callers fold extra
    per-variable state (such as an eliminated-variables set) into the
    key under the same canonical naming.
    """
    tagged = set(tagged_vars)
    indexed = sorted(range(len(eqs)), key=lambda i: (_shape(eqs[i].lhs), _shape(eqs[i].rhs)))
    groups: list[list[int]] = []
    last_key = None
    for i in indexed:
        k = (_shape(eqs[i].lhs), _shape(eqs[i].rhs))
        if k != last_key:
            groups.append([])
            last_key = k
        groups[-1].append(i)
    n_orders = math.prod(math.factorial(len(g)) for g in groups)

    def keyed(order: Iterable[int]) -> str:
        naming: dict[Var, str] = {}
        body = _serialize((eqs[i] for i in order), naming)
        tags = ",".join(sorted(naming[v] for v in tagged if v in naming))
        return body + "#" + tags

    if n_orders > _PERMUTATION_CAP:
        return "N:" + keyed(range(len(eqs)))
    candidates = (
        [i for g in choice for i in g]
        for choice in product(*[list(permutations(g)) for g in groups])
    )
    return "S:" + min(keyed(order) for order in candidates)


# -- exhaustive exploration ----------------------------------------------


@dataclass
class RunSummary:
    any_occur_halt: bool
    any_success: bool
    mgus: list[Substitution]
    exhausted: bool
    states_explored: int


def enumerate_runs(eqs: EquationSet, bound: int = DEFAULT_ENUM_BOUND) -> RunSummary:
    """Explore every schedule, memoizing states up to reordering and
    renaming. ``exhausted`` is set when the state bound cut the search
    short; verdicts are then lower bounds only."""
    initial = make_state(eqs)
    seen = {canonical_key(initial.eqs)}
    stack = [initial]
    any_occur = False
    any_success = False
    mgus: list[Substitution] = []
    mgu_keys: set[str] = set()
    exhausted = False
    while stack:
        state = stack.pop()
        if state.status == "solved":
            any_success = True
            key = canonical_key(state.eqs)
            if key not in mgu_keys:
                mgu_keys.add(key)
                mgus.append(extract_mgu(state))
            continue
        if state.failed:
            continue
        for action in applicable_actions(state):
            if action.kind == "occur_halt":
                any_occur = True
                continue
            if action.kind == "clash":
                continue
            child = step(state, action)
            key = canonical_key(child.eqs)
            if key in seen:
                continue
            if len(seen) >= bound:
                exhausted = True
                continue
            seen.add(key)
            stack.append(child)
    return RunSummary(any_occur, any_success, mgus, exhausted, len(seen))


def is_nsto(eqs: EquationSet, bound: int = DEFAULT_ENUM_BOUND) -> str:
    """"Not subject to the occur-check": can any schedule perform
    action 6? Returns "yes", "no", or "unknown" when the bound ran out
    before the question was settled."""
    summary = enumerate_runs(eqs, bound)
    if summary.any_occur_halt:
        return "no"
    return "unknown" if summary.exhausted else "yes"


@dataclass
class OcfSearchResult:
    verdict: str  # "found" | "none" | "unknown"
    trace: MmaTrace | None = None


def exists_ocf_run(eqs: EquationSet, bound: int = DEFAULT_ENUM_BOUND) -> OcfSearchResult:
    """Search for a terminating schedule that never performs action 6.

    The witness trace replays concretely from the given set. Memoized
    dead ends keep the search polynomial in distinct states.
    """
    dead: set[str] = set()
    visited = [0]

    def search(state: MmaState) -> list[MmaAction] | None:
        if state.status == "solved":
            return []
        key = canonical_key(state.eqs)
        if key in dead:
            return None
        visited[0] += 1
        if visited[0] > bound:
            raise _BoundExhausted
        for action in applicable_actions(state):
            if action.kind == "occur_halt":
                continue
            if action.kind == "clash":
                return [action]
            rest = search(step(state, action))
            if rest is not None:
                return [action] + rest
        dead.add(key)
        return None

    initial = make_state(eqs)
    try:
        script = search(initial)
    except _BoundExhausted:
        return OcfSearchResult("unknown")
    except RecursionError:
        return OcfSearchResult("unknown")
    if script is None:
        return OcfSearchResult("none")
    trace = MmaTrace(initial)
    state = initial
    for action in script:
        state = step(state, action)
        trace.steps.append(TraceStep(action, state))
    return OcfSearchResult("found", trace)


class _BoundExhausted(Exception):
    pass
