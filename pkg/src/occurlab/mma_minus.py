"""The equation-rewriting system with the occur check removed.

Compared with :mod:`occurlab.mma`: action 6 is gone; eliminate only
requires the left variable to differ from the right term (cyclic
equations like ``X = f(X)`` may be eliminated); and a new partial
replacement ("5-prime") rewrites just a chosen nonempty subset of the
occurrences of ``X`` in the other equations. Partial replacement on
``X`` is permitted only after a full eliminate was performed on some
``X = t``. Runs succeed by stopping at a semi-solved set and fail only
through a clash; nothing forces termination, so runs carry fuel and a
repeated-state detector.

The restricted discipline (conjectured to terminate) additionally
refuses a second eliminate on the same variable and confines partial
replacement to whole left-hand-side occurrences ``X = t'`` with
``|t| <= |t'|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from .mma import (
    DEFAULT_RUN_FUEL,
    MmaTrace,
    Strategy,
    canonical_key,
    mgu_of,
    strategy,
)
from .mma import LEFTMOST as LEFTMOST  # re-exported for convenience
from .terms import (
    Compound,
    Equation,
    EquationSet,
    Substitution,
    Term,
    Var,
    apply,
    term_depth,
    term_size,
    variant,
    vars_of,
)

# an occurrence of a variable: (equation index, side, path into that side)
Occurrence = tuple[int, str, tuple[int, ...]]

# cut off a run once the equation set holds this many symbols, or once
# any term nests this deep (slim cons chains stay small in symbol count
# while overwhelming every recursive traversal)
DEFAULT_SIZE_BUDGET = 10_000
DEFAULT_DEPTH_BUDGET = 200

MINUS_ACTION_NUMBERS = {
    "decompose": 1,
    "clash": 2,
    "delete": 3,
    "orient": 4,
    "eliminate": 5,
    "partial": 5.5,
}


@dataclass(frozen=True)
class MmaMinusAction:
    kind: str
    pos: int
    binding: tuple[Var, Term] | None = None
    occurrences: tuple[Occurrence, ...] | None = None  # for "partial"

    def describe(self) -> str:
        from .parser import render

        label = "(5') partial" if self.kind == "partial" else f"({MINUS_ACTION_NUMBERS[self.kind]:.0f}) {self.kind}"
        extra = ""
        if self.binding is not None:
            extra = f" {{{self.binding[0].name}/{render(self.binding[1])}}}"
        if self.occurrences is not None:
            occ = ",".join(f"{q}.{side}{''.join(f'.{k}' for k in path)}" for q, side, path in self.occurrences)
            extra += f" at [{occ}]"
        return f"{label}@{self.pos}{extra}"


@dataclass(frozen=True)
class MmaMinusState:
    eqs: EquationSet
    eliminated: frozenset[Var] = frozenset()
    status: str = "running"  # "running" | "failed_clash" | "semi_solved"

    @property
    def running(self) -> bool:
        return self.status == "running"


def is_semi_solved(eqs: EquationSet) -> bool:
    """Every equation is ``X = t`` with distinct left variables, no
    ``X = X``, and any left variable occurring in some right-hand side
    lies on a cycle of the occurs-in-right-side relation."""
    lhs_vars: list[Var] = []
    for eq in eqs:
        if not isinstance(eq.lhs, Var) or eq.rhs == eq.lhs:
            return False
        lhs_vars.append(eq.lhs)
    n = len(lhs_vars)
    if len(set(lhs_vars)) != n:
        return False
    index = {v: i for i, v in enumerate(lhs_vars)}
    succ: list[set[int]] = [set() for _ in range(n)]
    occurs_somewhere: set[int] = set()
    for i, eq in enumerate(eqs):
        for v in vars_of(eq.rhs):
            j = index.get(v)
            if j is not None:
                succ[i].add(j)
                occurs_somewhere.add(j)
    for j in occurs_somewhere:
        # j must reach itself through succ
        stack, seen = list(succ[j]), set()
        on_cycle = False
        while stack:
            k = stack.pop()
            if k == j:
                on_cycle = True
                break
            if k in seen:
                continue
            seen.add(k)
            stack.extend(succ[k])
        if not on_cycle:
            return False
    return True


def has_collapsible_var_cycle(eqs: EquationSet, eliminated: frozenset = frozenset(), mode: str = "restricted") -> bool:
    """True when some equation ``X = Y`` between two variables lies on a
    cycle of the occurs-in-right-side relation and an eliminate on it is
    still permitted.

    Such a cycle is pure renaming: every solution makes its variables
    equal, and one eliminate step (plus a deletion) shrinks it. A
    semi-solved set with a collapsible cycle therefore still has a
    finite unifier that the set does not yet exhibit in solved form, so
    a terminating schedule should keep going rather than stop there.
    Cycles that pass through a proper compound term force infinite
    solutions and are not collapsible.
    """
    lhs_vars = [eq.lhs for eq in eqs if isinstance(eq.lhs, Var)]
    index = {v: i for i, v in enumerate(lhs_vars)}
    if len(index) != len(lhs_vars):
        return False
    succ: list[set[int]] = [set() for _ in lhs_vars]
    pos = 0
    rows: list[tuple[int, Equation]] = []
    for eq in eqs:
        if not isinstance(eq.lhs, Var):
            continue
        for v in vars_of(eq.rhs):
            j = index.get(v)
            if j is not None:
                succ[pos].add(j)
        rows.append((pos, eq))
        pos += 1
    for i, eq in rows:
        y = eq.rhs
        if not isinstance(y, Var) or y == eq.lhs:
            continue
        j = index.get(y)
        if j is None:
            continue
        if mode == "restricted" and eq.lhs in eliminated:
            continue
        # the edge lhs -> y closes a cycle iff y reaches lhs
        stack, seen = [j], set()
        while stack:
            k = stack.pop()
            if k == i:
                return True
            if k in seen:
                continue
            seen.add(k)
            stack.extend(succ[k])
    return False


def _occurrence_paths(t: Term, x: Var, path: tuple[int, ...], out: list[tuple[int, ...]]) -> None:
    if t == x:
        out.append(path)
    elif isinstance(t, Compound):
        for k, a in enumerate(t.args):
            _occurrence_paths(a, x, path + (k,), out)


def occurrences_of(eqs: EquationSet, x: Var, skip: int) -> list[Occurrence]:
    """All occurrences of ``x`` outside equation ``skip``, in order."""
    out: list[Occurrence] = []
    for i, eq in enumerate(eqs):
        if i == skip:
            continue
        for side, t in (("lhs", eq.lhs), ("rhs", eq.rhs)):
            paths: list[tuple[int, ...]] = []
            _occurrence_paths(t, x, (), paths)
            out.extend((i, side, p) for p in paths)
    return out


def _base_action(eqs: EquationSet, pos: int, eliminated: frozenset[Var], mode: str) -> MmaMinusAction | None:
    lhs, rhs = eqs[pos].lhs, eqs[pos].rhs
    if isinstance(lhs, Compound):
        if isinstance(rhs, Compound):
            if lhs.functor == rhs.functor and len(lhs.args) == len(rhs.args):
                return MmaMinusAction("decompose", pos)
            return MmaMinusAction("clash", pos)
        return MmaMinusAction("orient", pos)
    if lhs == rhs:
        return MmaMinusAction("delete", pos)
    if mode == "restricted" and lhs in eliminated:
        return None
    if occurrences_of(eqs, lhs, pos):
        return MmaMinusAction("eliminate", pos, (lhs, rhs))
    return None


def _partial_actions(eqs: EquationSet, pos: int, eliminated: frozenset[Var], mode: str) -> list[MmaMinusAction]:
    lhs, rhs = eqs[pos].lhs, eqs[pos].rhs
    if not isinstance(lhs, Var) or lhs == rhs or lhs not in eliminated:
        return []
    if mode == "restricted":
        out = []
        for q, eq in enumerate(eqs):
            if q != pos and eq.lhs == lhs and term_size(rhs) <= term_size(eq.rhs):
                out.append(MmaMinusAction("partial", pos, (lhs, rhs), ((q, "lhs", ()),)))
        return out
    occs = occurrences_of(eqs, lhs, pos)
    if not occs:
        return []
    whole_lhs = tuple(o for o in occs if o[1] == "lhs" and o[2] == ())
    selections: list[tuple[Occurrence, ...]] = [(occs[0],), tuple(occs)]
    if whole_lhs:
        selections.append(whole_lhs)
    uniq: list[tuple[Occurrence, ...]] = []
    for sel in selections:
        if sel not in uniq:
            uniq.append(sel)
    return [MmaMinusAction("partial", pos, (lhs, rhs), sel) for sel in uniq]


def applicable_actions_minus(state: MmaMinusState, mode: str = "unrestricted") -> list[MmaMinusAction]:
    """All actions the chosen mode offers, ordered by position (the base
    action first, then partial replacements)."""
    if mode not in ("restricted", "unrestricted"):
        raise ValueError(f"unknown mode {mode!r}")
    if not state.running:
        return []
    actions: list[MmaMinusAction] = []
    for pos in range(len(state.eqs)):
        base = _base_action(state.eqs, pos, state.eliminated, mode)
        if base is not None:
            actions.append(base)
        actions.extend(_partial_actions(state.eqs, pos, state.eliminated, mode))
    return actions


def _replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    assert isinstance(t, Compound)
    k = path[0]
    args = list(t.args)
    args[k] = _replace_at(args[k], path[1:], new)
    return Compound(t.functor, args)


def step_minus(state: MmaMinusState, action: MmaMinusAction) -> MmaMinusState:
    """Perform one action, checking its structural guard (mode
    restrictions are a strategy concern, not a stepping concern, so
    replayed schedules from either mode go through here)."""
    if not state.running:
        raise ValueError("cannot step a halted state")
    eqs = state.eqs
    if not 0 <= action.pos < len(eqs):
        raise ValueError("no equation at that position")
    eq = eqs[action.pos]
    kind = action.kind
    if kind == "decompose":
        if not (
            isinstance(eq.lhs, Compound)
            and isinstance(eq.rhs, Compound)
            and eq.lhs.functor == eq.rhs.functor
            and len(eq.lhs.args) == len(eq.rhs.args)
        ):
            raise ValueError("decompose needs equal root functors")
        parts = [Equation(s, t) for s, t in zip(eq.lhs.args, eq.rhs.args)]
        return replace(state, eqs=eqs.replace(action.pos, parts))
    if kind == "clash":
        if not (
            isinstance(eq.lhs, Compound)
            and isinstance(eq.rhs, Compound)
            and (eq.lhs.functor != eq.rhs.functor or len(eq.lhs.args) != len(eq.rhs.args))
        ):
            raise ValueError("clash needs distinct root functors")
        return replace(state, status="failed_clash")
    if kind == "delete":
        if not (isinstance(eq.lhs, Var) and eq.lhs == eq.rhs):
            raise ValueError("delete needs an equation X = X")
        return replace(state, eqs=eqs.remove(action.pos))
    if kind == "orient":
        if not (isinstance(eq.lhs, Compound) and isinstance(eq.rhs, Var)):
            raise ValueError("orient needs t = X with t non-variable")
        return replace(state, eqs=eqs.swap(action.pos))
    if kind == "eliminate":
        x, t = eq.lhs, eq.rhs
        if not isinstance(x, Var) or x == t:
            raise ValueError("eliminate needs X = t with X distinct from t")
        if not occurrences_of(eqs, x, action.pos):
            raise ValueError("eliminate needs X to occur elsewhere")
        binding = Substitution([(x, t)])
        return MmaMinusState(
            eqs.apply_except(action.pos, binding),
            state.eliminated | {x},
            state.status,
        )
    if kind == "partial":
        x, t = eq.lhs, eq.rhs
        if not isinstance(x, Var) or x == t:
            raise ValueError("partial replacement needs X = t with X distinct from t")
        if x not in state.eliminated:
            raise ValueError("partial replacement requires a prior eliminate on the variable")
        if not action.occurrences:
            raise ValueError("partial replacement needs a nonempty occurrence selection")
        new_eqs = list(eqs)
        for q, side, path in action.occurrences:
            if q == action.pos:
                raise ValueError("partial replacement acts on other equations only")
            target = new_eqs[q]
            here = target.lhs if side == "lhs" else target.rhs
            sub: Term = here
            for k in path:
                sub = sub.args[k]
            if sub != x:
                raise ValueError("selected occurrence is not the variable being replaced")
            rewritten = _replace_at(here, path, t)
            new_eqs[q] = Equation(rewritten, target.rhs) if side == "lhs" else Equation(target.lhs, rewritten)
        return replace(state, eqs=EquationSet(new_eqs))
    raise ValueError(f"unknown action kind {kind!r}")


def partial_violates_size(state: MmaMinusState, action: MmaMinusAction) -> bool:
    """True for a partial replacement aimed at a whole left-hand side
    ``X = t'`` with ``|t| > |t'|`` (the move the restricted discipline
    rules out, and the fuel behind the known infinite run)."""
    if action.kind != "partial" or not action.occurrences:
        return False
    t = action.binding[1]
    for q, side, path in action.occurrences:
        if side == "lhs" and path == () and term_size(t) > term_size(state.eqs[q].rhs):
            return True
    return False


# -- runs ---------------------------------------------------------------


@dataclass
class MinusTraceStep:
    action: MmaMinusAction
    state: MmaMinusState


@dataclass
class MinusTrace:
    initial: MmaMinusState
    steps: list[MinusTraceStep] = field(default_factory=list)
    outcome: str = "running"
    # "semi_solved" | "failed_clash" | "proven_loop" | "fuel_exhausted" | "stuck"
    size_exceeded: bool = False  # fuel_exhausted because a growth budget ran out

    @property
    def final(self) -> MmaMinusState:
        return self.steps[-1].state if self.steps else self.initial

    def states(self) -> list[MmaMinusState]:
        return [self.initial] + [s.state for s in self.steps]

    @property
    def terminated(self) -> bool:
        return self.outcome in ("semi_solved", "failed_clash")

    def describe(self) -> str:
        from .parser import render

        lines = [f"initial: {render(self.initial.eqs)}"]
        for st in self.steps:
            lines.append(f"  {st.action.describe():48s} => {render(st.state.eqs)}")
        lines.append(f"outcome: {self.outcome}")
        return "\n".join(lines)


def _loop_key(state: MmaMinusState) -> str:
    relevant = [v for v in state.eliminated if v in set(vars_of(state.eqs))]
    return canonical_key(state.eqs, relevant)


def run_minus(
    eqs: EquationSet | MmaMinusState,
    strat: Strategy = LEFTMOST,
    mode: str = "restricted",
    fuel: int = DEFAULT_RUN_FUEL,
    size_budget: int = DEFAULT_SIZE_BUDGET,
    depth_budget: int = DEFAULT_DEPTH_BUDGET,
) -> MinusTrace:
    """Run one schedule. The run fails on a clash, succeeds at a
    semi-solved set, and is cut off as nonterminating when a state
    recurs (up to reordering, renaming, and the surviving eliminated
    variables) or a budget runs out.

    Success is declared at a semi-solved set only once no eliminate can
    still collapse a pure variable cycle (or no action applies at all).
    Stopping at the very first semi-solved set would be legal for the
    nondeterministic system, but a set like {Y=X, X=Y} is semi-solved
    without being solved even though one more eliminate and a deletion
    turn it into {Y=X}; a schedule meant to produce an answer keeps
    going until the renaming cycles are gone.

    Fuel counts steps; the size budget counts symbols in the current
    equation set and the depth budget its deepest nesting. Unrestricted
    schedules can double the set size on every step, so without the
    growth budgets a diverging run would burn its fuel on exponentially
    growing (or ever-deepening) terms instead of being cut off. All
    three exhaustions report ``fuel_exhausted``; ``trace.size_exceeded``
    marks the growth cutoffs.
    """
    state = eqs if isinstance(eqs, MmaMinusState) else MmaMinusState(eqs)
    chooser = strategy(strat).factory()
    trace = MinusTrace(state)
    seen = {_loop_key(state)}

    def succeed() -> MinusTrace:
        final = replace(state, status="semi_solved")
        if trace.steps:
            trace.steps[-1] = MinusTraceStep(trace.steps[-1].action, final)
        else:
            trace.initial = final
        trace.outcome = "semi_solved"
        return trace

    for _ in range(fuel):
        if state.status == "failed_clash":
            trace.outcome = "failed_clash"
            return trace
        actions = applicable_actions_minus(state, mode)
        if is_semi_solved(state.eqs) and (
            not actions or not has_collapsible_var_cycle(state.eqs, state.eliminated, mode)
        ):
            return succeed()
        if not actions:
            trace.outcome = "stuck"
            return trace
        action = chooser(state, actions)
        state = step_minus(state, action)
        trace.steps.append(MinusTraceStep(action, state))
        if state.running:
            if (
                sum(term_size(e.lhs) + term_size(e.rhs) for e in state.eqs) > size_budget
                or max((max(e.lhs.depth, e.rhs.depth) for e in state.eqs), default=0) > depth_budget
            ):
                trace.outcome = "fuel_exhausted"
                trace.size_exceeded = True
                return trace
            key = _loop_key(state)
            if key in seen:
                trace.outcome = "proven_loop"
                return trace
            seen.add(key)
    if state.status == "failed_clash":
        trace.outcome = "failed_clash"
    elif is_semi_solved(state.eqs) and not has_collapsible_var_cycle(state.eqs, state.eliminated, mode):
        return succeed()
    else:
        trace.outcome = "fuel_exhausted"
    return trace


def extract_solved(state: MmaMinusState) -> Substitution:
    from .mma import is_solved

    if not is_solved(state.eqs):
        raise ValueError("final equation set is not in solved form")
    return Substitution([(eq.lhs, eq.rhs) for eq in state.eqs])


def classify_result(trace: MinusTrace, original: EquationSet) -> str:
    """Judge one run against the occur-checking system on the same
    input: "correct", "incorrect", or "nonterminating".

    A successful run is correct when its final set is solved and the
    substitution read off it is a most general unifier of the original
    set; a clash is correct exactly when the original set is not
    unifiable.
    """
    if not trace.terminated:
        return "nonterminating"
    reference = mgu_of(original)
    if trace.outcome == "failed_clash":
        return "correct" if reference is None else "incorrect"
    # semi-solved success
    if reference is None:
        return "incorrect"
    from .mma import is_solved

    if not is_solved(trace.final.eqs):
        return "incorrect"
    sigma = extract_solved(trace.final)
    for eq in original:
        if apply(sigma, eq.lhs) != apply(sigma, eq.rhs):
            return "incorrect"
    answer_vars = vars_of(original)
    got = Compound("answers", tuple(apply(sigma, v) for v in answer_vars))
    want = Compound("answers", tuple(apply(reference, v) for v in answer_vars))
    return "correct" if variant(got, want) else "incorrect"


# -- embeddings between the two systems -----------------------------------


def replay_as_minus(trace: MmaTrace) -> MinusTrace:
    """Replay an occur-check-free run of the full system here; every
    such run is also a run of this system."""
    state = MmaMinusState(trace.initial.eqs)
    out = MinusTrace(state)
    for st in trace.steps:
        a = st.action
        if a.kind == "occur_halt":
            raise ValueError("trace performs the occur halt; it has no counterpart here")
        action = MmaMinusAction(a.kind, a.pos, a.binding)
        state = step_minus(state, action)
        out.steps.append(MinusTraceStep(action, state))
    if state.status == "failed_clash":
        out.outcome = "failed_clash"
    elif is_semi_solved(state.eqs):
        out.outcome = "semi_solved"
    return out


def replay_as_mma(trace: MinusTrace) -> MmaTrace:
    """Replay a partial-free run through the occur-checking system;
    valid whenever every eliminate in the trace bound a variable not
    occurring in its own right-hand side."""
    from .mma import MmaAction, TraceStep, make_state, step

    state = make_state(trace.initial.eqs)
    out = MmaTrace(state)
    for st in trace.steps:
        a = st.action
        if a.kind == "partial":
            raise ValueError("partial replacement has no counterpart in the occur-checking system")
        state = step(state, MmaAction(a.kind, a.pos, a.binding))
        out.steps.append(TraceStep(MmaAction(a.kind, a.pos, a.binding), state))
    return out
