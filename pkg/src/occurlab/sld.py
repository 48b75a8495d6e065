"""SLD-resolution over definite programs.

Selection rules are pluggable (leftmost, rightmost, seeded random,
round robin), the unifier behind each resolution step is swappable
between the occur-checking system and the restricted occur-check-free
one, and trees record every attempted head unification, including the
failing ones. Derivation-level checks aggregate the per-atom
properties of interest: linearity, groundness of first arguments, and
the two occur-check verdicts of each available unification.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from . import mma, mma_minus
from .mma import DEFAULT_ENUM_BOUND, DEFAULT_RUN_FUEL
from .terms import (
    Atom,
    Clause,
    Equation,
    EquationSet,
    Program,
    Query,
    Substitution,
    apply,
    is_ground,
    is_linear,
    rename_apart,
    vars_of,
)


class EngineError(RuntimeError):
    """The occur-check-free engine failed to reach a definite verdict
    (nontermination, or success on a set that encodes no finite
    unifier)."""


# -- selection rules ------------------------------------------------------


@dataclass(frozen=True)
class SelectionRule:
    """Named chooser of the atom position to resolve next. ``factory``
    builds a fresh chooser per derivation so seeded and stateful rules
    replay identically."""

    name: str
    factory: Callable[[], Callable[[Query, int], int]]

    def __repr__(self):
        return f"SelectionRule({self.name!r})"


LEFTMOST_RULE = SelectionRule("leftmost", lambda: lambda q, depth: 0)
RIGHTMOST_RULE = SelectionRule("rightmost", lambda: lambda q, depth: len(q.atoms) - 1)


def _round_robin_factory():
    counter = [0]

    def choose(q: Query, depth: int) -> int:
        pos = counter[0] % len(q.atoms)
        counter[0] += 1
        return pos

    return choose


ROUND_ROBIN_RULE = SelectionRule("round-robin-fair", _round_robin_factory)


def seeded_rule(seed: int) -> SelectionRule:
    def factory():
        rng = random.Random(seed)
        return lambda q, depth: rng.randrange(len(q.atoms))

    return SelectionRule(f"random:{seed}", factory)


_NAMED_RULES = {
    "leftmost": LEFTMOST_RULE,
    "rightmost": RIGHTMOST_RULE,
    "round-robin-fair": ROUND_ROBIN_RULE,
    "round-robin": ROUND_ROBIN_RULE,
}


def selection_rule(spec) -> SelectionRule:
    if isinstance(spec, SelectionRule):
        return spec
    if spec in _NAMED_RULES:
        return _NAMED_RULES[spec]
    for prefix in ("random:", "seeded-random:"):
        if isinstance(spec, str) and spec.startswith(prefix):
            return seeded_rule(int(spec[len(prefix):]))
    raise ValueError(f"unknown selection rule {spec!r}")


# -- unification engines ---------------------------------------------------


def _solve_mma(eqs: EquationSet, fuel: int) -> Substitution | None:
    trace = mma.run(eqs, mma.LEFTMOST, fuel)
    if trace.status == "solved":
        return mma.extract_mgu(trace.final)
    return None


def _solve_minus(eqs: EquationSet, fuel: int) -> Substitution | None:
    trace = mma_minus.run_minus(eqs, mma.LEFTMOST, "restricted", fuel)
    if trace.outcome == "failed_clash":
        return None
    if trace.outcome == "semi_solved":
        if mma.is_solved(trace.final.eqs):
            return mma_minus.extract_solved(trace.final)
        raise EngineError(
            "run succeeded on a semi-solved set that is not solved: "
            "the input admits no finite unifier"
        )
    raise EngineError(f"run did not terminate ({trace.outcome})")


ENGINES = {"mma": _solve_mma, "mma-minus": _solve_minus}


def engine_solver(engine: str, fuel: int = DEFAULT_RUN_FUEL):
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    solve = ENGINES[engine]
    return lambda eqs: solve(eqs, fuel)


# -- resolution ------------------------------------------------------------


@dataclass
class AvailableUnification:
    """One attempted goal/head unification: the selected atom, the
    standardized-apart head with the same predicate, and the equation
    set {goal = head} the engine was run on."""

    goal_atom: Atom
    head: Atom
    clause_index: int
    eqs: EquationSet
    mgu: Substitution | None

    @property
    def unified(self) -> bool:
        return self.mgu is not None


@dataclass
class StepResult:
    kind: str  # "child" | "unification_failure" | "no_matching_head"
    attempt: AvailableUnification | None = None
    query: Query | None = None
    renamed: Clause | None = None


def resolution_step(
    query: Query,
    rule,
    clause_index: int,
    program: Program,
    engine: str = "mma",
    forbidden=(),
    fuel: int = DEFAULT_RUN_FUEL,
) -> StepResult:
    """One SLD step: select an atom, rename the clause apart, unify,
    splice the clause body at the selected position."""
    if not query.atoms:
        raise ValueError("cannot resolve the empty query")
    chooser = selection_rule(rule).factory()
    pos = chooser(query, 0)
    goal = query.atoms[pos]
    clause = program[clause_index]
    if clause.head.predicate != goal.predicate or len(clause.head.args) != len(goal.args):
        return StepResult("no_matching_head")
    seen = set(vars_of(query))
    seen.update(forbidden)
    renamed, _ = rename_apart(clause, seen)
    eqs = EquationSet([Equation(goal.as_term(), renamed.head.as_term())])
    mgu = engine_solver(engine, fuel)(eqs)
    attempt = AvailableUnification(goal, renamed.head, clause_index, eqs, mgu)
    if mgu is None:
        return StepResult("unification_failure", attempt, renamed=renamed)
    atoms = query.atoms[:pos] + renamed.body + query.atoms[pos + 1 :]
    return StepResult("child", attempt, apply(mgu, Query(atoms)), renamed)


@dataclass
class DerivationNode:
    query: Query
    depth: int
    selected: int | None = None
    attempts: list[AvailableUnification] = field(default_factory=list)
    children: list[tuple[int, "DerivationNode"]] = field(default_factory=list)
    status: str = "expanded"  # "success" | "failed" | "depth_cutoff" | "expanded"


@dataclass
class DerivationTree:
    program: Program
    root: DerivationNode
    rule_name: str
    engine: str
    depth_bound: int
    traversal: str

    def nodes(self) -> Iterator[DerivationNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(child for _, child in reversed(node.children))

    @property
    def has_success(self) -> bool:
        return any(n.status == "success" for n in self.nodes())

    def node_count(self) -> int:
        return sum(1 for _ in self.nodes())


def derive(
    program: Program,
    query: Query,
    rule="leftmost",
    depth: int = 30,
    traversal: str = "tree",
    engine: str = "mma",
    fuel: int = DEFAULT_RUN_FUEL,
) -> DerivationTree:
    """Build the bounded SLD-tree (or a single branch when
    ``traversal="branch"``: first unifiable clause at each node, all
    attempts still recorded). ``depth`` bounds resolution steps per
    branch; cut-off nodes are marked distinctly from failed ones.
    """
    if traversal not in ("tree", "branch"):
        raise ValueError(f"unknown traversal {traversal!r}")
    rule = selection_rule(rule)
    chooser = rule.factory()
    solve = engine_solver(engine, fuel)
    used = set(vars_of(query))

    def expand(q: Query, d: int) -> DerivationNode:
        node = DerivationNode(q, d)
        if not q.atoms:
            node.status = "success"
            return node
        if d >= depth:
            node.status = "depth_cutoff"
            return node
        pos = chooser(q, d)
        node.selected = pos
        goal = q.atoms[pos]
        successors: list[tuple[int, Query]] = []
        for ci, clause in enumerate(program):
            if clause.head.predicate != goal.predicate or len(clause.head.args) != len(goal.args):
                continue
            renamed, _ = rename_apart(clause, used)
            used.update(vars_of(renamed))
            eqs = EquationSet([Equation(goal.as_term(), renamed.head.as_term())])
            mgu = solve(eqs)
            node.attempts.append(AvailableUnification(goal, renamed.head, ci, eqs, mgu))
            if mgu is not None:
                atoms = q.atoms[:pos] + renamed.body + q.atoms[pos + 1 :]
                successors.append((ci, apply(mgu, Query(atoms))))
        if not successors:
            node.status = "failed"
            return node
        if traversal == "branch":
            successors = successors[:1]
        for ci, child_query in successors:
            node.children.append((ci, expand(child_query, d + 1)))
        return node

    return DerivationTree(program, expand(query, 0), rule.name, engine, depth, traversal)


def available_unifications(tree: DerivationTree) -> list[AvailableUnification]:
    return [au for node in tree.nodes() for au in node.attempts]


# -- derivation-level checks ------------------------------------------------


def _first_arg_ground(atom: Atom) -> bool:
    return not atom.args or is_ground(atom.args[0])


@dataclass
class InvariantReport:
    precondition_ok: bool
    all_atoms_linear: bool | None
    first_args_ground: bool | None
    all_available_nsto: str  # "yes" | "no" | "unknown"
    all_have_ocf_run: str  # "yes" | "no" | "unknown"

    def as_dict(self) -> dict:
        return {
            "precondition_ok": self.precondition_ok,
            "all_atoms_linear": self.all_atoms_linear,
            "first_args_ground": self.first_args_ground,
            "all_available_nsto": self.all_available_nsto,
            "all_have_ocf_run": self.all_have_ocf_run,
        }


def _aggregate(verdicts: list[str], bad: str) -> str:
    if bad in verdicts:
        return "no"
    if "unknown" in verdicts:
        return "unknown"
    return "yes"


def check_derivation_invariants(tree: DerivationTree, bound: int = DEFAULT_ENUM_BOUND) -> InvariantReport:
    """Aggregate the per-atom and per-unification properties over the
    whole tree. Meaningful only for initial queries whose atoms all
    have ground first arguments; otherwise only the precondition
    violation is reported."""
    if not all(_first_arg_ground(a) for a in tree.root.query.atoms):
        return InvariantReport(False, None, None, "unknown", "unknown")
    atoms = [a for node in tree.nodes() for a in node.query.atoms]
    aus = available_unifications(tree)
    return InvariantReport(
        True,
        all(is_linear(a) for a in atoms),
        all(_first_arg_ground(a) for a in atoms),
        _aggregate([mma.is_nsto(au.eqs, bound) for au in aus], "no"),
        _aggregate([mma.exists_ocf_run(au.eqs, bound).verdict for au in aus], "none"),
    )


def structure_signature(tree: DerivationTree):
    """Shape of the tree with queries abstracted away: per node the
    query length, status, selected position, each attempt's clause and
    outcome, and the children in clause order. Two engines agree on a
    query exactly when their trees have equal signatures."""

    def sig(node: DerivationNode):
        return (
            len(node.query.atoms),
            node.status,
            node.selected,
            tuple((a.clause_index, a.unified) for a in node.attempts),
            tuple((ci, sig(child)) for ci, child in node.children),
        )

    return sig(tree.root)
