"""Seeded random inputs for the differential suites: small equation
sets over a fixed signature (arities up to 2) and variable-disjoint
atom pairs."""

from __future__ import annotations

import random

from .terms import Atom, Compound, Equation, EquationSet, Term, Var

SIGNATURE: list[tuple[str, int]] = [
    ("a", 0),
    ("b", 0),
    ("f", 1),
    ("g", 1),
    ("h", 2),
    ("k", 2),
]

CONSTANTS = [name for name, arity in SIGNATURE if arity == 0]
FUNCTIONS = [(name, arity) for name, arity in SIGNATURE if arity > 0]


def random_term(rng: random.Random, vars: list[Var], depth: int = 3) -> Term:
    roll = rng.random()
    if depth <= 0 or roll < 0.35:
        if vars and roll < 0.55:
            return rng.choice(vars)
        return Compound(rng.choice(CONSTANTS))
    functor, arity = rng.choice(FUNCTIONS)
    return Compound(functor, tuple(random_term(rng, vars, depth - 1) for _ in range(arity)))


def random_equation_set(
    rng: random.Random,
    max_eqs: int = 6,
    max_vars: int = 4,
    depth: int = 3,
) -> EquationSet:
    vars = [Var(name) for name in ("X", "Y", "Z", "W")[: rng.randint(1, max_vars)]]
    count = rng.randint(1, max_eqs)
    return EquationSet(
        Equation(random_term(rng, vars, depth), random_term(rng, vars, depth))
        for _ in range(count)
    )


def random_atom_pair(rng: random.Random, depth: int = 3) -> tuple[Atom, Atom]:
    """Two atoms with disjoint variable pools; most of the time they
    share the predicate so the unification is not a trivial clash."""
    arity = rng.randint(1, 3)
    pred_a = "p"
    pred_h = "p" if rng.random() < 0.85 else "q"
    left = [Var(name) for name in ("X", "Y", "Z")]
    right = [Var(name) for name in ("U", "V", "T")]
    a = Atom(pred_a, tuple(random_term(rng, left, depth) for _ in range(arity)))
    h = Atom(pred_h, tuple(random_term(rng, right, depth) for _ in range(arity)))
    return a, h
