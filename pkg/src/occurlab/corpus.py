"""Embedded programs and query builders, plus the brute-force board
oracle that gives bounded derivation checks an independent ground
truth."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .parser import parse_program
from .terms import (
    Atom,
    Compound,
    Equation,
    EquationSet,
    Program,
    Query,
    Term,
    Var,
    cons,
    const,
    make_list,
    rename_apart,
    vars_of,
)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    text: str
    description: str


def _read(name: str) -> str:
    return resources.files("occurlab").joinpath(f"corpus/{name}").read_text()


@lru_cache(maxsize=None)
def entries() -> tuple[CorpusEntry, ...]:
    return (
        CorpusEntry(
            "nqueens",
            _read("nqueens.pl"),
            "four-clause queen-placement fragment: pqs/4 walks the count "
            "down while pq/4 threads one queen through column, up- and "
            "down-diagonal lists",
        ),
    )


def get(name: str) -> CorpusEntry:
    for entry in entries():
        if entry.name == name:
            return entry
    raise ValueError(f"no corpus entry named {name!r}")


@lru_cache(maxsize=None)
def nqueens_program() -> Program:
    return parse_program(get("nqueens").text)


def nat(n: int) -> Term:
    """The numeral s(s(...s(0)...)) with n applications of s."""
    if n < 0:
        raise ValueError("natural numbers only")
    t: Term = const("0")
    for _ in range(n):
        t = Compound("s", (t,))
    return t


def query_qin(n: int) -> Query:
    """pqs(s^n(0), [V1,...,Vn], W1, W2): the intended initial query, a
    single linear atom with ground first argument."""
    board = make_list([Var(f"V{i + 1}") for i in range(n)])
    return Query((Atom("pqs", (nat(n), board, Var("W1"), Var("W2"))),))


def query_q0prime(n: int, t1: Term, t2: Term, t3: Term) -> Query:
    """pqs(s^n(0), t1, t2, t3): ground count, arbitrary last three
    arguments (in particular they may share variables)."""
    return Query((Atom("pqs", (nat(n), t1, t2, t3)),))


def nonlinear_pq_atom(m: Term | None = None) -> Atom:
    """pq(m, L, [L|A], B) with ground m: the variable L occurs twice,
    so unifying this atom with the doubly-shared pq head is where an
    occur check can fire."""
    if m is None:
        m = nat(1)
    L = Var("L")
    return Atom("pq", (m, L, cons(L, Var("A")), Var("B")))


def nonlinear_pq_unification(m: Term | None = None) -> EquationSet:
    """The equation set {A = H} for the atom above against the
    standardized-apart fact head pq(I,[I|_],[I|_],[I|_])."""
    goal = nonlinear_pq_atom(m)
    head, _ = rename_apart(nqueens_program()[2].head, vars_of(goal))
    return EquationSet([Equation(goal.as_term(), head.as_term())])


def queens_oracle(n: int) -> list[tuple[int, ...]]:
    """All safe placements of n queens, one per column, by brute force
    over permutations: placement p is safe when no two queens share a
    diagonal (|p_i - p_j| != |i - j|)."""
    if not 0 <= n <= 8:
        raise ValueError("oracle is for boards up to 8x8")
    return [
        p
        for p in itertools.permutations(range(1, n + 1))
        if all(abs(p[i] - p[j]) != j - i for i in range(n) for j in range(i + 1, n))
    ]
