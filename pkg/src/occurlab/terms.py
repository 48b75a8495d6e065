"""Core first-order syntax: terms, atoms, equations, substitutions.

Terms are immutable and compared structurally. Constants are
zero-argument compounds; lists are built from the functor "." (arity 2)
and the constant "[]"; the naturals use s/1 over 0. Variables are
identified by name. Names of the shape ``_G<k>`` are reserved for
machinery that needs fresh variables (wildcard expansion, renaming
apart) and are refused by the parser in user input, so a generated name
can never collide with one written by hand.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Iterable, Iterator

FRESH_PREFIX = "_G"
_RESERVED_RE = re.compile(r"^_G[0-9]+$")


def is_reserved_name(name: str) -> bool:
    """True for variable names the toolkit may generate itself."""
    return bool(_RESERVED_RE.match(name))


class Var:
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"


class Compound:
    """Function symbol applied to argument terms; constants have no args."""

    __slots__ = ("functor", "args", "size", "depth", "ground", "_hash")

    def __init__(self, functor: str, args: Iterable["Term"] = ()):
        self.functor = functor
        self.args = tuple(args)
        self.size = 1 + sum(a.size for a in self.args)
        self.depth = 1 + max((a.depth for a in self.args), default=0)
        self.ground = all(a.ground for a in self.args)
        self._hash = hash(("cmp", functor, self.args))

    def __eq__(self, other):
        return (
            isinstance(other, Compound)
            and other._hash == self._hash
            and other.functor == self.functor
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.args:
            return f"Compound({self.functor!r})"
        return f"Compound({self.functor!r}, {self.args!r})"


Term = Var | Compound

# Var.size / Var.ground as class attributes keep the cached-size trick
# uniform without per-instance storage.
Var.size = 1  # type: ignore[attr-defined]
Var.depth = 1  # type: ignore[attr-defined]
Var.ground = False  # type: ignore[attr-defined]

NIL = Compound("[]")


def const(name: str) -> Compound:
    return Compound(name)


def cons(head: Term, tail: Term) -> Compound:
    return Compound(".", (head, tail))


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(tuple(items)):
        out = cons(item, out)
    return out


def list_parts(t: Term) -> tuple[list[Term], Term]:
    """Split a cons chain into its elements and final tail."""
    items: list[Term] = []
    while isinstance(t, Compound) and t.functor == "." and len(t.args) == 2:
        items.append(t.args[0])
        t = t.args[1]
    return items, t


class Atom:
    """A predicate applied to argument terms."""

    __slots__ = ("predicate", "args", "_hash")

    def __init__(self, predicate: str, args: Iterable[Term] = ()):
        self.predicate = predicate
        self.args = tuple(args)
        self._hash = hash(("atom", predicate, self.args))

    def as_term(self) -> Compound:
        """View the atom as a compound term, e.g. to equate two atoms."""
        return Compound(self.predicate, self.args)

    def __eq__(self, other):
        return (
            isinstance(other, Atom)
            and other.predicate == self.predicate
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Atom({self.predicate!r}, {self.args!r})"


class Equation:
    __slots__ = ("lhs", "rhs", "_hash")

    def __init__(self, lhs: Term, rhs: Term):
        self.lhs = lhs
        self.rhs = rhs
        self._hash = hash(("eq", lhs, rhs))

    def flipped(self) -> "Equation":
        return Equation(self.rhs, self.lhs)

    def __eq__(self, other):
        return (
            isinstance(other, Equation)
            and other.lhs == self.lhs
            and other.rhs == self.rhs
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Equation({self.lhs!r}, {self.rhs!r})"


class EquationSet:
    """Ordered multiset of equations.

    Insertion order is preserved and duplicates are allowed; the
    transition systems in :mod:`occurlab.mma` and
    :mod:`occurlab.mma_minus` address equations by position.
    """

    __slots__ = ("equations",)

    def __init__(self, equations: Iterable[Equation] = ()):
        self.equations = tuple(equations)

    def __len__(self) -> int:
        return len(self.equations)

    def __iter__(self) -> Iterator[Equation]:
        return iter(self.equations)

    def __getitem__(self, i: int) -> Equation:
        return self.equations[i]

    def __eq__(self, other):
        return isinstance(other, EquationSet) and other.equations == self.equations

    def __hash__(self):
        return hash(self.equations)

    def __repr__(self):
        return f"EquationSet({list(self.equations)!r})"

    def replace(self, i: int, new_equations: Iterable[Equation]) -> "EquationSet":
        eqs = self.equations
        return EquationSet(eqs[:i] + tuple(new_equations) + eqs[i + 1 :])

    def remove(self, i: int) -> "EquationSet":
        return self.replace(i, ())

    def swap(self, i: int) -> "EquationSet":
        return self.replace(i, (self.equations[i].flipped(),))

    def apply_except(self, i: int, s: "Substitution") -> "EquationSet":
        """Apply ``s`` to every equation except the one at position ``i``."""
        return EquationSet(
            eq if j == i else apply(s, eq) for j, eq in enumerate(self.equations)
        )


class Substitution:
    """Finite map from variables to terms; identity bindings are dropped."""

    __slots__ = ("_map",)

    def __init__(self, bindings=()):
        items = bindings.items() if isinstance(bindings, dict) else bindings
        self._map = {v: t for v, t in items if t != v}

    def get(self, v: Var, default: Term | None = None):
        return self._map.get(v, default)

    def __getitem__(self, v: Var) -> Term:
        return self._map[v]

    def __contains__(self, v: Var) -> bool:
        return v in self._map

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other):
        return isinstance(other, Substitution) and other._map == self._map

    def items(self):
        return self._map.items()

    def domain(self) -> list[Var]:
        return list(self._map)

    def __repr__(self):
        inner = ", ".join(f"{v.name}/{t!r}" for v, t in self._map.items())
        return "Substitution({" + inner + "})"


EMPTY_SUBSTITUTION = Substitution()


def compose(first: Substitution, second: Substitution) -> Substitution:
    """The substitution acting as ``first`` followed by ``second``."""
    out = {v: apply(second, t) for v, t in first.items()}
    for v, t in second.items():
        if v not in out:
            out[v] = t
    return Substitution(out)


from dataclasses import dataclass  # noqa: E402  (dataclasses only below here)


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple[Atom, ...] = ()


@dataclass(frozen=True)
class Query:
    atoms: tuple[Atom, ...]

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __getitem__(self, i: int) -> Atom:
        return self.atoms[i]


@dataclass(frozen=True)
class Program:
    clauses: tuple[Clause, ...]

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __getitem__(self, i: int) -> Clause:
        return self.clauses[i]


def _walk(e, visit) -> None:
    if isinstance(e, Var):
        visit(e)
    elif isinstance(e, Compound):
        for a in e.args:
            _walk(a, visit)
    elif isinstance(e, Atom):
        for a in e.args:
            _walk(a, visit)
    elif isinstance(e, Equation):
        _walk(e.lhs, visit)
        _walk(e.rhs, visit)
    elif isinstance(e, (EquationSet, Query, Program, list, tuple)):
        for x in e:
            _walk(x, visit)
    elif isinstance(e, Clause):
        _walk(e.head, visit)
        _walk(e.body, visit)
    elif isinstance(e, Substitution):
        for v, t in e.items():
            visit(v)
            _walk(t, visit)
    else:
        raise TypeError(f"cannot walk {type(e).__name__}")


def vars_of(e) -> list[Var]:
    """Distinct variables of any syntactic object, in first-occurrence order."""
    seen: set[Var] = set()
    out: list[Var] = []

    def visit(v: Var) -> None:
        if v not in seen:
            seen.add(v)
            out.append(v)

    _walk(e, visit)
    return out


def var_occurrences(e) -> Counter:
    counts: Counter = Counter()
    _walk(e, lambda v: counts.update((v,)))
    return counts


def is_linear(e) -> bool:
    """True when no variable occurs more than once in ``e``."""
    seen: set[Var] = set()
    try:
        def visit(v: Var) -> None:
            if v in seen:
                raise _NotLinear
            seen.add(v)

        _walk(e, visit)
    except _NotLinear:
        return False
    return True


class _NotLinear(Exception):
    pass


def is_ground(e) -> bool:
    if isinstance(e, (Var, Compound)):
        return e.ground
    return not vars_of(e)


def term_size(t: Term | Atom) -> int:
    """Number of variable and function-symbol occurrences in ``t``."""
    if isinstance(t, Atom):
        return 1 + sum(a.size for a in t.args)
    return t.size


def term_depth(t: Term | Atom) -> int:
    """Nesting depth of ``t``; a variable or constant counts 1."""
    if isinstance(t, Atom):
        return 1 + max((a.depth for a in t.args), default=0)
    return t.depth


def apply(s: Substitution, e):
    """Apply a substitution simultaneously to any syntactic object."""
    if isinstance(e, Var):
        return s.get(e, e)
    if isinstance(e, Compound):
        if e.ground or not s:
            return e
        return Compound(e.functor, tuple(apply(s, a) for a in e.args))
    if isinstance(e, Atom):
        return Atom(e.predicate, tuple(apply(s, a) for a in e.args))
    if isinstance(e, Equation):
        return Equation(apply(s, e.lhs), apply(s, e.rhs))
    if isinstance(e, EquationSet):
        return EquationSet(apply(s, eq) for eq in e)
    if isinstance(e, Query):
        return Query(tuple(apply(s, a) for a in e.atoms))
    if isinstance(e, Clause):
        return Clause(apply(s, e.head), tuple(apply(s, a) for a in e.body))
    if isinstance(e, (list, tuple)):
        return type(e)(apply(s, x) for x in e)
    raise TypeError(f"cannot substitute into {type(e).__name__}")


def rename_apart(e, forbidden: Iterable[Var]):
    """Rename every variable of ``e`` to a fresh reserved name.

    Returns the renamed object and the renaming used. The new names
    avoid ``forbidden`` and each other; passing an accumulating
    forbidden set therefore yields pairwise-disjoint variants across
    repeated calls.
    """
    used = {v.name for v in forbidden}
    mapping: dict[Var, Term] = {}
    k = 1
    for v in vars_of(e):
        while f"{FRESH_PREFIX}{k}" in used:
            k += 1
        fresh = Var(f"{FRESH_PREFIX}{k}")
        used.add(fresh.name)
        mapping[v] = fresh
    renaming = Substitution(mapping)
    return apply(renaming, e), renaming


def _skeleton(t: Term) -> str:
    if isinstance(t, Var):
        return "*"
    if not t.args:
        return t.functor
    return t.functor + "(" + ",".join(_skeleton(a) for a in t.args) + ")"


def _match_renaming(a: Term, b: Term, fwd: dict, bwd: dict) -> bool:
    """Extend the injective variable map ``fwd`` so that ``a`` maps to ``b``."""
    if isinstance(a, Var):
        if not isinstance(b, Var):
            return False
        if a in fwd:
            return fwd[a] == b
        if b in bwd:
            return False
        fwd[a] = b
        bwd[b] = a
        return True
    if isinstance(b, Var):
        return False
    if a.functor != b.functor or len(a.args) != len(b.args):
        return False
    return all(_match_renaming(x, y, fwd, bwd) for x, y in zip(a.args, b.args))


def variant(a: Term | Atom, b: Term | Atom) -> bool:
    """True when some variable renaming carries ``a`` onto ``b``."""
    if isinstance(a, Atom):
        if not isinstance(b, Atom):
            return False
        a, b = a.as_term(), b.as_term()
    elif isinstance(b, Atom):
        return False
    return _match_renaming(a, b, {}, {})


def _as_pairs(x) -> list[tuple[Term, Term]]:
    if isinstance(x, Substitution):
        return [(v, t) for v, t in x.items()]
    if isinstance(x, EquationSet):
        return [(eq.lhs, eq.rhs) for eq in x]
    raise TypeError(f"cannot compare {type(x).__name__} up to renaming")


def _pairs_variant(xs: list[tuple[Term, Term]], ys: list[tuple[Term, Term]]) -> bool:
    if len(xs) != len(ys):
        return False
    key = lambda p: (_skeleton(p[0]), _skeleton(p[1]))
    if Counter(map(key, xs)) != Counter(map(key, ys)):
        return False

    def backtrack(i: int, fwd: dict, bwd: dict, used: set[int]) -> bool:
        if i == len(xs):
            return True
        la, ra = xs[i]
        for j, (lb, rb) in enumerate(ys):
            if j in used or key(xs[i]) != key(ys[j]):
                continue
            f2, b2 = dict(fwd), dict(bwd)
            if _match_renaming(la, lb, f2, b2) and _match_renaming(ra, rb, f2, b2):
                used.add(j)
                if backtrack(i + 1, f2, b2, used):
                    return True
                used.discard(j)
        return False

    return backtrack(0, {}, {}, set())


def equal_up_to_renaming(a, b) -> bool:
    """Decide whether two substitutions or equation sets differ only by
    a variable renaming.

    Both arguments are read as multisets of left/right pairs and matched
    two ways under one injective variable map, so the order in which
    bindings or equations were produced does not matter.
    """
    if type(a) is not type(b):
        return False
    return _pairs_variant(_as_pairs(a), _as_pairs(b))
