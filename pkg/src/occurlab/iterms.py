"""Rational terms: possibly-infinite trees presented as finite cyclic
graphs, with the unification that solves equations over them.

Dropping the occur check is sound in the algebra of rational trees:
an equation set either clashes or has a most general solution binding
variables to cyclic graphs. The solver here is union-find over term
nodes (union before descending into arguments, so cyclic inputs
converge). On top of it sit a value type for solved graphs, bounded
unfolding back into ordinary terms with a ``$cut`` marker at the
truncation frontier, exact equality by minimization (bisimulation),
and depth-bounded comparison.
"""

from __future__ import annotations

from typing import Iterable

from .terms import Compound, Equation, EquationSet, Term, Var

CUT_FUNCTOR = "$cut"
CUT = Compound(CUT_FUNCTOR, ())


class _Node:
    __slots__ = ("kind", "name", "functor", "args", "parent")

    def __init__(self, kind: str, name: str = "", functor: str = "", args: tuple = ()):
        self.kind = kind  # "var" | "fun"
        self.name = name
        self.functor = functor
        self.args = args
        self.parent: _Node | None = None


def _find(n: _Node) -> _Node:
    root = n
    while root.parent is not None:
        root = root.parent
    while n is not root:
        n.parent, n = root, n.parent
    return root


def _node_of(t: Term, varmap: dict[Var, _Node]) -> _Node:
    if isinstance(t, Var):
        node = varmap.get(t)
        if node is None:
            node = varmap[t] = _Node("var", name=t.name)
        return node
    if isinstance(t, Compound):
        return _Node("fun", functor=t.functor, args=tuple(_node_of(a, varmap) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


class RationalTerm:
    """A rooted term graph. Structural sharing and cycles are allowed;
    equality and hashing go through the minimized (bisimulation-
    quotiented) form, so two graphs are equal exactly when they denote
    the same rational tree."""

    __slots__ = ("nodes", "root", "_canon")

    def __init__(self, nodes: tuple, root: int):
        self.nodes = nodes  # ("var", name) | ("fun", functor, (child ids...))
        self.root = root
        self._canon = None

    @classmethod
    def from_term(cls, t: Term) -> "RationalTerm":
        return _freeze(_node_of(t, {}))

    def _canonical(self) -> tuple:
        if self._canon is None:
            self._canon = _minimize(self.nodes, self.root)
        return self._canon

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalTerm):
            return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self) -> int:
        return hash(self._canonical())

    @property
    def is_cyclic(self) -> bool:
        state: dict[int, int] = {}  # 1 on stack, 2 done

        def visit(i: int) -> bool:
            state[i] = 1
            e = self.nodes[i]
            if e[0] == "fun":
                for c in e[2]:
                    if state.get(c) == 1 or (c not in state and visit(c)):
                        return True
            state[i] = 2
            return False

        return visit(self.root)

    def __repr__(self) -> str:
        from .parser import render

        return f"RationalTerm({render(unfold(self, 4))})"


def _freeze(start: _Node) -> RationalTerm:
    ids: dict[int, int] = {}
    entries: list[tuple | None] = []

    def visit(node: _Node) -> int:
        node = _find(node)
        if id(node) in ids:
            return ids[id(node)]
        idx = len(entries)
        ids[id(node)] = idx
        entries.append(None)
        if node.kind == "var":
            entries[idx] = ("var", node.name)
        else:
            entries[idx] = ("fun", node.functor, tuple(visit(c) for c in node.args))
        return idx

    visit(start)
    return RationalTerm(tuple(entries), 0)


def _minimize(nodes: tuple, root: int) -> tuple:
    n = len(nodes)
    sig = [e if e[0] == "var" else ("fun", e[1], len(e[2])) for e in nodes]
    labels: dict = {}
    cur = [labels.setdefault(s, len(labels)) for s in sig]
    while True:
        keys = [
            (cur[i],) if nodes[i][0] == "var" else (cur[i], tuple(cur[c] for c in nodes[i][2]))
            for i in range(n)
        ]
        relabel: dict = {}
        nxt = [relabel.setdefault(k, len(relabel)) for k in keys]
        if nxt == cur:
            break
        cur = nxt
    rep = {}
    for i in range(n):
        rep.setdefault(cur[i], i)
    ids: dict[int, int] = {}
    out: list[tuple | None] = []

    def build(b: int) -> int:
        if b in ids:
            return ids[b]
        idx = len(out)
        ids[b] = idx
        out.append(None)
        e = nodes[rep[b]]
        out[idx] = e if e[0] == "var" else ("fun", e[1], tuple(build(cur[c]) for c in e[2]))
        return idx

    build(cur[root])
    return (tuple(out), 0)


def bisimilar(a: RationalTerm, b: RationalTerm) -> bool:
    """Exact equality of the denoted rational trees."""
    return a._canonical() == b._canonical()


def equal_to_depth(a: RationalTerm, b: RationalTerm, depth: int) -> bool:
    """Do the trees agree down to ``depth`` nested argument positions?
    At the budget's end matching root functors count as agreement."""
    na, nb = a.nodes, b.nodes
    memo: dict[tuple[int, int, int], bool] = {}

    def go(i: int, j: int, d: int) -> bool:
        key = (i, j, d)
        hit = memo.get(key)
        if hit is not None:
            return hit
        ea, eb = na[i], nb[j]
        if ea[0] == "var" or eb[0] == "var":
            res = ea == eb
        elif ea[1] != eb[1] or len(ea[2]) != len(eb[2]):
            res = False
        elif d <= 0:
            res = True
        else:
            res = all(go(ci, cj, d - 1) for ci, cj in zip(ea[2], eb[2]))
        memo[key] = res
        return res

    return go(a.root, b.root, depth)


def unfold(rt: RationalTerm, depth: int) -> Term:
    """Materialize the tree down to ``depth`` functor layers; deeper
    structure is replaced by the marker constant ``$cut``."""
    nodes = rt.nodes

    def go(i: int, d: int) -> Term:
        e = nodes[i]
        if e[0] == "var":
            return Var(e[1])
        if d <= 0:
            return CUT
        return Compound(e[1], tuple(go(c, d - 1) for c in e[2]))

    return go(rt.root, depth)


class ISubstitution:
    """A most general solution over rational trees, as produced by
    :func:`solve_rational`. Bindings are read off lazily from the
    solved union-find forest."""

    def __init__(self, varmap: dict[Var, _Node]):
        self._varmap = varmap

    @property
    def domain(self) -> list[Var]:
        out = []
        for v, node in self._varmap.items():
            rep = _find(node)
            if rep.kind != "var" or rep.name != v.name:
                out.append(v)
        return out

    def binding(self, v: Var) -> RationalTerm:
        node = self._varmap.get(v)
        if node is None:
            return RationalTerm.from_term(v)
        return _freeze(node)

    def bindings(self) -> dict[Var, RationalTerm]:
        return {v: self.binding(v) for v in self.domain}

    def apply(self, t: Term) -> RationalTerm:
        varmap = dict(self._varmap)
        return _freeze(_node_of(t, varmap))

    def describe(self, depth: int = 4) -> str:
        from .parser import render

        parts = [
            f"{v.name}/{render(unfold(self.binding(v), depth))}"
            for v in sorted(self.domain, key=lambda v: v.name)
        ]
        return "{" + ", ".join(parts) + "}"

    def __repr__(self) -> str:
        return f"ISubstitution({self.describe()})"


def solve_rational(eqs: EquationSet | Iterable[Equation]) -> ISubstitution | None:
    """Solve the equations over rational trees. Returns the most
    general solution, or None exactly when some closure step clashes
    on distinct functors; there is no occur failure here."""
    varmap: dict[Var, _Node] = {}
    stack: list[tuple[_Node, _Node]] = []
    for eq in eqs:
        stack.append((_node_of(eq.lhs, varmap), _node_of(eq.rhs, varmap)))
    while stack:
        x, y = stack.pop()
        a, b = _find(x), _find(y)
        if a is b:
            continue
        if a.kind == "var":
            a.parent = b
        elif b.kind == "var":
            b.parent = a
        else:
            if a.functor != b.functor or len(a.args) != len(b.args):
                return None
            b.parent = a
            stack.extend(zip(a.args, b.args))
    return ISubstitution(varmap)


def has_i_solution(eqs: EquationSet | Iterable[Equation]) -> bool:
    return solve_rational(eqs) is not None


def _satisfies(sub: ISubstitution, eqs: EquationSet, depth: int) -> bool:
    return all(equal_to_depth(sub.apply(eq.lhs), sub.apply(eq.rhs), depth) for eq in eqs)


def i_equivalent(e1: EquationSet, e2: EquationSet, depth: int = 32) -> bool:
    """Do the two equation sets constrain their variables the same way
    over rational trees? Each one's most general solution must satisfy
    the other (checked to ``depth``); two unsolvable sets are
    equivalent."""
    s1, s2 = solve_rational(e1), solve_rational(e2)
    if s1 is None or s2 is None:
        return s1 is None and s2 is None
    return _satisfies(s1, e2, depth) and _satisfies(s2, e1, depth)
