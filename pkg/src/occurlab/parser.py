"""Reader and printer for the Prolog-subset concrete syntax.

Accepted input: facts and rules over compound terms, variables,
``_`` wildcards (each occurrence becomes a distinct fresh variable),
``[...]`` list sugar with ``|`` tails, nonnegative decimal literals
(expanded to s/1 towers over 0), quoted functors, and ``%`` line
comments. Within one parse a functor or predicate may be used at a
single arity only; a second arity raises :class:`ArityConflictError`.

Variable names of the reserved fresh shape (``_G7``) are refused by
default so that generated names can never be captured by input text;
pass ``allow_reserved=True`` to read back text the toolkit printed
itself.
"""

from __future__ import annotations

import re
from typing import Iterator

from .terms import (
    FRESH_PREFIX,
    Atom,
    Clause,
    Compound,
    Equation,
    EquationSet,
    Program,
    Query,
    Substitution,
    Term,
    Var,
    is_reserved_name,
    list_parts,
)

__all__ = [
    "ParseError",
    "ArityConflictError",
    "parse_program",
    "parse_query",
    "parse_equations",
    "render",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class ArityConflictError(ParseError):
    """One symbol used at two different arities within a single parse."""


_NAME_RE = re.compile(r"[a-z][A-Za-z0-9_]*")
_VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"[0-9]+")
_PLAIN_NAME_RE = re.compile(r"^[a-z][A-Za-z0-9_]*$")


class _Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind: str, value, line: int, col: int):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col


def _tokenize(text: str) -> Iterator[_Token]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == ":" and text[i : i + 2] == ":-":
            yield _Token("punct", ":-", start_line, start_col)
            i += 2
            col += 2
            continue
        if ch in "()[],|=.":
            yield _Token("punct", ch, start_line, start_col)
            i += 1
            col += 1
            continue
        if ch == "'":
            j = text.find("'", i + 1)
            if j < 0 or "\n" in text[i:j]:
                raise ParseError("unterminated quoted name", start_line, start_col)
            yield _Token("name", text[i + 1 : j], start_line, start_col)
            col += j + 1 - i
            i = j + 1
            continue
        m = _INT_RE.match(text, i)
        if m:
            yield _Token("int", int(m.group()), start_line, start_col)
            col += m.end() - i
            i = m.end()
            continue
        m = _VAR_RE.match(text, i)
        if m:
            yield _Token("var", m.group(), start_line, start_col)
            col += m.end() - i
            i = m.end()
            continue
        m = _NAME_RE.match(text, i)
        if m:
            yield _Token("name", m.group(), start_line, start_col)
            col += m.end() - i
            i = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r}", start_line, start_col)
    yield _Token("eof", None, line, col)


class _Parser:
    def __init__(self, text: str, allow_reserved: bool):
        self.tokens = list(_tokenize(text))
        self.pos = 0
        self.allow_reserved = allow_reserved
        self.fresh_counter = 0
        self.functor_arities: dict[str, int] = {}
        self.predicate_arities: dict[str, int] = {}

    # -- token plumbing ------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str) -> _Token:
        tok = self.next()
        if tok.kind != "punct" or tok.value != value:
            raise ParseError(f"expected {value!r}", tok.line, tok.col)
        return tok

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.value == value

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # -- symbol tables -------------------------------------------------

    def register(self, table: dict[str, int], role: str, name: str, arity: int, tok: _Token) -> None:
        old = table.get(name)
        if old is None:
            table[name] = arity
        elif old != arity:
            raise ArityConflictError(
                f"{role} {name} used with arity {old} and arity {arity}",
                tok.line,
                tok.col,
            )

    # -- grammar -------------------------------------------------------

    def fresh_var(self) -> Var:
        self.fresh_counter += 1
        return Var(f"{FRESH_PREFIX}{self.fresh_counter}")

    def nat(self, n: int, tok: _Token) -> Term:
        self.register(self.functor_arities, "functor", "0", 0, tok)
        if n > 0:
            self.register(self.functor_arities, "functor", "s", 1, tok)
        out: Term = Compound("0")
        for _ in range(n):
            out = Compound("s", (out,))
        return out

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "var":
            self.next()
            if tok.value == "_":
                return self.fresh_var()
            if is_reserved_name(tok.value) and not self.allow_reserved:
                raise ParseError(
                    f"variable name {tok.value} is reserved for generated variables",
                    tok.line,
                    tok.col,
                )
            return Var(tok.value)
        if tok.kind == "int":
            self.next()
            return self.nat(tok.value, tok)
        if tok.kind == "name":
            name, args = self.name_and_args()
            self.register(self.functor_arities, "functor", name, len(args), tok)
            return Compound(name, args)
        if tok.kind == "punct" and tok.value == "[":
            return self.list_term()
        raise self.fail("expected a term")

    def name_and_args(self) -> tuple[str, tuple[Term, ...]]:
        tok = self.next()
        name = tok.value
        args: tuple[Term, ...] = ()
        if self.at_punct("("):
            self.next()
            items = [self.term()]
            while self.at_punct(","):
                self.next()
                items.append(self.term())
            self.expect(")")
            args = tuple(items)
        return name, args

    def list_term(self) -> Term:
        tok = self.expect("[")
        self.register(self.functor_arities, "functor", "[]", 0, tok)
        if self.at_punct("]"):
            self.next()
            return Compound("[]")
        self.register(self.functor_arities, "functor", ".", 2, tok)
        items = [self.term()]
        while self.at_punct(","):
            self.next()
            items.append(self.term())
        tail: Term = Compound("[]")
        if self.at_punct("|"):
            self.next()
            tail = self.term()
        self.expect("]")
        for item in reversed(items):
            tail = Compound(".", (item, tail))
        return tail

    def atom(self) -> Atom:
        tok = self.peek()
        if tok.kind != "name":
            raise self.fail("expected a predicate name")
        name, args = self.name_and_args()
        self.register(self.predicate_arities, "predicate", name, len(args), tok)
        return Atom(name, args)

    def clause(self) -> Clause:
        head = self.atom()
        body: list[Atom] = []
        if self.at_punct(":-"):
            self.next()
            body.append(self.atom())
            while self.at_punct(","):
                self.next()
                body.append(self.atom())
        self.expect(".")
        return Clause(head, tuple(body))

    def program(self) -> Program:
        clauses = []
        while self.peek().kind != "eof":
            clauses.append(self.clause())
        return Program(tuple(clauses))

    def query(self) -> Query:
        atoms = [self.atom()]
        while self.at_punct(","):
            self.next()
            atoms.append(self.atom())
        if self.at_punct("."):
            self.next()
        if self.peek().kind != "eof":
            raise self.fail("trailing input after query")
        return Query(tuple(atoms))

    def equations(self) -> EquationSet:
        if self.peek().kind == "eof":
            return EquationSet()
        eqs = [self.equation()]
        while self.at_punct(","):
            self.next()
            eqs.append(self.equation())
        if self.peek().kind != "eof":
            raise self.fail("trailing input after equations")
        return EquationSet(eqs)

    def equation(self) -> Equation:
        lhs = self.term()
        self.expect("=")
        return Equation(lhs, self.term())


def parse_program(text: str, *, allow_reserved: bool = False) -> Program:
    return _Parser(text, allow_reserved).program()


def parse_query(text: str, *, allow_reserved: bool = False) -> Query:
    return _Parser(text, allow_reserved).query()


def parse_equations(text: str, *, allow_reserved: bool = False) -> EquationSet:
    return _Parser(text, allow_reserved).equations()


def _render_name(name: str) -> str:
    if _PLAIN_NAME_RE.match(name) or name in ("[]", ".", "0"):
        return name
    return f"'{name}'"


def _render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.functor == "." and len(t.args) == 2:
        items, tail = list_parts(t)
        inner = ",".join(_render_term(x) for x in items)
        if tail == Compound("[]"):
            return f"[{inner}]"
        return f"[{inner}|{_render_term(tail)}]"
    if not t.args:
        return _render_name(t.functor)
    return _render_name(t.functor) + "(" + ",".join(_render_term(a) for a in t.args) + ")"


def _render_atom(a: Atom) -> str:
    if not a.args:
        return _render_name(a.predicate)
    return _render_name(a.predicate) + "(" + ",".join(_render_term(t) for t in a.args) + ")"


def render(x) -> str:
    """Canonical text for any syntactic object; parseable back where a
    reader exists (programs, queries, equation sets)."""
    if isinstance(x, (Var, Compound)):
        return _render_term(x)
    if isinstance(x, Atom):
        return _render_atom(x)
    if isinstance(x, Equation):
        return f"{_render_term(x.lhs)} = {_render_term(x.rhs)}"
    if isinstance(x, EquationSet):
        return ", ".join(render(eq) for eq in x)
    if isinstance(x, Substitution):
        inner = ", ".join(
            f"{v.name}/{_render_term(t)}"
            for v, t in sorted(x.items(), key=lambda kv: kv[0].name)
        )
        return "{" + inner + "}"
    if isinstance(x, Clause):
        head = _render_atom(x.head)
        if not x.body:
            return head + "."
        return head + " :- " + ", ".join(_render_atom(a) for a in x.body) + "."
    if isinstance(x, Query):
        return ", ".join(_render_atom(a) for a in x.atoms)
    if isinstance(x, Program):
        return "\n".join(render(c) for c in x.clauses) + "\n"
    if hasattr(x, "describe"):
        return x.describe()
    raise TypeError(f"cannot render {type(x).__name__}")
