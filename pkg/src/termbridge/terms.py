"""Expression trees and their canonical s-expression text form.

Grammar (UTF-8, whitespace-insensitive between tokens, ``;`` starts a
line comment):

    term := (sym "URI")
          | (var IDENT)
          | (lit IDENT "TEXT")
          | (app term term+)
          | (bind "URI" (bvar+) term)
          | (hole N)
    bvar := (IDENT) | (IDENT term)

``sym`` references a library constant, ``bind`` a binder constant with a
telescope of bound variables (each optionally typed).  ``hole`` nodes mark
argument slots a translation could not fill; they parse and serialize like
any other node so translator output stays machine-readable.

Serialization is canonical: single spaces between tokens, strings quoted
with ``\\`` escapes.  ``parse_term(serialize(t)) == t`` for every term.
"""

from __future__ import annotations

from dataclasses import dataclass

from .uris import MalformedURI, SymbolURI, format_uri, parse_uri


class ParseError(ValueError):
    """Syntax error in term text; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnknownHeadKeyword(ParseError):
    """A parenthesized node starts with an unrecognized tag."""


class Term:
    """Base class for expression nodes; all instances are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class Sym(Term):
    uri: SymbolURI


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Lit(Term):
    kind: str
    value: str


@dataclass(frozen=True)
class Hole(Term):
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"hole index must be positive, got {self.index}")


@dataclass(frozen=True)
class App(Term):
    head: Term
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("application must have at least one argument")


@dataclass(frozen=True)
class BoundVar:
    name: str
    type: Term | None = None


@dataclass(frozen=True)
class Bind(Term):
    binder: SymbolURI
    bound: tuple[BoundVar, ...]
    body: Term

    def __post_init__(self) -> None:
        if not self.bound:
            raise ValueError("binder must bind at least one variable")
        names = [b.name for b in self.bound]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate bound variable in {names}")


# --- tokenizer -------------------------------------------------------------

_ATOM_END = set(' \t\r\n();"')


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, c: str) -> None:
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1

    def _skip_blank(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance(c)
            elif c == ";":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance(self.text[self.pos])
            else:
                return

    def next(self) -> tuple[str, str, int, int]:
        """Return (kind, value, line, col); kind in {'(', ')', 'str', 'atom', 'eof'}."""
        self._skip_blank()
        line, col = self.line, self.col
        if self.pos >= len(self.text):
            return ("eof", "", line, col)
        c = self.text[self.pos]
        if c in "()":
            self._advance(c)
            return (c, c, line, col)
        if c == '"':
            self._advance(c)
            out = []
            while True:
                if self.pos >= len(self.text):
                    raise ParseError("unterminated string", line, col)
                c = self.text[self.pos]
                self._advance(c)
                if c == "\\":
                    if self.pos >= len(self.text):
                        raise ParseError("unterminated escape", self.line, self.col)
                    esc = self.text[self.pos]
                    self._advance(esc)
                    if esc not in '\\"':
                        raise ParseError(f"unknown escape '\\{esc}'", self.line, self.col)
                    out.append(esc)
                elif c == '"':
                    return ("str", "".join(out), line, col)
                else:
                    out.append(c)
        out = []
        while self.pos < len(self.text) and self.text[self.pos] not in _ATOM_END:
            out.append(self.text[self.pos])
            self._advance(self.text[self.pos])
        return ("atom", "".join(out), line, col)

    def peek(self) -> tuple[str, str, int, int]:
        saved = (self.pos, self.line, self.col)
        tok = self.next()
        self.pos, self.line, self.col = saved
        return tok


# --- parser ----------------------------------------------------------------

_NODE_TAGS = {"sym", "var", "lit", "app", "bind", "hole"}


def parse_term(text: str) -> Term:
    """Parse exactly one term; trailing non-blank input is an error."""
    lex = _Lexer(text)
    term = _parse(lex)
    kind, _, line, col = lex.next()
    if kind != "eof":
        raise ParseError("unexpected trailing input", line, col)
    return term


def _expect(lex: _Lexer, kind: str, what: str) -> tuple[str, int, int]:
    k, value, line, col = lex.next()
    if k != kind:
        raise ParseError(f"expected {what}", line, col)
    return value, line, col


def _parse_uri_token(lex: _Lexer) -> SymbolURI:
    value, line, col = _expect(lex, "str", "quoted URI")
    try:
        return parse_uri(value)
    except MalformedURI as exc:
        raise ParseError(str(exc), line, col) from exc


def _parse(lex: _Lexer) -> Term:
    kind, value, line, col = lex.next()
    if kind == "eof":
        raise ParseError("unexpected end of input", line, col)
    if kind != "(":
        raise ParseError("expected '('", line, col)
    tag, tline, tcol = _expect(lex, "atom", "node tag")
    if tag not in _NODE_TAGS:
        raise UnknownHeadKeyword(f"unknown node tag '{tag}'", tline, tcol)

    if tag == "sym":
        uri = _parse_uri_token(lex)
        _expect(lex, ")", "')'")
        return Sym(uri)

    if tag == "var":
        name, _, _ = _expect(lex, "atom", "variable name")
        _expect(lex, ")", "')'")
        return Var(name)

    if tag == "lit":
        lkind, _, _ = _expect(lex, "atom", "literal kind")
        lvalue, _, _ = _expect(lex, "str", "quoted literal value")
        _expect(lex, ")", "')'")
        return Lit(lkind, lvalue)

    if tag == "hole":
        num, nline, ncol = _expect(lex, "atom", "hole index")
        if not num.isdigit() or int(num) < 1:
            raise ParseError(f"hole index must be a positive integer, got '{num}'", nline, ncol)
        _expect(lex, ")", "')'")
        return Hole(int(num))

    if tag == "app":
        head = _parse(lex)
        args = []
        while True:
            k, _, aline, acol = lex.peek()
            if k == ")":
                lex.next()
                break
            if k == "eof":
                raise ParseError("unterminated application", aline, acol)
            args.append(_parse(lex))
        if not args:
            raise ParseError("application needs at least one argument", line, col)
        return App(head, tuple(args))

    # bind
    binder = _parse_uri_token(lex)
    _expect(lex, "(", "'(' opening bound-variable list")
    bound = []
    while True:
        k, _, bline, bcol = lex.peek()
        if k == ")":
            lex.next()
            break
        if k != "(":
            raise ParseError("expected '(' starting a bound variable", bline, bcol)
        lex.next()
        name, _, _ = _expect(lex, "atom", "bound variable name")
        k2, _, _, _ = lex.peek()
        if k2 == ")":
            lex.next()
            bound.append(BoundVar(name))
        else:
            bound.append(BoundVar(name, _parse(lex)))
            _expect(lex, ")", "')' closing bound variable")
    if not bound:
        raise ParseError("binder needs at least one bound variable", line, col)
    try:
        bind = Bind(binder, tuple(bound), _parse(lex))
    except ValueError as exc:
        raise ParseError(str(exc), line, col) from exc
    _expect(lex, ")", "')'")
    return bind


# --- serialization ---------------------------------------------------------


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize(term: Term) -> str:
    """Canonical single-line text; inverse of parse_term."""
    if isinstance(term, Sym):
        return f"(sym {_quote(format_uri(term.uri))})"
    if isinstance(term, Var):
        return f"(var {term.name})"
    if isinstance(term, Lit):
        return f"(lit {term.kind} {_quote(term.value)})"
    if isinstance(term, Hole):
        return f"(hole {term.index})"
    if isinstance(term, App):
        parts = [serialize(term.head)] + [serialize(a) for a in term.args]
        return f"(app {' '.join(parts)})"
    if isinstance(term, Bind):
        bvars = []
        for b in term.bound:
            if b.type is None:
                bvars.append(f"({b.name})")
            else:
                bvars.append(f"({b.name} {serialize(b.type)})")
        return f"(bind {_quote(format_uri(term.binder))} ({' '.join(bvars)}) {serialize(term.body)})"
    raise TypeError(f"not a term: {term!r}")


# --- queries ---------------------------------------------------------------


def symbols_of(term: Term) -> set[SymbolURI]:
    """All constant URIs in the term: Sym nodes, binders, bound-variable types."""
    out: set[SymbolURI] = set()
    _collect_symbols(term, out)
    return out


def _collect_symbols(term: Term, out: set[SymbolURI]) -> None:
    if isinstance(term, Sym):
        out.add(term.uri)
    elif isinstance(term, App):
        _collect_symbols(term.head, out)
        for a in term.args:
            _collect_symbols(a, out)
    elif isinstance(term, Bind):
        out.add(term.binder)
        for b in term.bound:
            if b.type is not None:
                _collect_symbols(b.type, out)
        _collect_symbols(term.body, out)


def free_vars(term: Term) -> set[str]:
    """Variable names free in the term; bound types form a telescope."""
    return _free_vars(term, frozenset())


def _free_vars(term: Term, bound: frozenset[str]) -> set[str]:
    if isinstance(term, Var):
        return set() if term.name in bound else {term.name}
    if isinstance(term, App):
        out = _free_vars(term.head, bound)
        for a in term.args:
            out |= _free_vars(a, bound)
        return out
    if isinstance(term, Bind):
        out: set[str] = set()
        scope = bound
        for b in term.bound:
            if b.type is not None:
                out |= _free_vars(b.type, scope)
            scope = scope | {b.name}
        return out | _free_vars(term.body, scope)
    return set()


def node_count(term: Term) -> int:
    """Number of tree nodes, bound-variable types included."""
    if isinstance(term, App):
        return 1 + node_count(term.head) + sum(node_count(a) for a in term.args)
    if isinstance(term, Bind):
        types = sum(node_count(b.type) for b in term.bound if b.type is not None)
        return 1 + types + node_count(term.body)
    return 1
