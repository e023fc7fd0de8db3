"""Interface theories, definitional templates, and dialect normalization.

An interface theory is a named list of constant declarations that serves
as the hub through which library symbols are related.  The surface syntax
is a deliberately small line-oriented grammar:

    namespace <text>
    theory <Name> [: <meta-ref>] =
      <const> [: <term>] [= <term>] [# <notation>]
      include <ref>
    end

Type and definition components are terms in the s-expression grammar of
:mod:`termbridge.terms`; the notation is verbatim text running to end of
line.  Components may appear in any order, except that the notation is
always last.  ``<ref>`` is either ``namespace?Module`` or a bare theory
name resolved against the file's namespace.  Lines starting with ``//``
are comments.

Template rules give a source symbol a definitional expansion into a
target term with numbered ``(hole n)`` slots, one per argument:

    template <uri> <arity> [drop n,m] -> <term-with-holes>

Dialect rules eliminate or insert wrapper symbols (term-of-type style
coercions) that exist in one formalization level but not the other:

    eliminate <uri> [pre|post]
    insert <uri> <bound-type|app-arg> [pre|post]
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .argmaps import ArityMismatch
from .terms import (
    App,
    Bind,
    BoundVar,
    Hole,
    ParseError,
    Sym,
    Term,
    Var,
    free_vars,
    parse_term,
    symbols_of,
)
from .uris import MalformedURI, SymbolURI


class DuplicateConstant(ValueError):
    pass


class UnknownInclude(ValueError):
    pass


@dataclass(frozen=True)
class Constant:
    name: str
    type: Term | None = None
    definition: Term | None = None
    notation: str | None = None


@dataclass(frozen=True)
class InterfaceTheory:
    namespace: str
    module: str
    meta: tuple[str, str] | None = None
    constants: tuple[Constant, ...] = ()
    includes: tuple[tuple[str, str], ...] = ()

    def uri_of(self, name: str) -> SymbolURI:
        return SymbolURI(self.namespace, self.module, name)

    def constant(self, name: str) -> Constant | None:
        for c in self.constants:
            if c.name == name:
                return c
        return None


def declared_arity(constant: Constant) -> int | None:
    """Arity implied by the notation: its largest argument-number token."""
    if constant.notation is None:
        return None
    numbers = [int(tok) for tok in constant.notation.split() if tok.isdigit()]
    return max(numbers) if numbers else None


# --- theory files ------------------------------------------------------------


def parse_interface(text: str) -> InterfaceTheory:
    """Parse a file containing exactly one theory."""
    theories = parse_interface_file(text)
    if len(theories) != 1:
        raise ParseError(f"expected exactly one theory, found {len(theories)}", 1, 1)
    return theories[0]


def parse_interface_file(text: str) -> list[InterfaceTheory]:
    namespace: str | None = None
    theories: list[InterfaceTheory] = []
    current: dict | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if current is None:
            if line.startswith("namespace "):
                namespace = line[len("namespace ") :].strip()
            elif line.startswith("theory ") or line == "theory":
                if namespace is None:
                    raise ParseError("theory before namespace declaration", lineno, 1)
                current = _parse_theory_header(line, namespace, lineno)
            else:
                raise ParseError(f"expected 'namespace' or 'theory', got {line!r}", lineno, 1)
        else:
            if line == "end":
                theories.append(
                    InterfaceTheory(
                        current["namespace"],
                        current["module"],
                        current["meta"],
                        tuple(current["constants"]),
                        tuple(current["includes"]),
                    )
                )
                current = None
            elif line.startswith("include ") or line == "include":
                ref = line[len("include") :].strip()
                if not ref:
                    raise ParseError("include needs a theory reference", lineno, 1)
                current["includes"].append(_theory_ref(ref, current["namespace"], lineno))
            else:
                _parse_constant(line, lineno, current)
    if current is not None:
        raise ParseError(f"theory {current['module']} not closed with 'end'", lineno, 1)
    return theories


def _parse_theory_header(line: str, namespace: str, lineno: int) -> dict:
    body = line[len("theory") :].strip()
    if not body.endswith("="):
        raise ParseError("theory header must end with '='", lineno, 1)
    body = body[:-1].strip()
    name, _, meta_text = body.partition(":")
    name = name.strip()
    if not name or any(c.isspace() for c in name):
        raise ParseError(f"bad theory name {name!r}", lineno, 1)
    meta = _theory_ref(meta_text.strip(), namespace, lineno) if meta_text.strip() else None
    return {
        "namespace": namespace,
        "module": name,
        "meta": meta,
        "constants": [],
        "includes": [],
    }


def _theory_ref(text: str, namespace: str, lineno: int) -> tuple[str, str]:
    if "?" in text:
        ns, _, module = text.partition("?")
        if not ns or not module or "?" in module:
            raise ParseError(f"bad theory reference {text!r}", lineno, 1)
        return (ns, module)
    return (namespace, text)


_MARKERS = ":=#"


def _split_declaration(line: str, lineno: int) -> tuple[str, dict[str, str]]:
    """Split ``name [: term] [= term] [# notation]`` at top-level markers."""
    parts: dict[str, str] = {}
    depth = 0
    in_str = False
    cuts: list[tuple[int, str]] = []
    i = 0
    while i < len(line):
        c = line[i]
        if in_str:
            if c == "\\":
                i += 1
            elif c == '"':
                in_str = False
        elif c == '"':
            in_str = True
        elif c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif depth == 0 and c in _MARKERS:
            cuts.append((i, c))
            if c == "#":
                break
        i += 1
    name_end = cuts[0][0] if cuts else len(line)
    name = line[:name_end].strip()
    if not name or any(ch.isspace() for ch in name):
        raise ParseError(f"bad constant name {name!r}", lineno, 1)
    for idx, (pos, marker) in enumerate(cuts):
        end = cuts[idx + 1][0] if idx + 1 < len(cuts) else len(line)
        section = line[pos + 1 : end].strip()
        if marker in parts:
            raise ParseError(f"duplicate '{marker}' component", lineno, pos + 1)
        parts[marker] = section
    return name, parts


def _parse_constant(line: str, lineno: int, current: dict) -> None:
    name, parts = _split_declaration(line, lineno)
    if any(c.name == name for c in current["constants"]):
        raise DuplicateConstant(
            f"line {lineno}: constant {name!r} already declared in theory {current['module']}"
        )
    ctype = _sub_term(parts.get(":"), lineno)
    definition = _sub_term(parts.get("="), lineno)
    if definition is not None:
        _check_definition(name, definition, lineno, current)
    notation = parts.get("#") or None
    current["constants"].append(Constant(name, ctype, definition, notation))


def _sub_term(text: str | None, lineno: int) -> Term | None:
    if text is None:
        return None
    if not text:
        raise ParseError("empty component", lineno, 1)
    try:
        return parse_term(text)
    except ParseError as exc:
        raise ParseError(f"in declaration component: {exc}", lineno, 1) from exc


def _check_definition(name: str, definition: Term, lineno: int, current: dict) -> None:
    if free_vars(definition):
        raise ParseError(
            f"definition of {name!r} has free variables {sorted(free_vars(definition))}",
            lineno,
            1,
        )
    declared = {c.name for c in current["constants"]}
    for sym in symbols_of(definition):
        if (
            sym.namespace == current["namespace"]
            and sym.module == current["module"]
            and sym.name not in declared
        ):
            raise ParseError(
                f"definition of {name!r} references {sym.name!r} before its declaration",
                lineno,
                1,
            )


# --- registry ----------------------------------------------------------------


class TheoryRegistry:
    """All loaded theories; constant lookup by full URI is a bijection."""

    def __init__(self) -> None:
        self._theories: dict[tuple[str, str], InterfaceTheory] = {}

    def add(self, theory: InterfaceTheory) -> None:
        key = (theory.namespace, theory.module)
        if key in self._theories:
            raise DuplicateConstant(f"theory {theory.namespace}?{theory.module} already loaded")
        self._theories[key] = theory

    def add_all(self, theories: list[InterfaceTheory]) -> None:
        for t in theories:
            self.add(t)

    def theories(self) -> list[InterfaceTheory]:
        return list(self._theories.values())

    def theory(self, namespace: str, module: str) -> InterfaceTheory | None:
        return self._theories.get((namespace, module))

    def constant(self, uri: SymbolURI) -> Constant | None:
        theory = self._theories.get((uri.namespace, uri.module))
        return theory.constant(uri.name) if theory else None

    def constants(self) -> dict[SymbolURI, Constant]:
        out = {}
        for theory in self._theories.values():
            for c in theory.constants:
                out[theory.uri_of(c.name)] = c
        return out

    def arity_of(self, uri: SymbolURI) -> int | None:
        c = self.constant(uri)
        return declared_arity(c) if c else None

    def validate(self) -> None:
        """Check include/meta references resolve and form no cycle."""
        for theory in self._theories.values():
            refs = list(theory.includes)
            if theory.meta is not None:
                refs.append(theory.meta)
            for ref in refs:
                if ref not in self._theories:
                    raise UnknownInclude(
                        f"theory {theory.module} references unknown theory {ref[0]}?{ref[1]}"
                    )
        # depth-first cycle check over include+meta edges
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {key: WHITE for key in self._theories}

        def visit(key: tuple[str, str], trail: list[str]) -> None:
            color[key] = GRAY
            theory = self._theories[key]
            refs = list(theory.includes) + ([theory.meta] if theory.meta else [])
            for ref in refs:
                if color[ref] == GRAY:
                    raise UnknownInclude(
                        f"include cycle through {' -> '.join(trail + [ref[1]])}"
                    )
                if color[ref] == WHITE:
                    visit(ref, trail + [ref[1]])
            color[key] = BLACK

        for key in self._theories:
            if color[key] == WHITE:
                visit(key, [key[1]])


# --- template rules ----------------------------------------------------------


@dataclass(frozen=True)
class TemplateRule:
    source: SymbolURI
    pattern_arity: int
    template: Term
    dropped: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        used = _holes_of(self.template)
        allowed = set(range(1, self.pattern_arity + 1))
        if not used <= allowed:
            raise ValueError(
                f"template for {self.source} uses holes {sorted(used - allowed)} "
                f"beyond arity {self.pattern_arity}"
            )
        missing = allowed - used - set(self.dropped)
        if missing:
            raise ValueError(
                f"template for {self.source} neither uses nor drops holes {sorted(missing)}"
            )


def _holes_of(term: Term) -> set[int]:
    if isinstance(term, Hole):
        return {term.index}
    if isinstance(term, App):
        out = _holes_of(term.head)
        for a in term.args:
            out |= _holes_of(a)
        return out
    if isinstance(term, Bind):
        out = set()
        for b in term.bound:
            if b.type is not None:
                out |= _holes_of(b.type)
        return out | _holes_of(term.body)
    return set()


def parse_template_file(text: str) -> list[TemplateRule]:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        head, sep, term_text = line.partition("->")
        if not sep:
            raise ParseError("template rule needs '->'", lineno, 1)
        fields = head.split()
        if len(fields) < 3 or fields[0] != "template":
            raise ParseError("expected 'template <uri> <arity> [drop n,m] ->'", lineno, 1)
        try:
            from .uris import parse_uri

            source = parse_uri(fields[1])
        except MalformedURI as exc:
            raise ParseError(str(exc), lineno, 1) from exc
        if not fields[2].isdigit():
            raise ParseError(f"arity is not a number: {fields[2]!r}", lineno, 1)
        arity = int(fields[2])
        dropped: tuple[int, ...] = ()
        if len(fields) > 3:
            if fields[3] != "drop" or len(fields) != 5:
                raise ParseError("expected 'drop n,m' before '->'", lineno, 1)
            dropped = tuple(int(n) for n in fields[4].split(",") if n)
        try:
            template = parse_term(term_text.strip())
            rules.append(TemplateRule(source, arity, template, dropped))
        except (ParseError, ValueError) as exc:
            raise ParseError(f"in template rule: {exc}", lineno, 1) from exc
    return rules


def expand_template(rule: TemplateRule, args: list[Term]) -> Term:
    """Substitute holes with arguments, renaming bound variables that would
    capture a variable free in any argument."""
    if len(args) != rule.pattern_arity:
        raise ArityMismatch(
            f"template for {rule.source} expects {rule.pattern_arity} arguments, "
            f"got {len(args)}"
        )
    avoid = set()
    for a in args:
        avoid |= _all_var_names(a)
    return _fill(rule.template, args, frozenset(avoid))


def _all_var_names(term: Term) -> set[str]:
    if isinstance(term, Var):
        return {term.name}
    if isinstance(term, App):
        out = _all_var_names(term.head)
        for a in term.args:
            out |= _all_var_names(a)
        return out
    if isinstance(term, Bind):
        out = {b.name for b in term.bound}
        for b in term.bound:
            if b.type is not None:
                out |= _all_var_names(b.type)
        return out | _all_var_names(term.body)
    return set()


def _fill(term: Term, args: list[Term], avoid: frozenset[str]) -> Term:
    if isinstance(term, Hole):
        return args[term.index - 1]
    if isinstance(term, App):
        return App(_fill(term.head, args, avoid), tuple(_fill(a, args, avoid) for a in term.args))
    if isinstance(term, Bind):
        if _holes_of(term):
            term = _freshen(term, avoid)
        bound = tuple(
            BoundVar(b.name, _fill(b.type, args, avoid) if b.type is not None else None)
            for b in term.bound
        )
        return Bind(term.binder, bound, _fill(term.body, args, avoid))
    return term


def _freshen(bind: Bind, avoid: frozenset[str]) -> Bind:
    used = set(avoid) | _all_var_names(bind)
    renames = {}
    for b in bind.bound:
        if b.name in avoid:
            n = 1
            while f"{b.name}{n}" in used:
                n += 1
            renames[b.name] = f"{b.name}{n}"
            used.add(f"{b.name}{n}")
    if not renames:
        return bind
    bound = []
    live = dict(renames)
    for b in bind.bound:
        btype = _rename_free(b.type, live) if b.type is not None else None
        bound.append(BoundVar(renames.get(b.name, b.name), btype))
    return Bind(bind.binder, tuple(bound), _rename_free(bind.body, renames))


def _rename_free(term: Term, renames: dict[str, str]) -> Term:
    if not renames:
        return term
    if isinstance(term, Var):
        return Var(renames.get(term.name, term.name))
    if isinstance(term, App):
        return App(
            _rename_free(term.head, renames),
            tuple(_rename_free(a, renames) for a in term.args),
        )
    if isinstance(term, Bind):
        live = {k: v for k, v in renames.items() if k not in {b.name for b in term.bound}}
        bound = tuple(
            BoundVar(b.name, _rename_free(b.type, live) if b.type is not None else None)
            for b in term.bound
        )
        return Bind(term.binder, bound, _rename_free(term.body, live))
    return term


# --- dialect rules -----------------------------------------------------------


@dataclass(frozen=True)
class DialectRule:
    wrapper: SymbolURI
    mode: str  # "eliminate" or "insert"
    context: str | None = None  # insert target: "bound-type" or "app-arg"

    def __post_init__(self) -> None:
        if self.mode not in ("eliminate", "insert"):
            raise ValueError(f"unknown dialect rule mode {self.mode!r}")
        if self.mode == "insert" and self.context not in ("bound-type", "app-arg"):
            raise ValueError(f"insert rule needs context bound-type or app-arg, got {self.context!r}")


@dataclass(frozen=True)
class DialectRules:
    """Rules split by when they run relative to the rewrite pass."""

    pre: tuple[DialectRule, ...] = ()
    post: tuple[DialectRule, ...] = ()


def parse_dialect_file(text: str) -> DialectRules:
    from .uris import parse_uri

    pre: list[DialectRule] = []
    post: list[DialectRule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        fields = line.split()
        try:
            if fields[0] == "eliminate" and len(fields) in (2, 3):
                rule = DialectRule(parse_uri(fields[1]), "eliminate")
                phase = fields[2] if len(fields) == 3 else "pre"
            elif fields[0] == "insert" and len(fields) in (3, 4):
                rule = DialectRule(parse_uri(fields[1]), "insert", fields[2])
                phase = fields[3] if len(fields) == 4 else "post"
            else:
                raise ValueError(f"unrecognized dialect rule {line!r}")
            if phase not in ("pre", "post"):
                raise ValueError(f"phase must be pre or post, got {phase!r}")
        except (MalformedURI, ValueError) as exc:
            raise ParseError(str(exc), lineno, 1) from exc
        (pre if phase == "pre" else post).append(rule)
    return DialectRules(tuple(pre), tuple(post))


def normalize_dialect(term: Term, rules: list[DialectRule] | tuple[DialectRule, ...]) -> Term:
    """Single bottom-up pass: unwrap eliminated wrappers, add inserted ones."""
    elim = {r.wrapper for r in rules if r.mode == "eliminate"}
    ins_arg = [r.wrapper for r in rules if r.mode == "insert" and r.context == "app-arg"]
    ins_btype = [r.wrapper for r in rules if r.mode == "insert" and r.context == "bound-type"]
    if not elim and not ins_arg and not ins_btype:
        return term
    return _normalize(term, elim, ins_arg, ins_btype)


def _wrapped_by(term: Term, wrapper: SymbolURI) -> bool:
    return isinstance(term, App) and isinstance(term.head, Sym) and term.head.uri == wrapper


def _wrap(term: Term, wrappers: list[SymbolURI], skip: SymbolURI | None = None) -> Term:
    for w in wrappers:
        if w != skip and not _wrapped_by(term, w):
            term = App(Sym(w), (term,))
    return term


def _normalize(
    term: Term,
    elim: set[SymbolURI],
    ins_arg: list[SymbolURI],
    ins_btype: list[SymbolURI],
) -> Term:
    if isinstance(term, App):
        head = _normalize(term.head, elim, ins_arg, ins_btype)
        args = tuple(_normalize(a, elim, ins_arg, ins_btype) for a in term.args)
        if isinstance(head, Sym) and head.uri in elim and len(args) == 1:
            return args[0]
        # a wrapper's own argument never gets re-wrapped with itself
        skip = head.uri if isinstance(head, Sym) else None
        return App(head, tuple(_wrap(a, ins_arg, skip) for a in args))
    if isinstance(term, Bind):
        bound = tuple(
            BoundVar(
                b.name,
                _wrap(_normalize(b.type, elim, ins_arg, ins_btype), ins_btype)
                if b.type is not None
                else None,
            )
            for b in term.bound
        )
        return Bind(term.binder, bound, _normalize(term.body, elim, ins_arg, ins_btype))
    return term
