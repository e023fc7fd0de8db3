"""Alignment graph construction, path search, and expression rewriting.

Translation of a whole expression works bottom-up: arguments first, then
the head symbol of each node.  For every symbol occurrence the engine
finds a shortest directed path through the alignment graph into the
target library (ties broken by total edge priority, then by the target
URI), composes the argument maps along the path, and rewrites the
occurrence.  Template edges expand a symbol-with-arguments into a term
pattern; whatever the expansion introduces is translated recursively.
Symbols with no path stay in place and are reported, so a translation is
always produced even when it is only partial.

Grouped alignments are kept consistent across the whole expression: once
any edge of a named group is used, every other symbol the group covers
must route through its group edge too, or both occurrences are reported
untranslated with a group-conflict note.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .alignments import Alignment, Bidirectional, Direction, Unidirectional, Unusable, classify
from .argmaps import (
    ArgMap,
    ArityMismatch,
    apply_argmap,
    compose_argmaps,
    inferred_arity,
    invert_argmap,
)
from .interfaces import DialectRules, TemplateRule, expand_template, normalize_dialect
from .terms import App, Bind, BoundVar, Hole, Lit, Sym, Term, Var, symbols_of
from .uris import LibraryId, LibraryTable, SymbolURI, format_uri

_MAX_EXPANSION_DEPTH = 12


@dataclass(frozen=True)
class AlignEdge:
    source: SymbolURI
    target: SymbolURI
    argmap: ArgMap
    used_direction: Direction
    priority: int = 0
    group: str | None = None

    def describe(self) -> str:
        args = f' arguments="{self.argmap}"' if self.argmap.pairs else ""
        return f"{self.source} -> {self.target} [{self.used_direction.value}]{args}"


@dataclass(frozen=True)
class TemplateEdge:
    source: SymbolURI
    target: SymbolURI
    rule: TemplateRule
    priority: int = 0
    group: str | None = None

    def describe(self) -> str:
        return f"{self.source} -> {self.target} [template/{self.rule.pattern_arity}]"


Edge = AlignEdge | TemplateEdge


class AlignmentGraph:
    """Directed multigraph over symbols; immutable once built."""

    def __init__(self, libraries: LibraryTable):
        self.libraries = libraries
        self.nodes: set[SymbolURI] = set()
        self._adjacency: dict[SymbolURI, list[Edge]] = {}
        self.groups: dict[str, list[Edge]] = {}
        self.excluded: list[tuple[Alignment, str]] = []
        self.warnings: list[str] = []

    def _add_edge(self, edge: Edge) -> None:
        self.nodes.add(edge.source)
        self.nodes.add(edge.target)
        existing = self._adjacency.setdefault(edge.source, [])
        for other in existing:
            if other.target == edge.target and type(other) is type(edge):
                self.warnings.append(f"duplicate edge {edge.describe()}")
                break
        existing.append(edge)
        if edge.group:
            self.groups.setdefault(edge.group, []).append(edge)

    def _freeze(self) -> None:
        for edges in self._adjacency.values():
            edges.sort(key=lambda e: -e.priority)  # stable: insertion order on ties

    def edges_from(self, sym: SymbolURI) -> list[Edge]:
        return self._adjacency.get(sym, [])

    def edge_count(self) -> int:
        return sum(len(edges) for edges in self._adjacency.values())

    def library_of(self, sym: SymbolURI) -> LibraryId | None:
        return self.libraries.lookup(sym)


def build_graph(
    alignments: list[Alignment],
    templates: list[TemplateRule] | tuple[TemplateRule, ...] = (),
    libraries: LibraryTable = LibraryTable(),
) -> AlignmentGraph:
    """One directed edge per usable alignment direction plus template edges.

    Unusable alignments are excluded with their reason; group membership
    is taken from the alignments' ``group`` fields and kept for the
    rewrite phase.
    """
    graph = AlignmentGraph(libraries)
    for a in alignments:
        cls = classify(a)
        if isinstance(cls, Unusable):
            graph.excluded.append((a, cls.reason))
            continue
        forward = AlignEdge(a.source, a.target, a.argmap, Direction.FORWARD, a.priority, a.group)
        backward = AlignEdge(
            a.target, a.source, invert_argmap(a.argmap), Direction.BACKWARD, a.priority, a.group
        )
        if isinstance(cls, Bidirectional):
            graph._add_edge(forward)
            graph._add_edge(backward)
        elif cls.usable is Direction.FORWARD:
            graph._add_edge(forward)
        else:
            graph._add_edge(backward)
    for rule in templates:
        target = _template_target(rule)
        if target is None:
            graph.warnings.append(
                f"template for {rule.source} has no symbol at its root; edge skipped"
            )
            continue
        graph._add_edge(TemplateEdge(rule.source, target, rule))
    graph._freeze()
    return graph


def _template_target(rule: TemplateRule) -> SymbolURI | None:
    """Root symbol of the expansion: binder of a Bind, head symbol of an App."""
    term = rule.template
    while True:
        if isinstance(term, Bind):
            return term.binder
        if isinstance(term, Sym):
            return term.uri
        if isinstance(term, App):
            term = term.head
        else:
            return None


def find_path(
    source: SymbolURI, target: LibraryId, graph: AlignmentGraph
) -> tuple[list[Edge], ArgMap] | None:
    """Shortest edge path from ``source`` into any symbol of ``target``.

    Ties are broken by larger total priority, then by lexicographically
    smaller target URI.  The returned map is the left-to-right composition
    of the align edges' maps (template edges restart the composition,
    since the expansion consumes the arguments itself).
    """
    if graph.library_of(source) == target:
        return ([], ArgMap())
    if source not in graph.nodes:
        return None

    dist: dict[SymbolURI, int] = {source: 0}
    queue = deque([source])
    layers: dict[int, list[SymbolURI]] = {0: [source]}
    while queue:
        node = queue.popleft()
        for edge in graph.edges_from(node):
            if edge.target not in dist:
                dist[edge.target] = dist[node] + 1
                layers.setdefault(dist[edge.target], []).append(edge.target)
                queue.append(edge.target)

    goals = [n for n in dist if n != source and graph.library_of(n) == target]
    if not goals:
        return None
    goal_dist = min(dist[n] for n in goals)

    # widest-priority path over the BFS layer structure, deterministic order
    best_prio: dict[SymbolURI, int] = {source: 0}
    best_path: dict[SymbolURI, tuple[Edge, ...]] = {source: ()}
    for d in range(goal_dist):
        for node in sorted(layers.get(d, []), key=format_uri):
            if node not in best_prio:
                continue
            for edge in graph.edges_from(node):
                if dist.get(edge.target) != d + 1:
                    continue
                cand = best_prio[node] + edge.priority
                if edge.target not in best_prio or cand > best_prio[edge.target]:
                    best_prio[edge.target] = cand
                    best_path[edge.target] = best_path[node] + (edge,)

    chosen = min(
        (n for n in goals if dist[n] == goal_dist),
        key=lambda n: (-best_prio[n], format_uri(n)),
    )
    path = list(best_path[chosen])
    return (path, _compose_path(path))


def _compose_path(path: list[Edge]) -> ArgMap:
    acc = ArgMap()
    for edge in path:
        if isinstance(edge, AlignEdge):
            acc = compose_argmaps(acc, edge.argmap)
        else:
            acc = ArgMap()
    return acc


def _path_via(edge: Edge, target: LibraryId, graph: AlignmentGraph) -> tuple[list[Edge], ArgMap] | None:
    tail = find_path(edge.target, target, graph)
    if tail is None:
        return None
    path = [edge] + tail[0]
    return (path, _compose_path(path))


def reachable_libraries(sym: SymbolURI, graph: AlignmentGraph) -> set[LibraryId]:
    """Libraries of every symbol reachable from ``sym``, its own included."""
    out: set[LibraryId] = set()
    own = graph.library_of(sym)
    if own is not None:
        out.add(own)
    seen = {sym}
    queue = deque([sym])
    while queue:
        node = queue.popleft()
        for edge in graph.edges_from(node):
            if edge.target not in seen:
                seen.add(edge.target)
                lib = graph.library_of(edge.target)
                if lib is not None:
                    out.add(lib)
                queue.append(edge.target)
    return out


# --- translation -------------------------------------------------------------


@dataclass(frozen=True)
class TranslationResult:
    term: Term
    untranslated: frozenset[SymbolURI]
    paths_used: dict[SymbolURI, tuple[Edge, ...]]
    complete: bool
    holes: int = 0
    notes: tuple[str, ...] = ()


@dataclass
class _Rewriter:
    graph: AlignmentGraph
    target: LibraryId
    resolutions: dict[SymbolURI, tuple[list[Edge], ArgMap] | None]
    forced: dict[SymbolURI, tuple[list[Edge], ArgMap]]
    blocked: dict[SymbolURI, str]
    untranslated: set[SymbolURI] = field(default_factory=set)
    paths_used: dict[SymbolURI, tuple[Edge, ...]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def fork(self) -> "_Rewriter":
        return _Rewriter(
            self.graph, self.target, self.resolutions, self.forced, self.blocked
        )

    def absorb(self, child: "_Rewriter") -> None:
        self.untranslated |= child.untranslated
        self.paths_used.update(child.paths_used)
        self.notes.extend(child.notes)

    def resolve(self, sym: SymbolURI) -> tuple[list[Edge], ArgMap] | None:
        if sym in self.blocked:
            return None
        if sym in self.forced:
            return self.forced[sym]
        if sym not in self.resolutions:
            self.resolutions[sym] = find_path(sym, self.target, self.graph)
        return self.resolutions[sym]

    def fail(self, sym: SymbolURI, reason: str | None) -> None:
        self.untranslated.add(sym)
        if reason:
            self.notes.append(f"{sym}: {reason}")

    def record(self, sym: SymbolURI, path: list[Edge]) -> None:
        if path:
            self.paths_used[sym] = tuple(path)

    # -- traversal

    def rewrite(self, term: Term, depth: int) -> Term:
        if isinstance(term, (Var, Lit, Hole)):
            return term
        if isinstance(term, Sym):
            return self._rewrite_symbol(term, None, depth)
        if isinstance(term, App):
            args = tuple(self.rewrite(a, depth) for a in term.args)
            if isinstance(term.head, Sym):
                return self._rewrite_symbol(term.head, args, depth)
            return App(self.rewrite(term.head, depth), args)
        if isinstance(term, Bind):
            bound = tuple(
                BoundVar(b.name, self.rewrite(b.type, depth) if b.type is not None else None)
                for b in term.bound
            )
            body = self.rewrite(term.body, depth)
            binder = self._rewrite_binder(term.binder)
            return Bind(binder, bound, body)
        raise TypeError(f"not a term: {term!r}")

    def _rewrite_binder(self, binder: SymbolURI) -> SymbolURI:
        resolution = self.resolve(binder)
        if resolution is None:
            self.fail(binder, "GroupConflict" if binder in self.blocked else None)
            return binder
        path, _ = resolution
        current = binder
        for edge in path:
            if isinstance(edge, TemplateEdge):
                self.fail(binder, "template expansion cannot apply to a binder occurrence")
                return binder
            current = edge.target  # binders take no positional arguments; map irrelevant
        self.record(binder, path)
        return current

    def _rewrite_symbol(self, head: Sym, args: tuple[Term, ...] | None, depth: int) -> Term:
        sym = head.uri
        fallback = head if args is None else App(head, args)
        resolution = self.resolve(sym)
        if resolution is None:
            self.fail(sym, "GroupConflict" if sym in self.blocked else None)
            return fallback
        path, _ = resolution
        result = self._execute(sym, path, args, depth)
        if result is None:
            return fallback
        self.record(sym, path)
        return result

    def _execute(
        self, sym: SymbolURI, path: list[Edge], args: tuple[Term, ...] | None, depth: int
    ) -> Term | None:
        current = sym
        pending = ArgMap()
        term: Term | None = None
        expanded = False
        for edge in path:
            if isinstance(edge, AlignEdge):
                if term is None:
                    current = edge.target
                    pending = compose_argmaps(pending, edge.argmap)
                    continue
                term = self._retarget_root(sym, term, edge)
                if term is None:
                    return None
            else:
                term = self._expand(sym, edge.rule, term, pending, args)
                if term is None:
                    return None
                pending = ArgMap()
                expanded = True

        if term is None:
            return self._finish_plain(sym, current, pending, args)

        if expanded and depth < _MAX_EXPANSION_DEPTH:
            trial = self.fork()
            candidate = trial.rewrite(term, depth + 1)
            leftover = {
                s
                for s in symbols_of(candidate)
                if self.graph.library_of(s) != self.target
            }
            if args:
                for a in args:
                    leftover -= symbols_of(a)
            if leftover:
                self.fail(sym, f"expansion left {len(leftover)} untranslatable symbol(s)")
                return None
            self.absorb(trial)
            return candidate
        if expanded:
            self.fail(sym, "expansion depth limit reached")
            return None
        return term

    def _retarget_root(self, sym: SymbolURI, term: Term, edge: AlignEdge) -> Term | None:
        if isinstance(term, Bind):
            if not edge.argmap.is_identity:
                self.fail(sym, "argument map cannot apply to a binder")
                return None
            return Bind(edge.target, term.bound, term.body)
        if isinstance(term, App) and isinstance(term.head, Sym):
            slots = self._permuted(sym, edge.argmap, term.args)
            if slots is None:
                return None
            return App(Sym(edge.target), slots) if slots else Sym(edge.target)
        if isinstance(term, Sym):
            return Sym(edge.target)
        self.fail(sym, "cannot continue translation from a non-symbol root")
        return None

    def _expand(
        self,
        sym: SymbolURI,
        rule: TemplateRule,
        term: Term | None,
        pending: ArgMap,
        args: tuple[Term, ...] | None,
    ) -> Term | None:
        if term is None:
            supplied = list(args) if args is not None else []
            try:
                slots = apply_argmap(pending, supplied, rule.pattern_arity)
            except ArityMismatch as exc:
                self.fail(sym, str(exc))
                return None
        elif isinstance(term, App) and isinstance(term.head, Sym) and term.head.uri == rule.source:
            if len(term.args) != rule.pattern_arity:
                self.fail(sym, f"expansion arity {rule.pattern_arity} != {len(term.args)}")
                return None
            slots = list(term.args)
        elif isinstance(term, Sym) and term.uri == rule.source and rule.pattern_arity == 0:
            slots = []
        else:
            self.fail(sym, "template does not match the intermediate term")
            return None
        filled = [s if s is not None else Hole(i + 1) for i, s in enumerate(slots)]
        return expand_template(rule, filled)

    def _finish_plain(
        self, sym: SymbolURI, current: SymbolURI, pending: ArgMap, args: tuple[Term, ...] | None
    ) -> Term | None:
        if args is None:
            return Sym(current)
        slots = self._permuted(sym, pending, args)
        if slots is None:
            return None
        return App(Sym(current), slots) if slots else Sym(current)

    def _permuted(
        self, sym: SymbolURI, argmap: ArgMap, args: tuple[Term, ...]
    ) -> tuple[Term, ...] | None:
        try:
            slots = apply_argmap(argmap, list(args), inferred_arity(argmap, len(args)))
        except ArityMismatch as exc:
            self.fail(sym, str(exc))
            return None
        return tuple(s if s is not None else Hole(i + 1) for i, s in enumerate(slots))


def _count_holes(term: Term) -> int:
    if isinstance(term, Hole):
        return 1
    if isinstance(term, App):
        return _count_holes(term.head) + sum(_count_holes(a) for a in term.args)
    if isinstance(term, Bind):
        types = sum(_count_holes(b.type) for b in term.bound if b.type is not None)
        return types + _count_holes(term.body)
    return 0


def translate(
    term: Term,
    target: LibraryId,
    graph: AlignmentGraph,
    dialect: DialectRules | None = None,
) -> TranslationResult:
    """Rewrite every symbol occurrence of ``term`` into ``target``'s dialect.

    Never raises for coverage gaps: symbols without a path, occurrences
    whose argument map cannot apply, and group conflicts are reported in
    ``untranslated``/``notes`` while the rest of the expression is still
    translated.
    """
    dialect = dialect or DialectRules()
    prepared = normalize_dialect(term, dialect.pre)
    input_symbols = symbols_of(prepared)

    resolutions: dict[SymbolURI, tuple[list[Edge], ArgMap] | None] = {}
    forced: dict[SymbolURI, tuple[list[Edge], ArgMap]] = {}
    blocked: dict[SymbolURI, str] = {}
    rewriter = _Rewriter(graph, target, resolutions, forced, blocked)
    core = rewriter.rewrite(prepared, 0)

    for _ in range(4):
        changes, conflicts = _group_adjustments(rewriter, input_symbols)
        if not changes and not conflicts:
            break
        forced.update(changes)
        for s in conflicts:
            blocked[s] = "group conflict"
        rewriter = _Rewriter(graph, target, resolutions, forced, blocked)
        core = rewriter.rewrite(prepared, 0)

    result = normalize_dialect(core, dialect.post)
    holes = _count_holes(result)
    return TranslationResult(
        term=result,
        untranslated=frozenset(rewriter.untranslated),
        paths_used=dict(rewriter.paths_used),
        complete=not rewriter.untranslated and holes == 0,
        holes=holes,
        notes=tuple(rewriter.notes),
    )


def _group_adjustments(
    rewriter: _Rewriter, input_symbols: set[SymbolURI]
) -> tuple[dict[SymbolURI, tuple[list[Edge], ArgMap]], set[SymbolURI]]:
    """Force group-covered symbols onto their group edges; detect conflicts."""
    graph = rewriter.graph
    active = sorted(
        {e.group for path in rewriter.paths_used.values() for e in path if e.group}
    )
    changes: dict[SymbolURI, tuple[list[Edge], ArgMap]] = {}
    conflicts: set[SymbolURI] = set()
    for group in active:
        group_edges = graph.groups.get(group, [])
        activators = {
            s
            for s, path in rewriter.paths_used.items()
            if any(e.group == group for e in path)
        }
        covered = sorted({e.source for e in group_edges} & input_symbols, key=format_uri)
        for sym in covered:
            if sym in rewriter.blocked or sym in changes:
                continue
            used = rewriter.paths_used.get(sym)
            if used is not None and any(e.group == group for e in used):
                continue
            rerouted = None
            for edge in sorted(
                (e for e in group_edges if e.source == sym), key=lambda e: -e.priority
            ):
                rerouted = _path_via(edge, rewriter.target, graph)
                if rerouted is not None:
                    break
            if rerouted is not None:
                changes[sym] = rerouted
            elif used is not None:
                # the symbol translated around the group: conflict on both sides
                conflicts.add(sym)
                conflicts |= activators
    return changes, conflicts
