"""Command-line front end: validate, translate, paths, stats, ingest.

All commands read a declarative config file (``key = value`` lines,
``//`` comments, paths relative to the config file):

    alignments = alignments                // files or directories (*.align)
    interfaces = interfaces                // files or directories (*.theory)
    templates = templates/types.template   // template rule files (*.template)
    dialect_rules = dialect.rules          // optional
    library = pvs: PVS                     // namespace prefix -> library id
    library = http://mathhub.info/MitM Interface
    interface_library = Interface          // hub library for statistics

Exit codes are a stable contract: 0 ok/complete, 1 parse error,
2 config error, 3 partial translation or no path.  Results go to
standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import os
import shutil
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .alignments import Alignment, Diagnostic, parse_alignment_file
from .analytics import (
    direction_counts,
    intersection_counts,
    render_directions_records,
    render_directions_tsv,
    render_intersections_records,
    render_intersections_tsv,
)
from .interfaces import (
    DialectRules,
    DuplicateConstant,
    TemplateRule,
    TheoryRegistry,
    UnknownInclude,
    parse_dialect_file,
    parse_interface_file,
    parse_template_file,
)
from .terms import ParseError, parse_term, serialize
from .translator import AlignmentGraph, build_graph, find_path, translate
from .uris import LibraryId, LibraryTable, MalformedURI, parse_uri

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


class ConfigError(Exception):
    pass


@dataclass
class WorkspaceConfig:
    root: Path
    alignment_paths: list[Path] = field(default_factory=list)
    interface_paths: list[Path] = field(default_factory=list)
    template_paths: list[Path] = field(default_factory=list)
    dialect_rule_path: Path | None = None
    library_namespaces: dict[str, LibraryId] = field(default_factory=dict)
    interface_library: LibraryId = LibraryId("Interface")


_LIST_KEYS = {"alignments": "alignment_paths", "interfaces": "interface_paths", "templates": "template_paths"}


def load_config(path: Path) -> WorkspaceConfig:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    config = WorkspaceConfig(root=path.parent)
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key in _LIST_KEYS:
            paths = [config.root / p.strip() for p in value.split(",") if p.strip()]
            getattr(config, _LIST_KEYS[key]).extend(paths)
        elif key == "dialect_rules":
            config.dialect_rule_path = config.root / value
        elif key == "library":
            fields = value.split()
            if len(fields) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'library = <prefix> <id>'")
            config.library_namespaces[fields[0]] = LibraryId(fields[1])
        elif key == "interface_library":
            config.interface_library = LibraryId(value)
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    for p in (
        config.alignment_paths
        + config.interface_paths
        + config.template_paths
        + ([config.dialect_rule_path] if config.dialect_rule_path else [])
    ):
        if not p.exists():
            raise ConfigError(f"referenced path does not exist: {p}")
    return config


def _expand_files(paths: list[Path], suffix: str) -> list[Path]:
    out: list[Path] = []
    for p in paths:
        if p.is_dir():
            out.extend(sorted(p.rglob(f"*{suffix}")))
        else:
            out.append(p)
    return out


@dataclass
class Workspace:
    config: WorkspaceConfig
    libraries: LibraryTable
    alignments: list[Alignment] = field(default_factory=list)
    alignment_files: list[tuple[Path, int, list[Diagnostic]]] = field(default_factory=list)
    registry: TheoryRegistry = field(default_factory=TheoryRegistry)
    templates: list[TemplateRule] = field(default_factory=list)
    dialect: DialectRules = field(default_factory=DialectRules)
    errors: list[str] = field(default_factory=list)
    _graph: AlignmentGraph | None = None

    def graph(self) -> AlignmentGraph:
        if self._graph is None:
            self._graph = build_graph(self.alignments, self.templates, self.libraries)
        return self._graph


def load_workspace(config: WorkspaceConfig) -> Workspace:
    """Load every configured file; parse problems collect into diagnostics."""
    ws = Workspace(config, LibraryTable.from_mapping(config.library_namespaces))
    for path in _expand_files(config.alignment_paths, ".align"):
        parsed = parse_alignment_file(path.read_text(encoding="utf-8"))
        ws.alignments.extend(parsed.alignments)
        ws.alignment_files.append((path, len(parsed.alignments), parsed.diagnostics))
        ws.errors.extend(f"{path}:{d.line}: {d.message}" for d in parsed.diagnostics)
    for path in _expand_files(config.interface_paths, ".theory"):
        try:
            ws.registry.add_all(parse_interface_file(path.read_text(encoding="utf-8")))
        except (ParseError, DuplicateConstant) as exc:
            ws.errors.append(f"{path}: {exc}")
    try:
        ws.registry.validate()
    except (UnknownInclude, DuplicateConstant) as exc:
        ws.errors.append(str(exc))
    for path in _expand_files(config.template_paths, ".template"):
        try:
            ws.templates.extend(parse_template_file(path.read_text(encoding="utf-8")))
        except ParseError as exc:
            ws.errors.append(f"{path}: {exc}")
    if config.dialect_rule_path is not None:
        try:
            ws.dialect = parse_dialect_file(config.dialect_rule_path.read_text(encoding="utf-8"))
        except ParseError as exc:
            ws.errors.append(f"{config.dialect_rule_path}: {exc}")
    ws.errors.extend(_argmap_arity_problems(ws))
    return ws


def _argmap_arity_problems(ws: Workspace) -> list[str]:
    """Argument maps must fit the declared arity of the target symbol."""
    problems = []
    for a in ws.alignments:
        arity = ws.registry.arity_of(a.target)
        if arity is None:
            continue
        beyond = [t for _, t in a.argmap.pairs if t > arity]
        if beyond:
            problems.append(
                f"alignment {a.source} -> {a.target}: argument map targets "
                f"position(s) {beyond} beyond declared arity {arity}"
            )
    return problems


def _load_or_fail(config_path: str) -> tuple[Workspace | None, int]:
    try:
        ws = load_workspace(load_config(Path(config_path)))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return None, EXIT_CONFIG
    if ws.errors:
        for e in ws.errors:
            print(e, file=sys.stderr)
        return None, EXIT_PARSE
    return ws, EXIT_OK


# --- commands ----------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        ws = load_workspace(load_config(Path(args.config)))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path, count, diags in ws.alignment_files:
        print(f"{path}: {count} alignments, {len(diags)} diagnostics")
    theories = ws.registry.theories()
    constants = sum(len(t.constants) for t in theories)
    print(f"interface theories: {len(theories)} ({constants} constants)")
    print(f"template rules: {len(ws.templates)}")
    graph = ws.graph()
    print(f"graph: {len(graph.nodes)} symbols, {graph.edge_count()} edges")
    for warning in graph.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for alignment, reason in graph.excluded:
        print(f"unusable: {alignment.source} -> {alignment.target}: {reason}", file=sys.stderr)
    for e in ws.errors:
        print(e, file=sys.stderr)
    if ws.errors:
        print(f"{len(ws.errors)} error(s)")
        return EXIT_PARSE
    print("ok")
    return EXIT_OK


def cmd_translate(args: argparse.Namespace) -> int:
    ws, status = _load_or_fail(args.config)
    if ws is None:
        return status
    target = LibraryId(args.target)
    graph = ws.graph()
    worst = EXIT_OK
    for name in args.files:
        path = Path(name)
        if not path.is_file():
            print(f"no such term file: {path}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            term = parse_term(path.read_text(encoding="utf-8"))
        except ParseError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return EXIT_PARSE
        result = translate(term, target, graph, ws.dialect)
        print(serialize(result.term))
        if args.report:
            for sym in sorted(result.untranslated, key=str):
                print(f"untranslated: {sym}", file=sys.stderr)
            for sym, path_used in sorted(result.paths_used.items(), key=lambda kv: str(kv[0])):
                steps = " | ".join(e.describe() for e in path_used)
                print(f"path {sym}: {steps}", file=sys.stderr)
            for note in result.notes:
                print(f"note: {note}", file=sys.stderr)
        if not result.complete:
            worst = EXIT_PARTIAL
    return worst


def cmd_paths(args: argparse.Namespace) -> int:
    ws, status = _load_or_fail(args.config)
    if ws is None:
        return status
    try:
        sym = parse_uri(args.symbol)
    except MalformedURI as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    if ws.libraries.lookup(sym) is None:
        print(f"unknown symbol namespace: {sym.namespace}", file=sys.stderr)
        return EXIT_PARSE
    target = LibraryId(args.target)
    found = find_path(sym, target, ws.graph())
    if found is None:
        print("no path")
        return EXIT_PARTIAL
    path, composed = found
    if not path:
        print("already in target library")
        return EXIT_OK
    for edge in path:
        print(edge.describe())
    if composed.pairs:
        print(f'composed arguments="{composed}"')
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    ws, status = _load_or_fail(args.config)
    if ws is None:
        return status
    hub = ws.config.interface_library
    if args.mode == "directions":
        report = direction_counts(ws.alignments, ws.registry, ws.libraries, hub)
        text = (
            render_directions_tsv(report)
            if args.format == "tsv"
            else render_directions_records(report)
        )
    else:
        report = intersection_counts(ws.alignments, ws.registry, ws.libraries, hub)
        text = (
            render_intersections_tsv(report)
            if args.format == "tsv"
            else render_intersections_records(report)
        )
    sys.stdout.write(text)
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    try:
        config = load_config(Path(args.config))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    source = Path(args.directory)
    if not source.is_dir():
        print(f"not a directory: {source}", file=sys.stderr)
        return EXIT_CONFIG
    dest = next((p for p in config.alignment_paths if p.is_dir()), None)
    if dest is None:
        print("no alignment directory configured to ingest into", file=sys.stderr)
        return EXIT_CONFIG
    total_alignments = 0
    total_diagnostics = 0
    for path in sorted(source.rglob("*.align")):
        parsed = parse_alignment_file(path.read_text(encoding="utf-8"))
        total_alignments += len(parsed.alignments)
        total_diagnostics += len(parsed.diagnostics)
        for d in parsed.diagnostics:
            print(f"{path}:{d.line}: {d.message}", file=sys.stderr)
        if parsed.alignments:
            shutil.copy2(path, dest / path.name)
            print(f"ingested {path.name}: {len(parsed.alignments)} alignments")
        else:
            print(f"skipped {path.name}: no usable alignments", file=sys.stderr)
    print(f"total: {total_alignments} alignments, {total_diagnostics} diagnostics")
    return EXIT_OK if total_diagnostics == 0 else EXIT_PARSE


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="termbridge",
        description="Translate expressions between theorem-prover libraries via alignments.",
    )
    parser.add_argument(
        "--config",
        default=os.environ.get("TERMBRIDGE_CONFIG", "termbridge.cfg"),
        help="workspace config file (or set TERMBRIDGE_CONFIG)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", help="load the whole workspace and report diagnostics")

    p_translate = sub.add_parser("translate", help="translate term files into a target library")
    p_translate.add_argument("--target", required=True, metavar="LIB")
    p_translate.add_argument("--report", action="store_true", help="list untranslated symbols and paths on stderr")
    p_translate.add_argument("files", nargs="+", metavar="FILE")

    p_paths = sub.add_parser("paths", help="show the translation path for one symbol")
    p_paths.add_argument("symbol", metavar="URI")
    p_paths.add_argument("--target", required=True, metavar="LIB")

    p_stats = sub.add_parser("stats", help="corpus statistics")
    p_stats.add_argument("--mode", choices=("directions", "intersections"), required=True)
    p_stats.add_argument("--format", choices=("tsv", "records"), default="tsv")

    p_ingest = sub.add_parser("ingest", help="validate and copy external alignment files")
    p_ingest.add_argument("directory", metavar="DIR")

    args = parser.parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "translate": cmd_translate,
        "paths": cmd_paths,
        "stats": cmd_stats,
        "ingest": cmd_ingest,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
