"""Alignment records and the line-oriented alignment file format.

One alignment per non-comment line: two whitespace-separated symbol URIs
followed by ``key="value"`` pairs.  ``arguments``, ``direction``,
``priority`` and ``group`` are reserved keys lifted into fields; any
other key is preserved verbatim in ``props``.  ``//`` starts a comment
line, blank lines are ignored.  Parsing never aborts the file: malformed
lines become diagnostics and the rest of the file still loads.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .argmaps import ArgMap, parse_argmap
from .uris import MalformedURI, SymbolURI, format_uri, parse_uri


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    BOTH = "both"


@dataclass(frozen=True)
class Alignment:
    source: SymbolURI
    target: SymbolURI
    direction: Direction = Direction.BOTH
    argmap: ArgMap = ArgMap()
    priority: int = 0
    group: str | None = None
    props: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError(f"alignment relates a symbol to itself: {self.source}")

    def prop(self, key: str) -> str | None:
        for k, v in self.props:
            if k == key:
                return v
        return None


@dataclass(frozen=True)
class Bidirectional:
    pass


@dataclass(frozen=True)
class Unidirectional:
    usable: Direction


@dataclass(frozen=True)
class Unusable:
    reason: str


AlignmentClass = Bidirectional | Unidirectional | Unusable


def classify(a: Alignment) -> AlignmentClass:
    """Which translation directions an alignment supports, if any.

    Alignments that hold only up to negation (an antonym on one side)
    carry ``negated="true"`` and cannot be used for rewriting at all.
    """
    if a.prop("negated") == "true":
        return Unusable("negation not supported")
    if a.direction is Direction.BOTH:
        return Bidirectional()
    return Unidirectional(a.direction)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


_KV_RE = re.compile(r'([A-Za-z_][A-Za-z0-9_.-]*)="([^"]*)"')
_RESERVED = ("arguments", "direction", "priority", "group")


@dataclass
class AlignmentFile:
    alignments: list[Alignment] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)


def parse_alignment_file(text: str) -> AlignmentFile:
    """Parse a whole file; one alignment or one diagnostic per data line."""
    out = AlignmentFile()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        try:
            out.alignments.append(_parse_line(line))
        except ValueError as exc:
            out.diagnostics.append(Diagnostic(lineno, str(exc)))
    return out


def _parse_line(line: str) -> Alignment:
    fields = line.split(None, 2)
    if len(fields) < 2:
        raise ValueError("expected two symbol URIs")
    try:
        source = parse_uri(fields[0])
        target = parse_uri(fields[1])
    except MalformedURI as exc:
        raise ValueError(str(exc)) from exc

    rest = fields[2] if len(fields) > 2 else ""
    pos = 0
    direction = Direction.BOTH
    argmap = ArgMap()
    priority = 0
    group: str | None = None
    props: list[tuple[str, str]] = []
    while pos < len(rest):
        if rest[pos].isspace():
            pos += 1
            continue
        m = _KV_RE.match(rest, pos)
        if not m:
            raise ValueError(f"malformed key-value pair at {rest[pos:][:30]!r}")
        key, value = m.group(1), m.group(2)
        if key == "direction":
            try:
                direction = Direction(value)
            except ValueError:
                raise ValueError(f"unknown direction {value!r}") from None
        elif key == "arguments":
            argmap = parse_argmap(value)
        elif key == "priority":
            try:
                priority = int(value)
            except ValueError:
                raise ValueError(f"priority is not an integer: {value!r}") from None
        elif key == "group":
            group = value
        else:
            props.append((key, value))
        pos = m.end()
    return Alignment(source, target, direction, argmap, priority, group, tuple(props))


def format_alignment(a: Alignment) -> str:
    """One line in the file format; defaults are omitted."""
    parts = [format_uri(a.source), format_uri(a.target)]
    if a.argmap.pairs:
        parts.append(f'arguments="{a.argmap}"')
    if a.direction is not Direction.BOTH:
        parts.append(f'direction="{a.direction.value}"')
    if a.priority:
        parts.append(f'priority="{a.priority}"')
    if a.group is not None:
        parts.append(f'group="{a.group}"')
    parts.extend(f'{k}="{v}"' for k, v in a.props)
    return " ".join(parts)
