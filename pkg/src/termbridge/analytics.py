"""Corpus statistics over alignments and interface theories.

Two reports: how many bidirectional vs unidirectional alignments touch
each library per topic, and how many interface symbols are aligned to
exactly k distinct systems.  The topic of an alignment is the module of
the interface symbol it touches ("unclassified" when neither endpoint is
an interface symbol).  Counting is incident: an alignment increments the
row of every non-interface library among its endpoints, regardless of
what the other endpoint is.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .alignments import Alignment, Bidirectional, Unidirectional, Unusable, classify
from .interfaces import TheoryRegistry
from .uris import LibraryId, LibraryTable, SymbolURI, format_uri

UNCLASSIFIED = "unclassified"
_UNKNOWN = LibraryId("unknown")


@dataclass
class CorpusReport:
    by_topic_library: dict[tuple[str, LibraryId], tuple[int, int]] = field(default_factory=dict)
    intersection: dict[str, Counter] = field(default_factory=dict)
    library_totals: dict[LibraryId, tuple[int, int]] = field(default_factory=dict)
    bucket_totals: Counter = field(default_factory=Counter)
    unusable: int = 0
    unaligned: list[SymbolURI] = field(default_factory=list)


def _topic_of(
    a: Alignment, libraries: LibraryTable, interface: LibraryId
) -> tuple[str, list[LibraryId]]:
    """Topic plus the non-interface libraries the alignment is incident to."""
    endpoints = [a.source, a.target]
    libs = [libraries.lookup(u) or _UNKNOWN for u in endpoints]
    topic = UNCLASSIFIED
    for uri, lib in zip(endpoints, libs):
        if lib == interface:
            topic = uri.module
            break
    incident = []
    for lib in libs:
        if lib != interface and lib not in incident:
            incident.append(lib)
    return topic, incident


def direction_counts(
    alignments: list[Alignment],
    theories: TheoryRegistry | None,
    libraries: LibraryTable,
    interface: LibraryId = LibraryId("Interface"),
) -> CorpusReport:
    """Bidirectional/unidirectional alignment counts per (topic, library)."""
    report = CorpusReport()
    for a in alignments:
        cls = classify(a)
        if isinstance(cls, Unusable):
            report.unusable += 1
            continue
        bi = 1 if isinstance(cls, Bidirectional) else 0
        uni = 1 - bi
        topic, incident = _topic_of(a, libraries, interface)
        for lib in incident:
            b, u = report.by_topic_library.get((topic, lib), (0, 0))
            report.by_topic_library[(topic, lib)] = (b + bi, u + uni)
            tb, tu = report.library_totals.get(lib, (0, 0))
            report.library_totals[lib] = (tb + bi, tu + uni)
    return report


def intersection_counts(
    alignments: list[Alignment],
    theories: TheoryRegistry | None,
    libraries: LibraryTable,
    interface: LibraryId = LibraryId("Interface"),
) -> CorpusReport:
    """Per topic, how many interface symbols align to exactly k systems.

    A symbol aligned twice into the same library still counts that
    library once.  Declared interface constants with no alignment at all
    are listed separately rather than bucketed.
    """
    report = CorpusReport()
    systems: dict[SymbolURI, set[LibraryId]] = {}
    if theories is not None:
        for uri in theories.constants():
            if libraries.lookup(uri) == interface:
                systems.setdefault(uri, set())
    for a in alignments:
        if isinstance(classify(a), Unusable):
            report.unusable += 1
            continue
        for mine, other in ((a.source, a.target), (a.target, a.source)):
            if libraries.lookup(mine) != interface:
                continue
            other_lib = libraries.lookup(other) or _UNKNOWN
            if other_lib == interface:
                continue
            systems.setdefault(mine, set()).add(other_lib)
    for uri in sorted(systems, key=format_uri):
        k = len(systems[uri])
        if k == 0:
            report.unaligned.append(uri)
            continue
        report.intersection.setdefault(uri.module, Counter())[k] += 1
        report.bucket_totals[k] += 1
    return report


# --- rendering ---------------------------------------------------------------

_DIRECTION_NOTE = (
    "# alignments counted per incident library (either endpoint), "
    "topic = interface theory module"
)


def render_directions_tsv(report: CorpusReport) -> str:
    lines = [_DIRECTION_NOTE, "topic\tlibrary\tbidirectional\tunidirectional"]
    for (topic, lib), (bi, uni) in sorted(
        report.by_topic_library.items(), key=lambda kv: (kv[0][0], kv[0][1].id)
    ):
        lines.append(f"{topic}\t{lib}\t{bi}\t{uni}")
    for lib, (bi, uni) in sorted(report.library_totals.items(), key=lambda kv: kv[0].id):
        lines.append(f"Sum\t{lib}\t{bi}\t{uni}")
    if report.unusable:
        lines.append(f"# excluded as unusable: {report.unusable}")
    return "\n".join(lines) + "\n"


def render_intersections_tsv(report: CorpusReport) -> str:
    top = max(report.bucket_totals, default=4)
    ks = list(range(1, max(top, 4) + 1))
    lines = ["topic\t" + "\t".join(f"{k}_systems" for k in ks)]
    for topic in sorted(report.intersection):
        row = report.intersection[topic]
        lines.append(topic + "\t" + "\t".join(str(row.get(k, 0)) for k in ks))
    lines.append("Sum\t" + "\t".join(str(report.bucket_totals.get(k, 0)) for k in ks))
    if report.unaligned:
        lines.append(f"# interface symbols with no alignment: {len(report.unaligned)}")
    return "\n".join(lines) + "\n"


def render_directions_records(report: CorpusReport) -> str:
    lines = []
    for (topic, lib), (bi, uni) in sorted(
        report.by_topic_library.items(), key=lambda kv: (kv[0][0], kv[0][1].id)
    ):
        lines.append(f"topic={topic} library={lib} bidirectional={bi} unidirectional={uni}")
    return "\n".join(lines) + ("\n" if lines else "")


def render_intersections_records(report: CorpusReport) -> str:
    lines = []
    for topic in sorted(report.intersection):
        for k in sorted(report.intersection[topic]):
            lines.append(f"topic={topic} systems={k} concepts={report.intersection[topic][k]}")
    return "\n".join(lines) + ("\n" if lines else "")
