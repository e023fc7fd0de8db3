"""termbridge: translate formal expressions between theorem-prover libraries.

Symbols of different libraries are related through alignments (possibly
with argument remapping) and interface theories; translating an
expression substitutes each symbol along a path through that graph and
reports whatever could not be covered.
"""

from .alignments import (
    Alignment,
    AlignmentClass,
    Bidirectional,
    Diagnostic,
    Direction,
    Unidirectional,
    Unusable,
    classify,
    format_alignment,
    parse_alignment_file,
)
from .argmaps import (
    ArgMap,
    ArityMismatch,
    apply_argmap,
    compose_argmaps,
    inferred_arity,
    invert_argmap,
    parse_argmap,
)
from .interfaces import (
    Constant,
    DialectRule,
    DialectRules,
    DuplicateConstant,
    InterfaceTheory,
    TemplateRule,
    TheoryRegistry,
    UnknownInclude,
    declared_arity,
    expand_template,
    normalize_dialect,
    parse_dialect_file,
    parse_interface,
    parse_interface_file,
    parse_template_file,
)
from .terms import (
    App,
    Bind,
    BoundVar,
    Hole,
    Lit,
    ParseError,
    Sym,
    Term,
    UnknownHeadKeyword,
    Var,
    free_vars,
    node_count,
    parse_term,
    serialize,
    symbols_of,
)
from .translator import (
    AlignEdge,
    AlignmentGraph,
    Edge,
    TemplateEdge,
    TranslationResult,
    build_graph,
    find_path,
    reachable_libraries,
    translate,
)
from .uris import (
    LibraryId,
    LibraryTable,
    MalformedURI,
    SymbolURI,
    UnknownLibrary,
    format_uri,
    parse_uri,
)

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "AlignmentClass",
    "AlignmentGraph",
    "AlignEdge",
    "App",
    "ArgMap",
    "ArityMismatch",
    "Bidirectional",
    "Bind",
    "BoundVar",
    "Constant",
    "DialectRule",
    "DialectRules",
    "Diagnostic",
    "Direction",
    "DuplicateConstant",
    "Edge",
    "Hole",
    "InterfaceTheory",
    "LibraryId",
    "LibraryTable",
    "Lit",
    "MalformedURI",
    "ParseError",
    "Sym",
    "SymbolURI",
    "TemplateEdge",
    "TemplateRule",
    "Term",
    "TheoryRegistry",
    "TranslationResult",
    "Unidirectional",
    "UnknownHeadKeyword",
    "UnknownInclude",
    "UnknownLibrary",
    "Unusable",
    "Var",
    "apply_argmap",
    "build_graph",
    "classify",
    "compose_argmaps",
    "declared_arity",
    "expand_template",
    "find_path",
    "format_alignment",
    "format_uri",
    "free_vars",
    "inferred_arity",
    "invert_argmap",
    "node_count",
    "normalize_dialect",
    "parse_alignment_file",
    "parse_argmap",
    "parse_dialect_file",
    "parse_interface",
    "parse_interface_file",
    "parse_template_file",
    "parse_term",
    "parse_uri",
    "reachable_libraries",
    "serialize",
    "symbols_of",
    "translate",
]
