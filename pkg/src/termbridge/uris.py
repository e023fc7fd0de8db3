"""Symbol URIs and library identification.

A symbol URI names one constant in one library and has three parts,
``namespace?module?name``.  The namespace and module never contain ``?``;
the name may end in one or more ``?`` characters (some PVS symbols, such
as ``open?``, really are spelled that way), so the name is everything
after the second separator.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class MalformedURI(ValueError):
    """Raised when a symbol URI string cannot be split into its three parts."""


_FORBIDDEN = set(' \t\r\n"')


def _check_component(text: str, what: str, value: str) -> None:
    if not value:
        raise MalformedURI(f"empty {what} in {text!r}")
    if any(c in _FORBIDDEN for c in value):
        raise MalformedURI(f"{what} contains whitespace or quote in {text!r}")


@dataclass(frozen=True, order=True)
class SymbolURI:
    """Globally unique identifier of a constant: ``namespace?module?name``."""

    namespace: str
    module: str
    name: str

    def __post_init__(self) -> None:
        uri = f"{self.namespace}?{self.module}?{self.name}"
        _check_component(uri, "namespace", self.namespace)
        _check_component(uri, "module", self.module)
        _check_component(uri, "name", self.name)
        if "?" in self.namespace:
            raise MalformedURI(f"namespace contains '?' in {uri!r}")
        if "?" in self.module:
            raise MalformedURI(f"module contains '?' in {uri!r}")
        # '?' may appear in a name only as a trailing run (PVS predicate names).
        if "?" in self.name.rstrip("?"):
            raise MalformedURI(f"non-trailing '?' in symbol name in {uri!r}")

    def __str__(self) -> str:
        return format_uri(self)


def parse_uri(text: str) -> SymbolURI:
    """Split ``namespace?module?name``; trailing ``?`` belongs to the name."""
    first = text.find("?")
    if first < 0:
        raise MalformedURI(f"no '?' separator in {text!r}")
    second = text.find("?", first + 1)
    if second < 0:
        raise MalformedURI(f"only one '?' separator in {text!r}")
    return SymbolURI(text[:first], text[first + 1 : second], text[second + 1 :])


def format_uri(uri: SymbolURI) -> str:
    return f"{uri.namespace}?{uri.module}?{uri.name}"


@dataclass(frozen=True, order=True)
class LibraryId:
    """Name of a prover library (or of the interface hub), e.g. ``PVS``."""

    id: str

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class LibraryTable:
    """Maps symbol URIs to libraries by namespace prefix, longest prefix wins."""

    prefixes: tuple[tuple[str, LibraryId], ...] = field(default=())

    @classmethod
    def from_mapping(cls, mapping: dict[str, LibraryId | str]) -> "LibraryTable":
        rows = tuple(
            (prefix, lib if isinstance(lib, LibraryId) else LibraryId(lib))
            for prefix, lib in mapping.items()
        )
        return cls(tuple(sorted(rows, key=lambda row: -len(row[0]))))

    def lookup(self, uri: SymbolURI) -> LibraryId | None:
        for prefix, lib in self.prefixes:
            if uri.namespace.startswith(prefix):
                return lib
        return None

    def library_of(self, uri: SymbolURI) -> LibraryId:
        lib = self.lookup(uri)
        if lib is None:
            raise UnknownLibrary(f"no library registered for namespace {uri.namespace!r}")
        return lib

    def known(self) -> set[LibraryId]:
        return {lib for _, lib in self.prefixes}


class UnknownLibrary(KeyError):
    """A symbol's namespace matches no configured library prefix."""
