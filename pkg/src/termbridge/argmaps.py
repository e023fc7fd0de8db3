"""Argument-map algebra: apply, compose, invert.

An argument map is a partial injective map between 1-based argument
positions, written ``(1,2)(2,3)`` in alignment files.  Positions count
every argument, implicit ones included.  Positions the map does not
mention are carried identically (``i -> i``) as long as neither side of
the map claims position ``i``; a position that appears only on the
target side is one the source cannot fill (it becomes a hole), and a
position that appears only on the source side is dropped.

An empty map is the identity.  Composition returns the relational
composite of the completed maps with redundant ``i -> i`` pairs removed,
so ``compose(identity, m) == m`` holds literally.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, TypeVar

T = TypeVar("T")


class ArityMismatch(ValueError):
    """An argument map references a source position beyond the argument list."""


@dataclass(frozen=True)
class ArgMap:
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        seen_src: set[int] = set()
        seen_tgt: set[int] = set()
        for s, t in self.pairs:
            if s < 1 or t < 1:
                raise ValueError(f"argument positions must be positive: {self.pairs}")
            if s in seen_src or t in seen_tgt:
                raise ValueError(f"argument map must be injective: {self.pairs}")
            seen_src.add(s)
            seen_tgt.add(t)

    @property
    def is_identity(self) -> bool:
        return all(s == t for s, t in self.pairs)

    def max_index(self) -> int:
        return max((max(s, t) for s, t in self.pairs), default=0)

    def __str__(self) -> str:
        return "".join(f"({s},{t})" for s, t in self.pairs)


IDENTITY = ArgMap()


def parse_argmap(text: str) -> ArgMap:
    """Parse the ``(1,2)(2,3)`` surface form (no separators between pairs)."""
    rest = text.strip()
    pairs = []
    while rest:
        if not rest.startswith("("):
            raise ValueError(f"expected '(' in argument map at {rest!r}")
        close = rest.find(")")
        if close < 0:
            raise ValueError(f"unclosed pair in argument map {text!r}")
        body = rest[1:close]
        src_text, sep, tgt_text = body.partition(",")
        if not sep or not src_text.strip().isdigit() or not tgt_text.strip().isdigit():
            raise ValueError(f"malformed pair '({body})' in argument map {text!r}")
        pairs.append((int(src_text), int(tgt_text)))
        rest = rest[close + 1 :].strip()
    return ArgMap(tuple(pairs))


def completed(m: ArgMap, upto: int) -> dict[int, int]:
    """Explicit pairs plus identity on positions neither side mentions."""
    fn = _completed_fn(m, max(upto, m.max_index()))
    return {s: t for s, t in enumerate(fn) if s and t}


@lru_cache(maxsize=8192)
def _completed_fn(m: ArgMap, upto: int) -> tuple[int, ...]:
    """Completed map as a position-indexed tuple; 0 marks an undefined slot."""
    fn = [0] * (upto + 1)
    referenced = set()
    for s, t in m.pairs:
        fn[s] = t
        referenced.add(s)
        referenced.add(t)
    for i in range(1, upto + 1):
        if i not in referenced:
            fn[i] = i
    return tuple(fn)


def apply_argmap(
    m: ArgMap, args: Sequence[T], target_arity: int
) -> list[Optional[T]]:
    """Permute/resize ``args`` into ``target_arity`` slots.

    Unfilled target slots are ``None`` (callers turn them into hole
    markers); source arguments with no route are dropped.  Raises
    ArityMismatch when an explicit source position exceeds ``len(args)``.
    """
    for s, _ in m.pairs:
        if s > len(args):
            raise ArityMismatch(
                f"argument map {m} references position {s} but only "
                f"{len(args)} arguments were supplied"
            )
    upto = max(len(args), target_arity, m.max_index())
    fn = _completed_fn(m, upto)
    out: list[Optional[T]] = [None] * target_arity
    for s in range(1, len(args) + 1):
        t = fn[s]
        if t and t <= target_arity:
            out[t - 1] = args[s - 1]
    return out


def inferred_arity(m: ArgMap, nargs: int) -> int:
    """Target arity implied by a map and an argument count.

    Every explicitly named target slot exists, and identity-carried
    positions keep their slot; anything between stays empty.
    """
    arity = max((t for _, t in m.pairs), default=0)
    srcs = {s for s, _ in m.pairs}
    tgts = {t for _, t in m.pairs}
    for i in range(1, nargs + 1):
        if i not in srcs and i not in tgts:
            arity = max(arity, i)
    return arity


def compose_argmaps(first: ArgMap, second: ArgMap) -> ArgMap:
    """Left-to-right relational composition of the completed maps.

    A position routed by both maps keeps its combined route; redundant
    ``i -> i`` results are normalized away.  A position one map consumes
    without the other producing it has no route and is dropped, exactly
    as sequential application would drop the argument.
    """
    upto = max(first.max_index(), second.max_index())
    f = _completed_fn(first, upto)
    g = _completed_fn(second, upto)
    pairs = []
    for s in range(1, upto + 1):
        mid = f[s]
        if mid:
            t = g[mid]
            if t and t != s:
                pairs.append((s, t))
    return ArgMap(tuple(pairs))


def invert_argmap(m: ArgMap) -> ArgMap:
    """Swap pair components; inverts the denoted partial injection."""
    return ArgMap(tuple(sorted((t, s) for s, t in m.pairs)))
