"""Quivers and paths.

Composition convention used everywhere in this package: a path stores its
arrow names in application order (first entry acts first).  The product
x*y of path-algebra elements applies y first, so x*y corresponds to the
concatenation y.names + x.names and is nonzero only when y.tgt == x.src.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InputError


@dataclass(frozen=True)
class Arrow:
    name: str
    src: int
    tgt: int


@dataclass(frozen=True)
class Quiver:
    n_vertices: int
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise InputError("arrow names must be unique")
        for a in self.arrows:
            if not (0 <= a.src < self.n_vertices and 0 <= a.tgt < self.n_vertices):
                raise InputError(f"arrow {a.name} has endpoints outside the vertex range")

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise InputError(f"unknown arrow {name!r}")

    def has_oriented_cycle(self) -> bool:
        adj: dict[int, list[int]] = {v: [] for v in range(self.n_vertices)}
        for a in self.arrows:
            adj[a.src].append(a.tgt)
        color = [0] * self.n_vertices

        def visit(v: int) -> bool:
            color[v] = 1
            for w in adj[v]:
                if color[w] == 1 or (color[w] == 0 and visit(w)):
                    return True
            color[v] = 2
            return False

        return any(color[v] == 0 and visit(v) for v in range(self.n_vertices))

    def longest_path_length(self) -> int:
        """Longest path length; raises on quivers with oriented cycles."""
        if self.has_oriented_cycle():
            raise InputError("quiver has oriented cycles; path lengths are unbounded")
        adj: dict[int, list[int]] = {v: [] for v in range(self.n_vertices)}
        for a in self.arrows:
            adj[a.src].append(a.tgt)
        memo: dict[int, int] = {}

        def longest_from(v: int) -> int:
            if v not in memo:
                memo[v] = max((1 + longest_from(w) for w in adj[v]), default=0)
            return memo[v]

        return max((longest_from(v) for v in range(self.n_vertices)), default=0)


@dataclass(frozen=True)
class Path:
    """Arrow names in application order; trivial paths have empty names."""

    src: int
    names: tuple[str, ...]
    tgt: int

    def __len__(self) -> int:
        return len(self.names)

    @property
    def key(self) -> tuple:
        """Sort key (length, name sequence, source); total over all paths."""
        return (len(self.names), self.names, self.src)


def trivial_path(v: int) -> Path:
    return Path(v, (), v)


def path_from_names(quiver: Quiver, names: Sequence[str]) -> Path:
    """Build a path from arrow names in application order, checking composability."""
    if not names:
        raise InputError("a path of arrows needs at least one arrow; trivial paths take a vertex")
    arrows = [quiver.arrow(n) for n in names]
    for k in range(len(arrows) - 1):
        if arrows[k].tgt != arrows[k + 1].src:
            raise InputError(f"arrows {names[k]!r} and {names[k+1]!r} do not compose")
    return Path(arrows[0].src, tuple(names), arrows[-1].tgt)


def concat(first: Path, second: Path) -> Optional[Path]:
    """Path doing ``first`` then ``second``; None when endpoints mismatch."""
    if first.tgt != second.src:
        return None
    return Path(first.src, first.names + second.names, second.tgt)
