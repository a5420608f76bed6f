"""Tree-extensions of DAGs and their node-scanwidth bags.

A tree-extension of a DAG ``G`` is a rooted tree on the vertices of ``G`` in
which the tail of every edge of ``G`` is an ancestor of its head.  The bag
of ``v`` collects the DAG-parents of the subtree below ``v`` that lie
outside that subtree; the width is the largest bag.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .core import Dag


class InvalidExtension(ValueError):
    pass


def _gamma_children(g: Dag, parent: Mapping[int, int | None]) -> dict[int, list[int]]:
    kids: dict[int, list[int]] = {v: [] for v in g.vertices}
    for v in g.vertices:
        p = parent[v]
        if p is not None:
            kids[p].append(v)
    return kids


def is_tree_extension(g: Dag, parent: Mapping[int, int | None]) -> bool:
    """True iff ``parent`` describes a rooted tree on V(g) respecting every DAG edge."""
    if set(parent) != set(g.vertices):
        return False
    roots = [v for v in g.vertices if parent[v] is None]
    if len(roots) != 1:
        return False
    if any(p is not None and p not in g for p in parent.values()):
        return False
    kids = _gamma_children(g, parent)
    # Euler tour from the root; unreached vertices mean a cycle
    tin, tout = {}, {}
    clock = 0
    stack = [(roots[0], False)]
    while stack:
        v, done = stack.pop()
        if done:
            tout[v] = clock
            clock += 1
            continue
        tin[v] = clock
        clock += 1
        stack.append((v, True))
        stack.extend((w, False) for w in kids[v])
    if len(tin) != len(g):
        return False
    return all(tin[u] < tin[v] and tout[v] < tout[u] for u, v in g.edges)


class TreeExtension:
    """A validated tree-extension with cached bitmask bags.

    ``parent`` maps every vertex to its parent in the tree (``None`` for the
    root).  Bit ``i`` of a mask stands for ``g.vertices[i]``.
    """

    __slots__ = ("dag", "parent", "root", "_kids", "_post", "_bags")

    def __init__(self, g: Dag, parent: Mapping[int, int | None], check: bool = True):
        if check and not is_tree_extension(g, parent):
            raise InvalidExtension("not a tree-extension of the given DAG")
        self.dag = g
        self.parent = {v: parent[v] for v in g.vertices}
        (self.root,) = [v for v in g.vertices if self.parent[v] is None]
        kids = _gamma_children(g, self.parent)
        self._kids = {v: tuple(c) for v, c in kids.items()}
        post = []
        stack = [(self.root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                post.append(v)
                continue
            stack.append((v, True))
            stack.extend((w, False) for w in reversed(self._kids[v]))
        self._post = tuple(post)
        idx = g.index
        bags = {}
        for v in self._post:
            m = 0
            for p in g.parents(v):
                m |= 1 << idx(p)
            for w in self._kids[v]:
                m |= bags[w]
            bags[v] = m & ~(1 << idx(v))
        self._bags = bags

    def children(self, v: int) -> tuple[int, ...]:
        return self._kids[v]

    @property
    def postorder(self) -> tuple[int, ...]:
        """Tree vertices with every child before its parent."""
        return self._post

    def bag_mask(self, v: int) -> int:
        return self._bags[v]

    def bag(self, v: int) -> frozenset[int]:
        verts = self.dag.vertices
        m = self._bags[v]
        out = []
        while m:
            low = m & -m
            out.append(verts[low.bit_length() - 1])
            m ^= low
        return frozenset(out)

    @property
    def width(self) -> int:
        return max((m.bit_count() for m in self._bags.values()), default=0)

    def subtree(self, v: int) -> set[int]:
        out = set()
        stack = [v]
        while stack:
            u = stack.pop()
            out.add(u)
            stack.extend(self._kids[u])
        return out

    def to_text(self) -> str:
        lines = []
        for v in self.dag.vertices:
            p = self.parent[v]
            lines.append(f"{v}\t{'-' if p is None else p}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"TreeExtension(root={self.root}, width={self.width})"


def parse_extension(text: str) -> dict[int, int | None]:
    """Read ``child<TAB>parent`` lines (``-`` marks the root) into a parent map."""
    parent: dict[int, int | None] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidExtension(f"line {lineno}: expected 'child<TAB>parent'")
        try:
            child = int(parts[0])
            par = None if parts[1] == "-" else int(parts[1])
        except ValueError:
            raise InvalidExtension(f"line {lineno}: vertex ids must be integers") from None
        if child in parent:
            raise InvalidExtension(f"line {lineno}: vertex {child} listed twice")
        parent[child] = par
    return parent


def read_extension(g: Dag, text: str) -> TreeExtension:
    return TreeExtension(g, parse_extension(text))


def bag(g: Dag, parent: Mapping[int, int | None], v: int) -> frozenset[int]:
    """Bag of ``v`` computed straight from the definition (no caching)."""
    kids = _gamma_children(g, parent)
    below = set()
    stack = [v]
    while stack:
        u = stack.pop()
        below.add(u)
        stack.extend(kids[u])
    return frozenset(p for u in below for p in g.parents(u) if p not in below)


def nsw_of(g: Dag, parent: Mapping[int, int | None] | TreeExtension) -> int:
    if isinstance(parent, TreeExtension):
        return parent.width
    return TreeExtension(g, parent).width


def star_extension(vertices: Iterable[int]) -> dict[int, int | None]:
    verts = list(vertices)
    return {v: (None if i == 0 else verts[0]) for i, v in enumerate(verts)}
