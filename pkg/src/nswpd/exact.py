"""Exact and heuristic node-scanwidth extensions.

The exact solver works over vertex subsets.  For a descendant-closed,
weakly connected set ``S`` the best subtree on ``S`` is rooted at some
source ``r`` of ``G[S]``; below ``r`` every weakly connected component of
``G[S - r]`` gets its own subtree.  Hence

    g(S) = max(|bag(S)|, min_r max_C g(C))

with ``C`` ranging over the components of ``G[S - r]``.  The recursion is
memoised on bitmasks and pruned with a cutoff: a call answers exactly when
the optimum is below the cutoff and otherwise only proves a lower bound.
The greedy :func:`heuristic_extension` supplies the initial cutoff.
"""

from __future__ import annotations

import sys

from .core import Dag
from .extension import TreeExtension
from .reduce import (solve_base_case, split_at_cut_vertices, stitch,
                     suppress_chain_pairs)

DEFAULT_MAX_STATES = 5_000_000


class Exceeded(Exception):
    """The optimum is larger than the requested upper bound."""

    def __init__(self, bound: int):
        super().__init__(f"node scanwidth exceeds {bound}")
        self.bound = bound


class StateLimitExceeded(MemoryError):
    pass


def _masks(g: Dag):
    idx = g.index
    n = len(g)
    par = [0] * n
    adj = [0] * n
    for u, v in g.edges:
        i, j = idx(u), idx(v)
        par[j] |= 1 << i
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    return par, adj


def _bits(m: int):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _components(mask: int, adj: list[int]) -> list[int]:
    out = []
    while mask:
        comp = frontier = mask & -mask
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            new = adj[low.bit_length() - 1] & mask & ~comp
            comp |= new
            frontier |= new
        out.append(comp)
        mask &= ~comp
    return out


def heuristic_extension(g: Dag) -> tuple[TreeExtension, int]:
    """Greedy bottom-up extension.

    Repeatedly takes a vertex all of whose children are placed, choosing the
    one whose new subtree has the smallest bag (ties: earliest vertex), and
    hangs the trees holding its children below it.
    """
    n = len(g)
    par, _ = _masks(g)
    idx = g.index
    verts = g.vertices
    kids = [[idx(w) for w in g.children(v)] for v in verts]
    pending = [len(k) for k in kids]
    parents_of = [[idx(p) for p in g.parents(v)] for v in verts]
    tree_of = list(range(n))       # union-find over placed vertices
    tree_bag = [0] * n
    parent: list[int | None] = [None] * n

    def find(i):
        while tree_of[i] != i:
            tree_of[i] = tree_of[tree_of[i]]
            i = tree_of[i]
        return i

    ready = {i for i in range(n) if pending[i] == 0}
    for _ in range(n):
        best = None
        for i in sorted(ready):
            m = par[i]
            roots = {find(j) for j in kids[i]}
            for r in roots:
                m |= tree_bag[r]
            m &= ~(1 << i)
            key = (m.bit_count(), i)
            if best is None or key < best[0]:
                best = (key, i, m, roots)
        _, i, m, roots = best
        ready.discard(i)
        for r in roots:
            # r is the root vertex of its tree: union-find roots are tree roots
            parent[r] = i
            tree_of[r] = i
        tree_bag[i] = m
        for p in parents_of[i]:
            pending[p] -= 1
            if pending[p] == 0:
                ready.add(p)
    tops = [i for i in range(n) if parent[i] is None]
    pm = {}
    for i in range(n):
        if parent[i] is not None:
            pm[verts[i]] = verts[parent[i]]
        else:
            pm[verts[i]] = None if i == tops[0] else verts[tops[0]]
    ext = TreeExtension(g, pm)
    return ext, ext.width


class _Search:
    def __init__(self, g: Dag, max_states: int):
        self.g = g
        self.par, self.adj = _masks(g)
        self.memo: dict[int, tuple[int, bool, int]] = {}
        self.max_states = max_states

    def bag(self, s: int) -> int:
        m = 0
        par = self.par
        for i in _bits(s):
            m |= par[i]
        return m & ~s

    def solve(self, s: int, cutoff: int) -> int:
        """Exact g(s) if it is below ``cutoff``, otherwise a lower bound >= cutoff."""
        hit = self.memo.get(s)
        if hit is not None:
            val, exact, _ = hit
            if exact or val >= cutoff:
                return val
        if len(self.memo) >= self.max_states:
            raise StateLimitExceeded(f"more than {self.max_states} subset states")
        b = self.bag(s).bit_count()
        if b >= cutoff:
            self.memo[s] = (b, False, -1)
            return b
        par, adj = self.par, self.adj
        best, choice = cutoff, -1
        for r in _bits(s):
            if par[r] & s:
                continue
            worst = b
            comps = _components(s & ~(1 << r), adj)
            comps.sort(key=lambda c: -c.bit_count())
            for c in comps:
                val = self.solve(c, best)
                if val > worst:
                    worst = val
                    if worst >= best:
                        break
            if worst < best:
                best, choice = worst, r
                if best == b:
                    break
        self.memo[s] = (best, best < cutoff, choice)
        return best

    def build(self, s: int, top: int | None, parent: dict[int, int | None]):
        verts = self.g.vertices
        stack = [(s, top)]
        while stack:
            s, top = stack.pop()
            _, exact, r = self.memo[s]
            assert exact
            parent[verts[r]] = None if top is None else verts[top]
            for c in _components(s & ~(1 << r), self.adj):
                stack.append((c, r))


def optimal_extension_exact(g: Dag, upper_bound: int | None = None,
                            max_states: int = DEFAULT_MAX_STATES) -> tuple[TreeExtension, int]:
    """Minimum-width extension by subset search.

    Raises :class:`Exceeded` when ``upper_bound`` is given and the optimum
    is larger.  ``max_states`` caps the memo table.
    """
    if len(g) == 0:
        raise ValueError("empty graph")
    heur, h = heuristic_extension(g)
    cutoff = h if upper_bound is None else min(h, upper_bound + 1)
    lower = g.max_in_degree()
    if h <= lower:
        if upper_bound is not None and h > upper_bound:
            raise Exceeded(upper_bound)
        return heur, h
    search = _Search(g, max_states)
    full = (1 << len(g)) - 1
    comps = _components(full, search.adj)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(g) + 1000))
    try:
        worst = 0
        for c in comps:
            worst = max(worst, search.solve(c, cutoff))
            if worst >= cutoff:
                break
    finally:
        sys.setrecursionlimit(old)
    if worst >= cutoff:
        # nothing better than the cutoff exists
        if upper_bound is not None and h > upper_bound:
            raise Exceeded(upper_bound)
        return heur, h
    parent: dict[int, int | None] = {}
    for c in comps:
        search.build(c, None, parent)
    tops = [v for v in g.vertices if parent[v] is None]
    for v in tops[1:]:
        parent[v] = tops[0]
    ext = TreeExtension(g, parent)
    assert ext.width == worst
    return ext, worst


def _hang(g: Dag, parts: list[dict[int, int | None]]) -> dict[int, int | None]:
    parent: dict[int, int | None] = {}
    first = None
    for part in parts:
        for v, p in part.items():
            if p is None:
                if first is None:
                    first = v
                    parent[v] = None
                else:
                    parent[v] = first
            else:
                parent[v] = p
    return parent


def _solve(g: Dag, max_states: int) -> dict[int, int | None]:
    comps = g.weakly_connected_components()
    if len(comps) > 1:
        return _hang(g, [_solve(g.induced(c), max_states) for c in comps])
    reduced, chain_trace = suppress_chain_pairs(g)
    parent = solve_base_case(reduced)
    if parent is None and len(reduced.sources()) == 1:
        pieces, cut_trace = split_at_cut_vertices(reduced)
        if len(pieces) > 1:
            parts = [_solve(sub, max_states) for sub, _ in pieces]
            parent = stitch(reduced, cut_trace, parts)
    if parent is None:
        ext, _ = optimal_extension_exact(reduced, max_states=max_states)
        parent = dict(ext.parent)
    if chain_trace.steps:
        parent = stitch(g, chain_trace, [parent])
    return parent


def nsw_pipeline(g: Dag, reduce: bool = True, upper_bound: int | None = None,
                 max_states: int = DEFAULT_MAX_STATES) -> tuple[TreeExtension, int]:
    """Optimal extension: reduce, solve the pieces exactly, stitch."""
    if not reduce:
        return optimal_extension_exact(g, upper_bound, max_states)
    ext = TreeExtension(g, _solve(g, max_states))
    if upper_bound is not None and ext.width > upper_bound:
        raise Exceeded(upper_bound)
    return ext, ext.width
