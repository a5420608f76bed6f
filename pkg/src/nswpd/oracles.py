"""Brute-force reference implementations.

Everything here is deliberately naive and independent of the dynamic
programs: switchings are enumerated outright, budgeted problems scan all
taxon subsets, and node scanwidth is found by trying every rooted tree.
Only the graph types from :mod:`nswpd.core` are shared.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .core import Dag, Network, pd_map_value

SWITCHING_CAP = 1 << 20


class TooManySwitchings(ValueError):
    pass


class TooManyTaxa(ValueError):
    pass


class TooManyVertices(ValueError):
    pass


def switchings(net: Dag, cap: int = SWITCHING_CAP):
    """Yield every switching as the frozenset of kept edges."""
    retics = [v for v in net.vertices if net.in_degree(v) >= 2]
    count = 1
    for r in retics:
        count *= net.in_degree(r)
    if count > cap:
        raise TooManySwitchings(f"{count} switchings exceed the cap {cap}")
    fixed = [e for e in net.edges if net.in_degree(e[1]) < 2]
    choices = [[(p, r) for p in net.parents(r)] for r in retics]
    for pick in itertools.product(*choices):
        yield frozenset(fixed).union(pick)


def _tree_pd(net: Dag, kept: frozenset, leaves: set[int]) -> Fraction:
    # an edge counts iff its head reaches a selected leaf inside the switching tree
    kids: dict[int, list[int]] = {v: [] for v in net.vertices}
    for u, v in kept:
        kids[u].append(v)
    reach = {}
    for v in reversed(net.topological_order):
        reach[v] = v in leaves or any(reach[w] for w in kids[v])
    return sum((net.weight(u, v) for u, v in kept if reach[v]), Fraction(0))


def _leaf_ids(net: Dag, taxa: Iterable) -> set[int]:
    out = set()
    for t in taxa:
        out.add(net.leaf(t) if isinstance(net, Network) and isinstance(t, str) else t)
    return out


def brute_pd_max(net: Dag, taxa: Iterable, cap: int = SWITCHING_CAP) -> Fraction:
    leaves = _leaf_ids(net, taxa)
    return max(_tree_pd(net, s, leaves) for s in switchings(net, cap))


def brute_pd_min(net: Dag, taxa: Iterable, cap: int = SWITCHING_CAP) -> Fraction:
    leaves = _leaf_ids(net, taxa)
    return min(_tree_pd(net, s, leaves) for s in switchings(net, cap))


def brute_budgeted(net: Network, costs: Mapping[str, int], budget: int,
                   variant: str = "map", cap: int = SWITCHING_CAP
                   ) -> tuple[Fraction, frozenset[str]]:
    """Best affordable taxon set by scanning every subset.

    Ties go to the subset found first (subsets in order of increasing size,
    then lexicographic in taxon order).
    """
    taxa = list(net.taxon_names)
    if len(taxa) > 20:
        raise TooManyTaxa(f"{len(taxa)} taxa exceed the limit of 20")
    if variant == "map":
        value = lambda a: pd_map_value(net, a)
    elif variant == "maxtree":
        trees = list(switchings(net, cap))
        def value(a):
            leaves = _leaf_ids(net, a)
            return max(_tree_pd(net, s, leaves) for s in trees)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    best = (Fraction(-1), frozenset())
    for k in range(len(taxa) + 1):
        for combo in itertools.combinations(taxa, k):
            if sum(costs[t] for t in combo) > budget:
                continue
            val = value(combo)
            if val > best[0]:
                best = (val, frozenset(combo))
    return best


def all_subset_values(net: Network, variant: str = "map", cap: int = SWITCHING_CAP
                      ) -> dict[frozenset[str], Fraction]:
    """Value of every taxon subset; lets tests sweep all budgets at once."""
    taxa = list(net.taxon_names)
    if len(taxa) > 20:
        raise TooManyTaxa(f"{len(taxa)} taxa exceed the limit of 20")
    trees = list(switchings(net, cap)) if variant == "maxtree" else None
    out = {}
    for k in range(len(taxa) + 1):
        for combo in itertools.combinations(taxa, k):
            if variant == "map":
                out[frozenset(combo)] = pd_map_value(net, combo)
            else:
                leaves = _leaf_ids(net, combo)
                out[frozenset(combo)] = max(_tree_pd(net, s, leaves) for s in trees)
    return out


# -- exhaustive node scanwidth ------------------------------------------------

@lru_cache(maxsize=None)
def _rooted_trees(n: int) -> np.ndarray:
    """All rooted labelled trees on n vertices as an (T, n) parent array (-1 = root)."""
    if n == 1:
        return np.array([[-1]])
    out = []
    for seq in itertools.product(range(n), repeat=max(n - 2, 0)):
        edges = _pruefer_decode(list(seq), n)
        adj = [[] for _ in range(n)]
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        for root in range(n):
            par = [-2] * n
            par[root] = -1
            stack = [root]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if par[w] == -2:
                        par[w] = u
                        stack.append(w)
            out.append(par)
    return np.array(out, dtype=np.int64)


def _pruefer_decode(seq: list[int], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [i for i in range(n) if degree[i] == 1]
    edges.append((u, w))
    return edges


@lru_cache(maxsize=None)
def _ancestor_tensor(n: int) -> np.ndarray:
    """anc[t, a, v] is True iff a is an ancestor of v (or a == v) in tree t."""
    par = _rooted_trees(n)
    t = len(par)
    anc = np.zeros((t, n, n), dtype=bool)
    cur = np.tile(np.arange(n), (t, 1))
    for _ in range(n):
        valid = cur >= 0
        tt, vv = np.nonzero(valid)
        anc[tt, cur[tt, vv], vv] = True
        cur = np.where(valid, np.take_along_axis(par, np.where(valid, cur, 0), axis=1), -1)
    return anc


def exhaustive_nsw(g: Dag, max_vertices: int = 7) -> tuple[dict[int, int | None], int]:
    """Minimum node scanwidth over all rooted trees on V(g).

    Trees are generated from Pruefer sequences and every root choice; the
    ancestor condition and bags are evaluated for all trees at once with
    boolean matrix products.
    """
    n = len(g)
    if n > max_vertices:
        raise TooManyVertices(f"{n} vertices exceed the limit of {max_vertices}")
    if n == 0:
        raise ValueError("empty graph")
    idx = g.index
    par = _rooted_trees(n)
    anc = _ancestor_tensor(n)
    ok = np.ones(len(par), dtype=bool)
    for u, v in g.edges:
        ok &= anc[:, idx(u), idx(v)]
    cand = np.nonzero(ok)[0]
    P = np.zeros((n, n), dtype=np.int64)   # P[p, c] = 1 for DAG edge p->c
    for u, v in g.edges:
        P[idx(u), idx(v)] = 1
    A = anc[cand].astype(np.int64)         # A[t, a, w]: w in subtree of a
    # touches[t, a, p]: p is a DAG parent of some vertex under a
    touches = (A @ P.T) > 0
    bags = touches & ~anc[cand]
    widths = bags.sum(axis=2).max(axis=1)
    k = int(np.argmin(widths))
    best = par[cand[k]]
    verts = g.vertices
    parent = {verts[i]: (None if best[i] < 0 else verts[best[i]]) for i in range(n)}
    return parent, int(widths[k])
