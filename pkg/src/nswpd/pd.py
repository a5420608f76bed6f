"""Phylogenetic-diversity dynamic programs over a tree-extension.

Three solvers share one skeleton.  Vertices are processed bottom-up in the
tree-extension; the tables of a vertex's tree-children are folded one child
at a time (max-plus or min-plus over disjoint bag subsets and, for the
budgeted problems, over budget splits), and the vertex then decides whether
it joins the solution.

* :func:`solve_b_map_pd` maximises all-paths PD under a budget.
* :func:`solve_b_maxtree_pd` maximises the best-switching-tree PD under a budget.
* :func:`compute_min_tree_pd` evaluates the worst-switching-tree PD of a fixed set.

Tables map a bag subset (bitmask over vertex positions) to a float64 array
indexed by budget.  Weights are scaled to integers first, so every finite
entry is an exact integer and ``-inf``/``+inf`` mark infeasible cells.

Budgets use the complement symmetry: a set fits budget ``B`` exactly when
the taxa left out cost at least ``Bbar = total - B``.  The "dp1" route
indexes tables by the budget spent, the "dp2" route by the cost left out;
the solver takes whichever of ``B`` and ``Bbar`` is smaller (ties: dp1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import Dag, Edge, Network, UnknownTaxon
from .extension import TreeExtension

NEG = -np.inf
POS = np.inf
_EXACT_LIMIT = 2 ** 53


class ExtensionMismatch(ValueError):
    pass


class EmptyTaxonSet(ValueError):
    pass


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class Solution:
    value: Fraction
    taxa: frozenset[str]
    witness: frozenset[Edge] | None
    budget: int
    route: str


def _submasks(m: int):
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m


def _conv(a: np.ndarray, b: np.ndarray, mode: str, cap: int | None) -> np.ndarray:
    """out[k] = opt over i + j = k of a[i] + b[j], keeping at most cap + 1 entries."""
    if len(a) < len(b):
        a, b = b, a
    n = len(a) + len(b) - 1
    if cap is not None:
        n = min(n, cap + 1)
    if mode == "max":
        out = np.full(n, NEG)
        better, skip = np.maximum, NEG
    else:
        out = np.full(n, POS)
        better, skip = np.minimum, POS
    for j in range(min(len(b), n)):
        y = b[j]
        if y == skip:
            continue
        m = min(len(a), n - j)
        view = out[j:j + m]
        better(view, a[:m] + y, out=view)
    return out


def _fold(acc: dict, table: dict, mode: str, cap: int | None) -> dict:
    out: dict[int, np.ndarray] = {}
    better = np.maximum if mode == "max" else np.minimum
    for y1, a in acc.items():
        for y2, b in table.items():
            if y1 & y2:
                continue
            c = _conv(a, b, mode, cap)
            key = y1 | y2
            prev = out.get(key)
            out[key] = c if prev is None else better(prev, c)
    return out


def combine_children(tables: Sequence[Mapping[int, np.ndarray]], mode: str = "max",
                     cap: int | None = None) -> dict[int, np.ndarray]:
    """Fold child tables into one.

    ``result[S][k]`` is the best sum of ``tables[j][S_j][k_j]`` over all ways
    to split ``S`` into disjoint parts ``S_j`` (one per child, each present in
    its table) and ``k`` into ``sum k_j``.  ``mode`` is ``"max"`` or ``"min"``.
    All arrays of one table must have equal length.
    """
    acc = {0: np.zeros(1)}
    for t in tables:
        acc = _fold(acc, dict(t), mode, cap)
    return acc


def _aligned(net: Dag, ext: TreeExtension | None) -> TreeExtension:
    if ext is None:
        from .exact import nsw_pipeline
        return nsw_pipeline(net)[0]
    if ext.dag is net:
        return ext
    if set(ext.dag.vertices) != set(net.vertices) or set(ext.dag.edges) != set(net.edges):
        raise ExtensionMismatch("extension was built for a different graph")
    return TreeExtension(net, ext.parent, check=False)


def _scaled_weights(net: Dag) -> tuple[dict[Edge, int], int]:
    w, scale = net.integer_weights()
    if sum(w.values()) >= _EXACT_LIMIT:
        raise OverflowError("scaled edge weights too large for exact float arithmetic")
    return w, scale


def _check_costs(net: Network, costs: Mapping[str, int]) -> dict[int, int]:
    out = {}
    for v in net.leaves:
        t = net.label(v)
        if t not in costs:
            raise BudgetError(f"no cost for taxon {t!r}")
        c = costs[t]
        if int(c) != c or c < 0:
            raise BudgetError(f"cost of {t!r} must be a non-negative integer")
        out[v] = int(c)
    for t in costs:
        if t not in net.taxa:
            raise UnknownTaxon(f"cost given for unknown taxon {t!r}")
    return out


def _fit(arr: np.ndarray, length: int, saturate: bool) -> np.ndarray:
    if len(arr) >= length:
        return arr[:length]
    fill = arr[-1] if saturate else NEG
    return np.concatenate([arr, np.full(length - len(arr), fill)])


def _cell(table: dict, y: int, b: int, saturate: bool) -> float:
    arr = table.get(y)
    if arr is None:
        return NEG
    if b < len(arr):
        return arr[b]
    return arr[-1] if saturate else NEG


def _put(table: dict, key: int, arr: np.ndarray):
    prev = table.get(key)
    table[key] = arr if prev is None else np.maximum(prev, arr)


def _budgeted(net: Network, costs: Mapping[str, int], budget: int,
              ext: TreeExtension | None, tree: bool, route: str) -> Solution:
    ext = _aligned(net, ext)
    cost = _check_costs(net, costs)
    if int(budget) != budget or budget < 0:
        raise BudgetError("budget must be a non-negative integer")
    total = sum(cost.values())
    B = min(int(budget), total)
    Bbar = total - B
    if route == "auto":
        route = "dp1" if B <= Bbar else "dp2"
    if route not in ("dp1", "dp2"):
        raise ValueError(f"unknown route {route!r}")
    dp1 = route == "dp1"
    K = B if dp1 else Bbar
    w, scale = _scaled_weights(net)
    idx = net.index
    bit = {v: 1 << idx(v) for v in net.vertices}
    pmask = {v: sum(bit[p] for p in net.parents(v)) for v in net.vertices}
    gain = {v: float(sum(w[(p, v)] for p in net.parents(v))) for v in net.vertices}

    tables: dict[int, dict[int, np.ndarray]] = {}
    stages: dict[int, list[dict]] = {}
    for v in ext.postorder:
        acc = {0: np.zeros(1)}
        st = [acc]
        for c in ext.children(v):
            acc = _fold(acc, tables[c], "max", K)
            st.append(acc)
        stages[v] = st
        la = len(acc[0])
        T: dict[int, np.ndarray] = {}
        if net.children(v):
            for y, a in acc.items():
                if not y & bit[v]:
                    _put(T, y, a)
            for y, a in acc.items():
                if not y & bit[v]:
                    continue
                base = y & ~bit[v]
                if not tree:
                    if base & pmask[v]:
                        continue
                    val = a + gain[v]
                    for s in _submasks(pmask[v]):
                        _put(T, base | s, val)
                else:
                    for p in net.parents(v):
                        if base & bit[p]:
                            continue
                        val = a + w[(p, v)]
                        _put(T, base, val)
                        _put(T, base | bit[p], val)
        else:
            c = cost[v]
            length = min(K, la - 1 + c) + 1
            for y, a in acc.items():
                if dp1:
                    _put(T, y, _fit(a, length, True))
                else:
                    _put(T, y, _fit(np.concatenate([np.full(c, a[0]), a]), length, False))
            if dp1 and c >= length:
                pass  # the taxon alone exceeds the budget
            else:
                for y, a in acc.items():
                    if tree:
                        options = [(p, bit[p], float(w[(p, v)])) for p in net.parents(v)]
                    else:
                        options = [(None, pmask[v], gain[v])]
                    for _, m, g in options:
                        if y & m:
                            continue
                        if dp1:
                            arr = _fit(np.concatenate([np.full(c, NEG), a + g]), length, False)
                        else:
                            arr = _fit(a + g, length, False)
                        keys = _submasks(m) if not tree else (0, m)
                        for s in keys:
                            _put(T, y | s, arr)
        tables[v] = T

    root = ext.root
    best = _cell(tables[root], 0, K, dp1)
    leaves, witness = _backtrack(net, ext, tables, stages, cost, w, bit, pmask, gain,
                                 K, dp1, tree)
    value = Fraction(int(best), scale)
    taxa = frozenset(net.label(v) for v in leaves)
    return Solution(value, taxa, frozenset(witness) if tree else None, B, route)


def _backtrack(net, ext, tables, stages, cost, w, bit, pmask, gain, K, dp1, tree):
    """Recover one optimal solution.

    Preference order: leave the vertex out, then the first parent in input
    order, then the smallest child key and smallest budget share.
    """
    leaves, witness = [], []
    stack = [(ext.root, 0, K)]
    while stack:
        v, y, b = stack.pop()
        T = tables[v]
        if dp1:
            b = min(b, len(T[0]) - 1)
        target = _cell(T, y, b, dp1)
        st = stages[v]
        acc = st[-1]
        leaf = not net.children(v)
        c = cost.get(v, 0)
        if leaf:
            ny, nb = (y, b) if dp1 else (y, max(0, b - c))
        else:
            ny, nb = y, b
        if _cell(acc, ny, nb, dp1) != target:
            if tree:
                options = [(p, bit[p], float(w[(p, v)])) for p in net.parents(v)]
            else:
                options = [(None, pmask[v], gain[v])]
            for p, m, g in options:
                if leaf:
                    ny, nb = y & ~m, (b - c if dp1 else b)
                else:
                    ny, nb = (y & ~m) | bit[v], b
                if nb >= 0 and _cell(acc, ny, nb, dp1) + g == target:
                    if leaf:
                        leaves.append(v)
                    if p is not None:
                        witness.append((p, v))
                    break
            else:
                raise AssertionError("backtracking lost the optimum")
        kids = ext.children(v)
        for j in range(len(kids) - 1, -1, -1):
            cur, prev, tw = st[j + 1], st[j], tables[kids[j]]
            if dp1:
                nb = min(nb, len(cur[0]) - 1)
            val = _cell(cur, ny, nb, dp1)
            for y2 in sorted(k for k in tw if not k & ~ny):
                a = prev.get(ny & ~y2)
                if a is None:
                    continue
                bw = tw[y2]
                lo, hi = max(0, nb - len(a) + 1), min(nb, len(bw) - 1)
                hits = np.nonzero(a[nb - np.arange(lo, hi + 1)] + bw[lo:hi + 1] == val)[0]
                if len(hits):
                    b2 = lo + int(hits[0])
                    stack.append((kids[j], y2, b2))
                    ny, nb = ny & ~y2, nb - b2
                    break
            else:
                raise AssertionError("backtracking lost the optimum")
    return leaves, witness


def solve_b_map_pd(net: Network, costs: Mapping[str, int], budget: int,
                   ext: TreeExtension | None = None, route: str = "auto") -> Solution:
    """Affordable taxon set of largest all-paths PD.

    Budgets above the total cost are clamped to it.  ``route`` forces
    ``"dp1"`` or ``"dp2"``; the default picks the smaller budget side.
    """
    return _budgeted(net, costs, budget, ext, False, route)


def solve_b_maxtree_pd(net: Network, costs: Mapping[str, int], budget: int,
                       ext: TreeExtension | None = None, route: str = "auto") -> Solution:
    """Affordable taxon set of largest best-switching-tree PD.

    ``witness`` holds the edges of a forest realising the value: every
    vertex has at most one incoming witness edge and the witness leaves
    are exactly the returned taxa.
    """
    return _budgeted(net, costs, budget, ext, True, route)


# -- worst switching tree ----------------------------------------------------

def restrict_to_ancestors(net: Dag, leaves: Iterable[int],
                          ext: TreeExtension) -> tuple[Dag, TreeExtension]:
    """Keep only ancestors of ``leaves``; removed vertices are contracted into
    their tree-extension parent."""
    ext = _aligned(net, ext)
    keep = net.ancestors(leaves)
    sub = net.induced(keep)
    parent = {}
    for v in sub.vertices:
        p = ext.parent[v]
        while p is not None and p not in keep:
            p = ext.parent[p]
        parent[v] = p
    return sub, TreeExtension(sub, parent)


def _min_fold(tabs: list[dict[int, float]]) -> dict[int, float]:
    acc = {0: 0.0}
    for t in tabs:
        new: dict[int, float] = {}
        for y1, a in acc.items():
            for y2, b in t.items():
                if y1 & y2:
                    continue
                k, s = y1 | y2, a + b
                if s < new.get(k, POS):
                    new[k] = s
        acc = new
    return acc


def compute_min_tree_pd(net: Network, taxa: Iterable, ext: TreeExtension | None = None) -> Fraction:
    """PD of ``taxa`` in the worst switching tree."""
    leaves = set()
    for t in taxa:
        leaves.add(net.leaf(t) if isinstance(t, str) else t)
    if not leaves:
        raise EmptyTaxonSet("the taxon set is empty")
    for v in leaves:
        if v not in net or net.children(v):
            raise UnknownTaxon(f"{v!r} is not a leaf")
    ext = _aligned(net, ext)
    sub, sext = restrict_to_ancestors(net, leaves, ext)
    w, scale = _scaled_weights(net)
    idx = sub.index
    bit = {v: 1 << idx(v) for v in sub.vertices}
    tables: dict[int, dict[int, dict[int, float]]] = {}

    def fold(v, z):
        return _min_fold([tables[c][z & sext.bag_mask(c)] for c in sext.children(v)])

    for v in sext.postorder:
        if v == sext.root:
            break
        bv = bit[v]
        parents = [(bit[p], float(w[(p, v)])) for p in sub.parents(v)]
        per_z = {}
        for z in _submasks(sext.bag_mask(v)):
            T: dict[int, float] = {}
            if sub.children(v):
                T.update(fold(v, z))
                src = ((y & ~bv, a) for y, a in fold(v, z | bv).items() if y & bv)
            else:
                src = iter(fold(v, z).items())
            for base, a in src:
                for pb, g in parents:
                    if not pb & z or base & pb:
                        continue
                    val = a + g
                    for key in (base, base | pb):
                        if val < T.get(key, POS):
                            T[key] = val
            per_z[z] = T
        tables[v] = per_z
    best = fold(sext.root, bit[sext.root]).get(0, POS)
    if best == POS:
        raise AssertionError("no switching tree reaches the taxa")
    return Fraction(int(best), scale)
