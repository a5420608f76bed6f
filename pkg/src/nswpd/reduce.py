"""Data reduction for node scanwidth.

Two safe rules shrink the search: suppressing a chain vertex whose child is
also a chain vertex, and splitting a single-source graph into its blocks
(biconnected components).  Small pieces are then handled by closed-form
base cases.  Every rule records enough in a :class:`ReductionTrace` to lift
extensions of the pieces back to the input graph without changing width.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import networkx as nx

from .core import Dag
from .extension import star_extension

ParentMap = dict[int, "int | None"]


class NotSingleSource(ValueError):
    pass


class InconsistentTrace(ValueError):
    pass


@dataclass(frozen=True)
class ChainStep:
    """Vertex ``v`` with parent ``p`` and chain child ``w`` was replaced by edge p->w."""
    v: int
    p: int
    w: int


@dataclass(frozen=True)
class CutStep:
    """The graph was split into ``blocks``; ``shared`` lists the articulation vertices."""
    blocks: tuple[frozenset[int], ...]
    shared: frozenset[int]


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)


def suppress_chain_pairs(g: Dag) -> tuple[Dag, ReductionTrace]:
    """Suppress every chain vertex whose unique child is also a chain vertex.

    A chain vertex has in- and out-degree one.  Suppressing ``v`` (parent
    ``p``, child ``w``) removes it and adds ``p -> w``.  Applied to fixpoint.
    """
    kids = {v: list(g.children(v)) for v in g.vertices}
    pars = {v: list(g.parents(v)) for v in g.vertices}
    weights = g.weights()
    trace = ReductionTrace()

    def chain(v):
        return len(kids[v]) == 1 and len(pars[v]) == 1

    removed = set()
    for v in g.topological_order:
        if v in removed or not chain(v):
            continue
        (w,) = kids[v]
        if not chain(w):
            continue
        (p,) = pars[v]
        kids[p][kids[p].index(v)] = w
        pars[w] = [p]
        weights[(p, w)] = weights.pop((p, v)) + weights.pop((v, w))
        removed.add(v)
        trace.steps.append(ChainStep(v, p, w))
    if not removed:
        return g, trace
    verts = [v for v in g.vertices if v not in removed]
    edges = [(u, w) for u in verts for w in kids[u]]
    return Dag(verts, edges, weights, {v: l for v, l in g.labels.items() if v not in removed}), trace


def split_at_cut_vertices(g: Dag) -> tuple[list[tuple[Dag, int]], ReductionTrace]:
    """Split a connected single-source DAG into its blocks.

    Each block is returned with its unique source, which is the articulation
    vertex it shares with the part closer to the root (or the root itself).
    A tree falls apart into single edges.
    """
    sources = g.sources()
    if len(sources) != 1:
        raise NotSingleSource(f"graph has {len(sources)} sources")
    if len(g.weakly_connected_components()) != 1:
        raise NotSingleSource("graph is not connected")
    if not g.edges:
        return [(g, sources[0])], ReductionTrace()
    und = nx.Graph()
    und.add_nodes_from(g.vertices)
    und.add_edges_from(g.edges)
    blocks = []
    for comp in nx.biconnected_components(und):
        blocks.append(frozenset(comp))
    # deterministic order: by smallest vertex position
    blocks.sort(key=lambda b: min(g.index(v) for v in b))
    pieces = []
    for b in blocks:
        sub = g.induced(b)
        (src,) = sub.sources()
        pieces.append((sub, src))
    shared = frozenset(nx.articulation_points(und))
    trace = ReductionTrace([CutStep(tuple(blocks), shared)])
    return pieces, trace


def solve_base_case(g: Dag) -> ParentMap | None:
    """Closed-form optimal extension for easy graphs, or ``None`` if not a base case.

    Handles edgeless graphs (a star, width 0), connected single-source
    directed trees (the tree itself) and biconnected graphs with exactly
    one reticulation (a topological path, width = its in-degree).
    """
    if not g.edges:
        return star_extension(g.vertices)
    sources = g.sources()
    if len(sources) != 1:
        return None
    if len(g.edges) == len(g) - 1 and all(g.in_degree(v) <= 1 for v in g.vertices):
        return {v: (g.parents(v)[0] if g.parents(v) else None) for v in g.vertices}
    retics = [v for v in g.vertices if g.in_degree(v) >= 2]
    if len(retics) == 1:
        und = nx.Graph()
        und.add_nodes_from(g.vertices)
        und.add_edges_from(g.edges)
        if nx.is_biconnected(und):
            order = g.topological_order
            return {v: (order[i - 1] if i else None) for i, v in enumerate(order)}
    return None


def stitch(g: Dag, trace: ReductionTrace, parts: list[Mapping[int, int | None]]) -> ParentMap:
    """Lift extensions of reduced pieces back to ``g``.

    For a cut trace ``parts`` holds one parent map per block, in block order;
    they are glued at their roots.  For a chain trace ``parts`` holds the
    single extension of the reduced graph and each suppressed vertex is put
    back directly above its child.
    """
    if trace.steps and isinstance(trace.steps[0], CutStep):
        (step,) = trace.steps
        if len(parts) != len(step.blocks):
            raise InconsistentTrace("one extension per block expected")
        parent: ParentMap = {}
        for block, part in zip(step.blocks, parts):
            if set(part) != set(block):
                raise InconsistentTrace("extension does not cover its block")
            for v, p in part.items():
                if p is None:
                    parent.setdefault(v, None)
                    continue
                if parent.get(v) is not None:
                    raise InconsistentTrace(f"vertex {v} is a non-root in two blocks")
                parent[v] = p
        if set(parent) != set(g.vertices):
            raise InconsistentTrace("blocks do not cover the graph")
        return parent
    if len(parts) != 1:
        raise InconsistentTrace("chain undo takes exactly one extension")
    parent = dict(parts[0])
    for step in reversed(trace.steps):
        if not isinstance(step, ChainStep):
            raise InconsistentTrace(f"unexpected step {step!r}")
        if step.v in parent or step.w not in parent:
            raise InconsistentTrace(f"cannot reinsert {step.v} above {step.w}")
        parent[step.v] = parent[step.w]
        parent[step.w] = step.v
    if set(parent) != set(g.vertices):
        raise InconsistentTrace("reinsertion does not cover the graph")
    return parent
