"""Weighted DAGs and rooted phylogenetic networks.

A :class:`Dag` is an immutable directed acyclic graph on integer vertex ids
with non-negative rational edge weights.  A :class:`Network` additionally
satisfies the phylogenetic constraints (single root of out-degree >= 2,
labelled leaves of in-degree 1, tree vertices and reticulations only) and
is produced by :func:`validate_network`.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping

Edge = tuple[int, int]


class NetworkError(ValueError):
    """Base class for structural problems with an input graph."""


class CyclicInput(NetworkError):
    pass


class MultipleRoots(NetworkError):
    pass


class UnlabeledLeaf(NetworkError):
    pass


class DuplicateLabel(NetworkError):
    pass


class NegativeWeight(NetworkError):
    pass


class ParallelEdge(NetworkError):
    pass


class UnknownTaxon(NetworkError):
    pass


class BadDegree(NetworkError):
    def __init__(self, vertex: int, message: str):
        super().__init__(f"vertex {vertex}: {message}")
        self.vertex = vertex


def as_weight(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # repr keeps the shortest decimal that round-trips, so 0.1 -> 1/10
        return Fraction(repr(value))
    return Fraction(value)


class Dag:
    """Immutable weighted DAG.

    Parameters
    ----------
    vertices : iterable of int
        Vertex ids; their order is kept and used for every tie-break.
    edges : iterable of (u, v)
        Directed edges; adjacency lists follow this order.
    weights : mapping (u, v) -> number, optional
        Missing edges weigh 0.
    labels : mapping vertex -> str, optional
        Taxon labels (normally only on leaves).
    """

    __slots__ = ("_vertices", "_edges", "_weights", "_labels", "_children",
                 "_parents", "_index", "_topo")

    def __init__(self, vertices: Iterable[int], edges: Iterable[Edge],
                 weights: Mapping[Edge, object] | None = None,
                 labels: Mapping[int, str] | None = None):
        self._vertices = tuple(vertices)
        self._index = {v: i for i, v in enumerate(self._vertices)}
        if len(self._index) != len(self._vertices):
            raise NetworkError("duplicate vertex id")
        self._edges = tuple((u, v) for u, v in edges)
        children: dict[int, list[int]] = {v: [] for v in self._vertices}
        parents: dict[int, list[int]] = {v: [] for v in self._vertices}
        seen = set()
        for u, v in self._edges:
            if u not in self._index or v not in self._index:
                raise NetworkError(f"edge {(u, v)} has an unknown endpoint")
            if (u, v) in seen:
                raise ParallelEdge(f"parallel edge {(u, v)}")
            if u == v:
                raise CyclicInput(f"self-loop at {u}")
            seen.add((u, v))
            children[u].append(v)
            parents[v].append(u)
        self._children = {v: tuple(c) for v, c in children.items()}
        self._parents = {v: tuple(p) for v, p in parents.items()}
        weights = weights or {}
        w = {}
        for e in self._edges:
            x = as_weight(weights.get(e, 0))
            if x < 0:
                raise NegativeWeight(f"edge {e} has weight {x}")
            w[e] = x
        self._weights = w
        self._labels = dict(labels or {})
        for v in self._labels:
            if v not in self._index:
                raise NetworkError(f"label on unknown vertex {v}")
        self._topo = self._toposort()

    def _toposort(self) -> tuple[int, ...]:
        indeg = {v: len(self._parents[v]) for v in self._vertices}
        queue = deque(v for v in self._vertices if indeg[v] == 0)
        order = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in self._children[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        if len(order) != len(self._vertices):
            raise CyclicInput("graph contains a directed cycle")
        return tuple(order)

    # -- read-only views -------------------------------------------------
    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def labels(self) -> dict[int, str]:
        return dict(self._labels)

    @property
    def topological_order(self) -> tuple[int, ...]:
        return self._topo

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def __repr__(self) -> str:
        return f"{type(self).__name__}(|V|={len(self._vertices)}, |E|={len(self._edges)})"

    def index(self, v: int) -> int:
        return self._index[v]

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    def parents(self, v: int) -> tuple[int, ...]:
        return self._parents[v]

    def weight(self, u: int, v: int) -> Fraction:
        return self._weights[(u, v)]

    def weights(self) -> dict[Edge, Fraction]:
        return dict(self._weights)

    def label(self, v: int) -> str | None:
        return self._labels.get(v)

    def in_degree(self, v: int) -> int:
        return len(self._parents[v])

    def out_degree(self, v: int) -> int:
        return len(self._children[v])

    def sources(self) -> list[int]:
        return [v for v in self._vertices if not self._parents[v]]

    def sinks(self) -> list[int]:
        return [v for v in self._vertices if not self._children[v]]

    def is_chain(self, v: int) -> bool:
        return len(self._parents[v]) == 1 and len(self._children[v]) == 1

    def max_in_degree(self) -> int:
        return max((len(p) for p in self._parents.values()), default=0)

    def max_out_degree(self) -> int:
        return max((len(c) for c in self._children.values()), default=0)

    def total_weight(self) -> Fraction:
        return sum(self._weights.values(), Fraction(0))

    def ancestors(self, targets: Iterable[int]) -> set[int]:
        """Vertices with a (possibly empty) directed path into ``targets``."""
        seen = set()
        stack = list(targets)
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(self._parents[v])
        return seen

    def descendants(self, sources: Iterable[int]) -> set[int]:
        seen = set()
        stack = list(sources)
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(self._children[v])
        return seen

    def induced(self, keep: Iterable[int]) -> Dag:
        """Induced subgraph; vertex order and edge order are inherited."""
        keep = set(keep)
        verts = [v for v in self._vertices if v in keep]
        edges = [e for e in self._edges if e[0] in keep and e[1] in keep]
        return Dag(verts, edges, {e: self._weights[e] for e in edges},
                   {v: l for v, l in self._labels.items() if v in keep})

    def weakly_connected_components(self) -> list[list[int]]:
        seen = set()
        comps = []
        for s in self._vertices:
            if s in seen:
                continue
            comp = []
            seen.add(s)
            stack = [s]
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self._children[u] + self._parents[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp, key=self._index.__getitem__))
        return comps

    def integer_weights(self) -> tuple[dict[Edge, int], int]:
        """Edge weights scaled to integers, together with the scale factor."""
        scale = 1
        for w in self._weights.values():
            scale = lcm(scale, w.denominator)
        return {e: int(w * scale) for e, w in self._weights.items()}, scale

    def structure(self) -> tuple:
        """Hashable summary used by equality checks in tests."""
        return (self._vertices, self._edges,
                tuple(self._weights[e] for e in self._edges),
                tuple(sorted(self._labels.items())))


class Network(Dag):
    """A validated rooted phylogenetic network.  Build with :func:`validate_network`."""

    __slots__ = ("root", "leaves", "taxa", "reticulations", "strict")

    def __init__(self, dag: Dag, strict: bool):
        super().__init__(dag.vertices, dag.edges, dag.weights(), dag.labels)
        (self.root,) = self.sources()
        self.leaves = tuple(v for v in self.vertices if not self.children(v))
        self.taxa = {self.label(v): v for v in self.leaves}
        self.reticulations = tuple(v for v in self.vertices if self.in_degree(v) >= 2)
        self.strict = strict

    @property
    def taxon_names(self) -> tuple[str, ...]:
        return tuple(self.label(v) for v in self.leaves)

    def leaf(self, taxon: str) -> int:
        try:
            return self.taxa[taxon]
        except KeyError:
            raise UnknownTaxon(f"unknown taxon {taxon!r}") from None

    def taxon_set(self, taxa: Iterable[str]) -> frozenset[str]:
        out = frozenset(taxa)
        for t in out:
            self.leaf(t)
        return out


def validate_network(dag: Dag, labels: Mapping[int, str] | None = None,
                     strict: bool = False) -> Network:
    """Check the phylogenetic-network rules and return a :class:`Network`.

    ``labels`` overrides the labels stored on ``dag``.  With ``strict=True``
    reticulations must have in-degree exactly 2.
    """
    if labels is not None:
        dag = Dag(dag.vertices, dag.edges, dag.weights(), labels)
    roots = dag.sources()
    if len(roots) != 1:
        raise MultipleRoots(f"expected one root, found {len(roots)}")
    root = roots[0]
    if dag.out_degree(root) < 2 and len(dag) > 1:
        raise BadDegree(root, "root must have out-degree >= 2")
    if len(dag) == 1:
        raise BadDegree(root, "a network needs at least two taxa")
    seen_labels: dict[str, int] = {}
    for v in dag.vertices:
        indeg, outdeg = dag.in_degree(v), dag.out_degree(v)
        if v == root:
            continue
        if outdeg == 0:
            if indeg != 1:
                raise BadDegree(v, f"leaf has in-degree {indeg}")
            lab = dag.label(v)
            if lab is None or lab == "":
                raise UnlabeledLeaf(f"leaf {v} has no taxon label")
            if lab in seen_labels:
                raise DuplicateLabel(f"label {lab!r} used twice")
            seen_labels[lab] = v
        elif indeg == 1:
            if outdeg < 2:
                raise BadDegree(v, "tree vertex must have out-degree >= 2")
        else:
            if outdeg != 1:
                raise BadDegree(v, f"reticulation has out-degree {outdeg}")
            if strict and indeg != 2:
                raise BadDegree(v, f"reticulation has in-degree {indeg} (strict mode)")
    return Network(dag, strict)


def offspring_edges(net: Dag, taxa: Iterable) -> frozenset[Edge]:
    """Edges whose head is an ancestor of some selected leaf.

    ``taxa`` holds taxon labels (for a :class:`Network`) or leaf vertex ids.
    """
    leaves = _resolve(net, taxa)
    anc = net.ancestors(leaves)
    return frozenset(e for e in net.edges if e[1] in anc)


def pd_map_value(net: Dag, taxa: Iterable) -> Fraction:
    """All-paths phylogenetic diversity: weight of all edges with offspring in ``taxa``."""
    return sum((net.weight(*e) for e in offspring_edges(net, taxa)), Fraction(0))


def _resolve(net: Dag, taxa: Iterable) -> list[int]:
    out = []
    for t in taxa:
        if isinstance(net, Network) and isinstance(t, str):
            out.append(net.leaf(t))
        elif t in net:
            out.append(t)
        else:
            raise UnknownTaxon(f"unknown taxon {t!r}")
    return out
