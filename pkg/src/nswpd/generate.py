"""Seeded random instances: networks, taxon costs and small DAGs.

Networks grow from a Yule-style timed tree.  Each reticulation picks two
edges whose time spans overlap, subdivides the first at time ``t`` and the
second slightly later, and links the two new vertices.  Because edges
always point forward in time the result is acyclic, and the reticulation
has in-degree exactly two.  Branch lengths are scaled so the tree has
height 100 and rounded to integers (at least 1).
"""

from __future__ import annotations

import math
import random

import networkx as nx
import numpy as np

from .core import Dag, Network, validate_network


class InfeasibleParameters(ValueError):
    pass


def gen_network(n_leaves: int, n_reticulations: int = 0, seed: int = 0) -> Network:
    if n_leaves < 2:
        raise InfeasibleParameters("at least two leaves are needed")
    if n_reticulations < 0:
        raise InfeasibleParameters("reticulation count must be non-negative")
    rng = random.Random(seed)
    time = [0.0]                      # time of each vertex
    edges: list[list[int]] = []       # [tail, head]
    lineages = [0, 0]                 # tails of open lineages
    now = 0.0
    while len(lineages) < n_leaves:
        now += rng.expovariate(len(lineages))
        i = rng.randrange(len(lineages))
        tail = lineages.pop(i)
        v = len(time)
        time.append(now)
        edges.append([tail, v])
        lineages += [v, v]
    now += rng.expovariate(len(lineages))
    for tail in lineages:
        v = len(time)
        time.append(now)
        edges.append([tail, v])
    height = now
    leaves = set(range(len(time))) - {e[0] for e in edges}

    for _ in range(n_reticulations):
        pairs = []
        for a in range(len(edges)):
            for b in range(len(edges)):
                if a == b:
                    continue
                lo = max(time[edges[a][0]], time[edges[b][0]])
                hi = min(time[edges[a][1]], time[edges[b][1]])
                if hi > lo:
                    pairs.append((a, b, lo, hi))
        if not pairs:
            raise InfeasibleParameters("no two edges overlap in time")
        a, b, lo, hi = rng.choice(pairs)
        t1 = lo + (hi - lo) * rng.uniform(0.1, 0.9)
        t2 = t1 + (hi - t1) * rng.uniform(0.1, 0.9)
        s, h = len(time), len(time) + 1
        time += [t1, t2]
        (ua, va), (ub, vb) = edges[a], edges[b]
        edges[a] = [ua, s]
        edges[b] = [ub, h]
        edges += [[s, va], [h, vb], [s, h]]

    scale = 100.0 / height
    weights = {(u, v): max(1, round((time[v] - time[u]) * scale)) for u, v in edges}
    order = sorted(range(len(time)), key=lambda v: (time[v], v))
    labels = {}
    for v in order:
        if v in leaves:
            labels[v] = f"t{len(labels) + 1}"
    dag = Dag(order, [tuple(e) for e in edges], weights, labels)
    return validate_network(dag)


def sample_costs(net: Network, seed: int = 0, mu: float = 2.0, sigma: float = 0.8) -> dict[str, int]:
    """Log-normal taxon costs, rounded and clamped to at least 1."""
    rng = np.random.default_rng(seed)
    draws = rng.lognormal(mu, sigma, size=len(net.leaves))
    return {t: max(1, int(round(x))) for t, x in zip(net.taxon_names, draws)}


def contract_shortest(net: Network, fraction: float = 0.10, seed: int | None = None) -> Network:
    """Contract the shortest edges between tree vertices to make the network non-binary.

    An edge ``u -> v`` is contractible when ``v`` is a tree vertex, ``u`` is a
    tree vertex or the root, and the two share no child.  Ties go to the
    edge listed first.  ``seed`` is accepted for interface symmetry; the
    procedure is deterministic.
    """
    if not 0 <= fraction < 1:
        raise ValueError("fraction must lie in [0, 1)")
    target = math.ceil(fraction * len(net.edges))
    edges = list(net.edges)
    weights = net.weights()
    kids = {v: list(net.children(v)) for v in net.vertices}
    pars = {v: list(net.parents(v)) for v in net.vertices}
    removed = set()

    def tree_like(v):
        return len(pars[v]) <= 1 and len(kids[v]) >= 2

    done = 0
    while done < target:
        best = None
        for pos, (u, v) in enumerate(edges):
            if not (tree_like(v) and len(pars[v]) == 1 and tree_like(u)):
                continue
            if set(kids[u]) & set(kids[v]):
                continue
            key = (weights[(u, v)], pos)
            if best is None or key < best[0]:
                best = (key, pos, u, v)
        if best is None:
            break
        _, pos, u, v = best
        del edges[pos]
        del weights[(u, v)]
        kids[u].remove(v)
        for i, (a, b) in enumerate(edges):
            if a == v:
                edges[i] = (u, b)
                weights[(u, b)] = weights.pop((v, b))
                pars[b][pars[b].index(v)] = u
                kids[u].append(b)
        removed.add(v)
        done += 1
    if not removed:
        return net
    verts = [v for v in net.vertices if v not in removed]
    dag = Dag(verts, edges, weights, {v: l for v, l in net.labels.items() if v not in removed})
    return validate_network(dag, strict=net.strict)


def gen_dag(n: int, p: float = 0.4, seed: int = 0) -> Dag:
    """Random DAG: each pair is joined with probability ``p`` along a random order."""
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    edges = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    return Dag(range(n), edges)


def level(net: Dag) -> int:
    """Largest number of surplus reticulation edges within one block."""
    und = nx.Graph()
    und.add_nodes_from(net.vertices)
    und.add_edges_from(net.edges)
    edge_set = set(net.edges)
    best = 0
    for block in nx.biconnected_component_edges(und):
        heads: dict[int, int] = {}
        for a, b in block:
            for u, v in ((a, b), (b, a)):
                if (u, v) in edge_set and net.in_degree(v) >= 2:
                    heads[v] = heads.get(v, 0) + 1
        best = max(best, sum(k - 1 for k in heads.values()))
    return best
