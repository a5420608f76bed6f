"""Shared builders for the test-suite."""

import random

import networkx as nx

from nswpd.core import Dag, validate_network
from nswpd.generate import contract_shortest, gen_network

# acceptance results: criterion -> (PASS|FAIL, title, detail)
ACCEPTANCE: dict[int, tuple[str, str, str]] = {}

SIX_TAXA_EDGES = [
    ("root", "r", 3), ("r", "F", 1),
    ("root", "l", 3), ("l", "A", 1), ("l", "lr", 4), ("lr", "B", 6),
    ("root", "m", 3), ("m", "ml", 1), ("ml", "lr", 3), ("ml", "mlr", 2), ("mlr", "C", 2),
    ("m", "mr", 4), ("mr", "mrl", 5), ("mlr", "mrl", 5), ("mr", "mrr", 1), ("r", "mrr", 4),
    ("mrl", "D", 4), ("mrr", "E", 3),
]
CHAIN_TRAP_EDGES = [("a", "b"), ("a", "u"), ("a", "e"), ("b", "v"), ("u", "v"), ("v", "e"),
              ("b", "x1"), ("e", "x2")]


def build(edges, leaves=()):
    """Dag from named edges ``(tail, head[, weight])``; returns it with the name->id map."""
    names = []
    for e in edges:
        for x in e[:2]:
            if x not in names:
                names.append(x)
    ids = {x: i for i, x in enumerate(names)}
    weights = {(ids[e[0]], ids[e[1]]): (e[2] if len(e) > 2 else 1) for e in edges}
    labels = {ids[x]: x for x in leaves}
    return Dag(range(len(names)), list(weights), weights, labels), ids


def six_taxa_network():
    dag, _ = build(SIX_TAXA_EDGES, leaves="ABCDEF")
    return validate_network(dag)


def chain_trap_dag():
    dag, _ = build(CHAIN_TRAP_EDGES, leaves=("x1", "x2"))
    return dag


def small_instance(seed, max_leaves=8, max_retics=4, max_cost=9, zero_costs=True):
    """Seeded small network with random integer costs."""
    rng = random.Random(seed)
    net = gen_network(rng.randint(2, max_leaves), rng.randint(0, max_retics), seed)
    if rng.random() < 0.3:
        net = contract_shortest(net, 0.1)
    lo = 0 if zero_costs else 1
    costs = {t: rng.randint(lo, max_cost) for t in net.taxon_names}
    return net, costs


def as_nx(dag):
    g = nx.DiGraph()
    for v in dag.vertices:
        g.add_node(v, label=dag.label(v) if not dag.children(v) else None)
    for u, v in dag.edges:
        g.add_edge(u, v, weight=dag.weight(u, v))
    return g


def isomorphic(d1, d2):
    return nx.is_isomorphic(as_nx(d1), as_nx(d2),
                            node_match=lambda a, b: a["label"] == b["label"],
                            edge_match=lambda a, b: a["weight"] == b["weight"])
