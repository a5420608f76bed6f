import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import build
from nswpd.core import Dag
from nswpd.exact import (Exceeded, StateLimitExceeded, heuristic_extension, nsw_pipeline,
                         optimal_extension_exact)
from nswpd.extension import TreeExtension, is_tree_extension
from nswpd.generate import contract_shortest, gen_dag, gen_network
from nswpd.oracles import exhaustive_nsw

DIAMOND = [("a", "b"), ("a", "c"), ("b", "r"), ("c", "r")]


def test_tree_and_diamond():
    tree, _ = build([("r", "a"), ("r", "b"), ("a", "c"), ("a", "d")])
    diamond, _ = build(DIAMOND)
    for solve in (optimal_extension_exact, nsw_pipeline, heuristic_extension):
        assert solve(tree)[1] == 1
        assert solve(diamond)[1] == 2


def test_single_vertex_and_edgeless():
    assert nsw_pipeline(Dag([0], []))[1] == 0
    assert optimal_extension_exact(Dag(range(4), []))[1] == 0
    with pytest.raises(ValueError):
        optimal_extension_exact(Dag([], []))


def test_chain_trap(chain_trap):
    assert optimal_extension_exact(chain_trap)[1] == 3
    assert nsw_pipeline(chain_trap)[1] == 3
    assert nsw_pipeline(chain_trap, reduce=False)[1] == 3


def test_six_taxa(six_taxa):
    assert nsw_pipeline(six_taxa)[1] == nsw_pipeline(six_taxa, reduce=False)[1] == 3


def test_upper_bound(chain_trap):
    assert optimal_extension_exact(chain_trap, upper_bound=3)[1] == 3
    with pytest.raises(Exceeded) as info:
        optimal_extension_exact(chain_trap, upper_bound=2)
    assert info.value.bound == 2
    with pytest.raises(Exceeded):
        nsw_pipeline(chain_trap, upper_bound=2)


def test_state_cap():
    g = gen_dag(20, 0.3, 3)
    assert heuristic_extension(g)[1] > g.max_in_degree()   # the search must actually run
    with pytest.raises(StateLimitExceeded):
        optimal_extension_exact(g, max_states=3)


@pytest.mark.parametrize("seed", range(60))
def test_matches_exhaustive(seed):
    g = gen_dag(2 + seed % 6, 0.2 + 0.1 * (seed % 6), seed)
    ext, width = optimal_extension_exact(g)
    assert width == exhaustive_nsw(g)[1] == ext.width
    assert nsw_pipeline(g)[1] == width


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_heuristic_bounds(seed):
    g = gen_dag(4 + seed % 14, 0.3, seed)
    h_ext, h = heuristic_extension(g)
    assert is_tree_extension(g, h_ext.parent) and h_ext.width == h
    ext, width = optimal_extension_exact(g)
    assert g.max_in_degree() <= width <= h
    assert ext.width == width


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.randoms(use_true_random=False))
def test_monotone_under_edge_deletion(seed, rng):
    g = gen_dag(4 + seed % 10, 0.4, seed)
    if not g.edges:
        return
    drop = rng.choice(g.edges)
    smaller = Dag(g.vertices, [e for e in g.edges if e != drop])
    assert nsw_pipeline(smaller)[1] <= nsw_pipeline(g)[1]


@pytest.mark.parametrize("seed", range(100))
def test_pipeline_on_networks(seed):
    rng = random.Random(seed)
    net = gen_network(20, rng.randint(0, 5), seed)
    if seed % 2:
        net = contract_shortest(net, 0.1)
    ext, width = nsw_pipeline(net)
    assert TreeExtension(net, ext.parent).width == width
    assert nsw_pipeline(net, reduce=False)[1] == width
