import itertools

import pytest

from helpers import build
from nswpd.core import Dag, pd_map_value, validate_network
from nswpd.extension import TreeExtension, is_tree_extension
from nswpd.generate import gen_dag, gen_network
from nswpd.oracles import (TooManySwitchings, TooManyTaxa, TooManyVertices, all_subset_values,
                           brute_budgeted, brute_pd_max, brute_pd_min, exhaustive_nsw, switchings)


def test_switching_count(six_taxa):
    trees = list(switchings(six_taxa))
    assert len(trees) == 8
    assert all(len(t) == len(six_taxa.edges) - 3 for t in trees)
    with pytest.raises(TooManySwitchings):
        list(switchings(six_taxa, cap=7))


def test_on_a_tree_all_measures_agree():
    net = gen_network(6, 0, 1)
    for k in range(1, 4):
        for a in itertools.combinations(net.taxon_names, k):
            assert brute_pd_min(net, a) == brute_pd_max(net, a) == pd_map_value(net, a)


def test_brute_budgeted_tie_break_and_errors(six_taxa):
    costs = {t: 1 for t in six_taxa.taxon_names}
    value, taxa = brute_budgeted(six_taxa, costs, 0)
    assert value == 0 and taxa == frozenset()
    with pytest.raises(ValueError):
        brute_budgeted(six_taxa, costs, 1, variant="avg")
    big = gen_network(21, 0, 0)
    with pytest.raises(TooManyTaxa):
        brute_budgeted(big, {t: 1 for t in big.taxon_names}, 3)


def test_all_subset_values_agree_with_brute(six_taxa):
    costs = {"A": 1, "B": 1, "D": 1, "C": 4, "E": 4, "F": 4}
    values = all_subset_values(six_taxa, "maxtree")
    for budget in range(16):
        best = max(v for a, v in values.items() if sum(costs[t] for t in a) <= budget)
        assert best == brute_budgeted(six_taxa, costs, budget, "maxtree")[0]


def test_exhaustive_nsw_small_cases(chain_trap):
    diamond, _ = build([("a", "b"), ("a", "c"), ("b", "r"), ("c", "r")])
    parent, width = exhaustive_nsw(diamond)
    assert width == 2 and is_tree_extension(diamond, parent)
    assert exhaustive_nsw(Dag([0], []))[1] == 0
    assert exhaustive_nsw(Dag(range(3), []))[1] == 0
    parent, width = exhaustive_nsw(chain_trap, max_vertices=8)
    assert width == 3 and TreeExtension(chain_trap, parent).width == 3
    with pytest.raises(TooManyVertices):
        exhaustive_nsw(gen_dag(8, 0.3, 0))


def test_exhaustive_nsw_tree():
    tree, _ = build([("r", "a"), ("r", "b"), ("a", "c"), ("a", "d")], "bcd")
    assert exhaustive_nsw(tree)[1] == 1
    assert exhaustive_nsw(validate_network(tree))[1] == 1
