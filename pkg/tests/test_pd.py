import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import build, small_instance
from nswpd.core import UnknownTaxon, offspring_edges, pd_map_value, validate_network
from nswpd.exact import heuristic_extension, nsw_pipeline
from nswpd.extension import TreeExtension
from nswpd.generate import gen_network
from nswpd.newick import unit_costs
from nswpd.oracles import brute_budgeted, brute_pd_max, brute_pd_min
from nswpd.pd import (BudgetError, EmptyTaxonSet, ExtensionMismatch, combine_children,
                      compute_min_tree_pd, restrict_to_ancestors, solve_b_map_pd,
                      solve_b_maxtree_pd)

SIX_TAXA_COSTS = {"A": 1, "B": 1, "D": 1, "C": 4, "E": 4, "F": 4}


# -- child combination --------------------------------------------------------

def brute_combine(tables, mode):
    better = max if mode == "max" else min
    out = {}
    for keys in itertools.product(*(list(t) for t in tables)):
        if any(a & b for a, b in itertools.combinations(keys, 2)):
            continue
        s = 0
        for k in keys:
            s |= k
        for idx in itertools.product(*(range(len(t[k])) for t, k in zip(tables, keys))):
            val = sum(t[k][i] for t, k, i in zip(tables, keys, idx))
            b = sum(idx)
            out.setdefault(s, {})
            out[s][b] = better(out[s].get(b, val), val)
    return out


table_strategy = st.integers(1, 3).flatmap(lambda n: st.dictionaries(
    st.integers(0, 15),
    st.lists(st.integers(-5, 20), min_size=n, max_size=n).map(lambda xs: np.array(xs, float)),
    min_size=1, max_size=4))


@settings(max_examples=150, deadline=None)
@given(st.lists(table_strategy, min_size=0, max_size=3), st.sampled_from(["max", "min"]))
def test_combine_children_matches_partition_enumeration(tables, mode):
    got = combine_children(tables, mode)
    want = brute_combine(tables, mode)
    assert set(got) == set(want)
    fill = -np.inf if mode == "max" else np.inf
    for s, arr in got.items():
        for b, x in enumerate(arr):
            assert x == want[s].get(b, fill)


def test_combine_children_cap():
    t = {1: np.array([0.0, 1.0, 2.0])}
    u = {2: np.array([0.0, 5.0])}
    assert list(combine_children([t, u], cap=1)[3]) == [0.0, 5.0]
    assert list(combine_children([t, u])[3]) == [0.0, 5.0, 6.0, 7.0]


# -- six-taxon example -----------------------------------------------------------

def test_six_taxa_values(six_taxa):
    ext, _ = nsw_pipeline(six_taxa)
    assert pd_map_value(six_taxa, "ABD") == 41
    assert brute_pd_max(six_taxa, "ABD") == 30
    assert brute_pd_min(six_taxa, "ABD") == 28
    assert compute_min_tree_pd(six_taxa, "ABD", ext) == 28
    sol = solve_b_map_pd(six_taxa, SIX_TAXA_COSTS, 3, ext)
    assert sol.value == 41 and sol.taxa == frozenset("ABD")
    tree = solve_b_maxtree_pd(six_taxa, SIX_TAXA_COSTS, 3, ext)
    assert tree.value == 30 and tree.taxa == frozenset("ABD")


@pytest.mark.parametrize("budget", range(20))
@pytest.mark.parametrize("route", ["dp1", "dp2", "auto"])
def test_six_taxa_every_budget(six_taxa, budget, route):
    ext, _ = nsw_pipeline(six_taxa)
    for solve, variant in ((solve_b_map_pd, "map"), (solve_b_maxtree_pd, "maxtree")):
        sol = solve(six_taxa, SIX_TAXA_COSTS, budget, ext, route=route)
        assert sol.value == brute_budgeted(six_taxa, SIX_TAXA_COSTS, budget, variant)[0]
        assert sum(SIX_TAXA_COSTS[t] for t in sol.taxa) <= budget


def test_backtracking_extremes(six_taxa):
    for solve in (solve_b_map_pd, solve_b_maxtree_pd):
        sol = solve(six_taxa, unit_costs(six_taxa), 0)
        assert sol.taxa == frozenset() and sol.value == 0
        sol = solve(six_taxa, unit_costs(six_taxa), 6)
        assert sol.taxa == frozenset("ABCDEF")
    assert solve_b_map_pd(six_taxa, unit_costs(six_taxa), 6).value == six_taxa.total_weight()


def test_budget_is_clamped(six_taxa):
    sol = solve_b_map_pd(six_taxa, SIX_TAXA_COSTS, 10 ** 6)
    assert sol.budget == sum(SIX_TAXA_COSTS.values())
    assert sol.taxa == frozenset("ABCDEF")


def test_zero_cost_taxa_are_free(six_taxa):
    costs = dict(SIX_TAXA_COSTS, C=0)
    assert "C" in solve_b_map_pd(six_taxa, costs, 0).taxa


def test_route_selection(six_taxa):
    assert solve_b_map_pd(six_taxa, SIX_TAXA_COSTS, 3).route == "dp1"
    assert solve_b_map_pd(six_taxa, SIX_TAXA_COSTS, 14).route == "dp2"
    with pytest.raises(ValueError):
        solve_b_map_pd(six_taxa, SIX_TAXA_COSTS, 3, route="dp3")


def test_input_errors(six_taxa, chain_trap):
    with pytest.raises(BudgetError):
        solve_b_map_pd(six_taxa, SIX_TAXA_COSTS, -1)
    with pytest.raises(BudgetError):
        solve_b_map_pd(six_taxa, {"A": 1}, 3)
    with pytest.raises(BudgetError):
        solve_b_map_pd(six_taxa, dict(SIX_TAXA_COSTS, A=-2), 3)
    with pytest.raises(UnknownTaxon):
        solve_b_map_pd(six_taxa, dict(SIX_TAXA_COSTS, Z=1), 3)
    with pytest.raises(EmptyTaxonSet):
        compute_min_tree_pd(six_taxa, [])
    with pytest.raises(UnknownTaxon):
        compute_min_tree_pd(six_taxa, ["Z"])
    with pytest.raises(ExtensionMismatch):
        solve_b_map_pd(six_taxa, SIX_TAXA_COSTS, 3, nsw_pipeline(chain_trap)[0])


def test_fractional_weights_stay_exact():
    dag, _ = build([("r", "a", Fraction(1, 3)), ("r", "u", Fraction(1, 2)),
                    ("u", "b", Fraction(1, 7)), ("u", "c", 2)], "abc")
    net = validate_network(dag)
    sol = solve_b_map_pd(net, unit_costs(net), 2)
    assert sol.value == brute_budgeted(net, unit_costs(net), 2)[0] == Fraction(17, 6)


# -- randomised cross-checks ------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.data())
def test_budgeted_against_oracle(seed, data):
    net, costs = small_instance(seed, max_leaves=7, max_retics=3)
    budget = data.draw(st.integers(0, sum(costs.values()) + 2))
    for solve, variant in ((solve_b_map_pd, "map"), (solve_b_maxtree_pd, "maxtree")):
        sol = solve(net, costs, budget)
        assert sol.value == brute_budgeted(net, costs, budget, variant)[0]
        assert sum(costs[t] for t in sol.taxa) <= budget


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.data())
def test_solutions_are_self_consistent(seed, data):
    net, costs = small_instance(seed)
    budget = data.draw(st.integers(0, sum(costs.values())))
    sol = solve_b_map_pd(net, costs, budget)
    assert pd_map_value(net, sol.taxa) == sol.value
    tree = solve_b_maxtree_pd(net, costs, budget)
    F = tree.witness
    assert sum((net.weight(*e) for e in F), Fraction(0)) == tree.value
    heads = [v for _, v in F]
    assert len(heads) == len(set(heads))              # a forest: one incoming edge each
    tails = {u for u, _ in F}
    witness_leaves = {v for v in heads if v not in tails}
    assert witness_leaves == {net.leaf(t) for t in tree.taxa}
    assert F <= offspring_edges(net, tree.taxa)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.data())
def test_min_tree_against_oracle(seed, data):
    net, _ = small_instance(seed)
    taxa = data.draw(st.sets(st.sampled_from(net.taxon_names), min_size=1))
    value = compute_min_tree_pd(net, taxa)
    assert value == brute_pd_min(net, taxa)
    assert value <= brute_pd_max(net, taxa) <= pd_map_value(net, taxa)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.data())
def test_restrict_to_ancestors(seed, data):
    net, _ = small_instance(seed)
    ext, _ = heuristic_extension(net)
    taxa = data.draw(st.sets(st.sampled_from(net.taxon_names), min_size=1))
    leaves = {net.leaf(t) for t in taxa}
    sub, sext = restrict_to_ancestors(net, leaves, ext)
    assert set(sub.vertices) == net.ancestors(leaves)
    assert set(sub.edges) == {e for e in net.edges if e[1] in sub}
    assert sext.width <= ext.width
    for v in sub.vertices:
        # the projected parent is the nearest kept ancestor in the original tree
        p = ext.parent[v]
        while p is not None and p not in sub:
            p = ext.parent[p]
        assert sext.parent[v] == p


@pytest.mark.parametrize("seed", range(10))
def test_tree_inputs_agree(seed):
    net = gen_network(6, 0, seed)
    costs = {t: 1 + i % 3 for i, t in enumerate(net.taxon_names)}
    for budget in range(sum(costs.values()) + 1):
        a = solve_b_map_pd(net, costs, budget)
        b = solve_b_maxtree_pd(net, costs, budget)
        assert a.value == b.value
        if a.taxa:
            assert compute_min_tree_pd(net, a.taxa) == a.value


@pytest.mark.parametrize("seed", range(10))
def test_extension_choice_does_not_matter(seed):
    net, costs = small_instance(seed + 500)
    exts = [nsw_pipeline(net)[0], heuristic_extension(net)[0],
            TreeExtension(net, {v: (None if i == 0 else net.topological_order[i - 1])
                                for i, v in enumerate(net.topological_order)})]
    taxa = net.taxon_names[:3]
    for budget in range(0, sum(costs.values()) + 1, 3):
        values = {(solve_b_map_pd(net, costs, budget, e).value,
                   solve_b_maxtree_pd(net, costs, budget, e).value) for e in exts}
        assert len(values) == 1
    assert len({compute_min_tree_pd(net, taxa, e) for e in exts}) == 1
