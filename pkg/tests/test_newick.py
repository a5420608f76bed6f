import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import isomorphic
from nswpd.core import CyclicInput, UnknownTaxon, validate_network
from nswpd.generate import contract_shortest, gen_network, sample_costs
from nswpd.newick import (CostError, DanglingHybrid, DuplicateTaxon, InconsistentHybridTag,
                          MissingTaxon, NegativeCost, NewickSyntaxError, NonIntegerCost,
                          ResultRecord, digest, json_number, parse_costs, parse_enewick,
                          serialize_costs, serialize_enewick, unit_costs)


def load(text):
    dag, labels = parse_enewick(text)
    return validate_network(dag, labels)


def test_simple_tree():
    net = load("((a:1,b:2):3,c:4);")
    assert sorted(net.taxon_names) == ["a", "b", "c"]
    assert net.total_weight() == 10


def test_hybrid_occurrences_merge():
    net = load("((a,(c)#H1),(#H1,b));")
    assert len(net.reticulations) == 1
    (h,) = net.reticulations
    assert net.in_degree(h) == 2


def test_fraction_and_decimal_lengths():
    net = load("(a:0.5,b:1e1);")
    assert sorted(net.weight(net.root, v) for v in net.leaves) == [Fraction(1, 2), 10]


def test_comments_quotes_and_extra_fields():
    net = load("('taxon one':1[&note],b:2:90:0.5)root;")
    assert "taxon one" in net.taxon_names
    assert net.total_weight() == 3


def test_fixture_files():
    with open("tests/data/six_taxa.enwk") as fh:
        net = load(fh.read())
    assert len(net.reticulations) == 3
    assert sorted(net.taxon_names) == list("ABCDEF")


@pytest.mark.parametrize("text, error", [
    ("((a,b);", NewickSyntaxError),
    ("(a,b)", NewickSyntaxError),
    ("(a:x,b);", NewickSyntaxError),
    ("(a,b);junk", NewickSyntaxError),
    ("((a,(c)#H1),b);", DanglingHybrid),
    ("((a,(c)#H1),((d)#H1,b));", InconsistentHybridTag),
    ("((a)#H1,(#H1)#H2,(#H2)#H1);", InconsistentHybridTag),
])
def test_syntax_errors(text, error):
    with pytest.raises(error):
        parse_enewick(text)


def test_hybrid_cycle():
    with pytest.raises(CyclicInput):
        parse_enewick("((x,(#H2)#H1),(#H1)#H2);")


@pytest.mark.parametrize("seed", range(100))
def test_round_trip(seed):
    net = gen_network(3 + seed % 8, seed % 5, seed)
    if seed % 3 == 0:
        net = contract_shortest(net, 0.1)
    again = load(serialize_enewick(net))
    assert isomorphic(net, again)
    assert serialize_enewick(again) == serialize_enewick(load(serialize_enewick(again)))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.decimals(min_value=0, max_value=100, places=3), min_size=2, max_size=6))
def test_round_trip_decimal_weights(ws):
    net = load("(" + ",".join(f"t{i}:{w}" for i, w in enumerate(ws)) + ");")
    assert sorted(net.weights().values()) == sorted(Fraction(w) for w in ws)
    assert isomorphic(net, load(serialize_enewick(net)))


def test_costs(six_taxa):
    costs = parse_costs("taxon,cost\r\nA,1\r\nB,1\r\nC,4\r\nD,1\r\nE,4\r\nF,4\r\n", six_taxa)
    assert costs == {"A": 1, "B": 1, "C": 4, "D": 1, "E": 4, "F": 4}
    assert parse_costs(serialize_costs(costs), six_taxa) == costs
    assert set(unit_costs(six_taxa).values()) == {1}


@pytest.mark.parametrize("text, error", [
    ("A,1\nB,1\nC,1\nD,1\nE,1", MissingTaxon),
    ("A,1\nB,1\nC,1\nD,1\nE,1\nF,1.5", NonIntegerCost),
    ("A,1\nB,1\nC,1\nD,1\nE,1\nF,-1", NegativeCost),
    ("A,1\nA,2\nB,1\nC,1\nD,1\nE,1\nF,1", DuplicateTaxon),
    ("A,1\nB,1\nC,1\nD,1\nE,1\nF,1\nZ,1", UnknownTaxon),
    ("A,1,2", CostError),
])
def test_cost_errors(six_taxa, text, error):
    with pytest.raises(error):
        parse_costs(text, six_taxa)


def test_generated_costs_round_trip():
    net = gen_network(12, 2, 5)
    costs = sample_costs(net, 5)
    assert parse_costs(serialize_costs(costs), net) == costs


def test_result_record():
    rec = ResultRecord("map", Fraction(7, 2), ["b", "a"], 3, 2, 12.3456, None, digest("x"))
    d = json.loads(rec.to_json())
    assert d["value"] == "7/2" and d["taxa"] == ["a", "b"] and d["millis"] == 12.346
    assert json.loads(rec.to_json(timings=False))["millis"] is None
    assert json_number(Fraction(4)) == 4
    assert digest("a", "b") != digest("ab")
