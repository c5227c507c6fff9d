import itertools
import json
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from hyperqss.access import (CLASS_TEMPLATES, AccessStructure, NotClassifiable, ParseError, catalog, classify,
                             enumerate_classes, format_structure, is_quantum, kind_predicates, optimal_rate,
                             parse_structure, region_index_sets, region_occupancy, remove, template_structure,
                             validate)


def orbit_count_by_isomorphism():
    """Independent count: quantum 3-edge occupancy patterns up to hypergraph isomorphism."""
    idx = region_index_sets(3)
    graphs = []
    for mask in range(1 << 7):
        edges = [{k for k, s in enumerate(idx) if mask >> k & 1 and e in s} for e in range(3)]
        if not all(edges) or any(not (a & b) for a, b in itertools.combinations(edges, 2)):
            continue
        if any(a <= b for a, b in itertools.permutations(edges, 2)):
            continue
        g = nx.Graph()
        for e in range(3):
            g.add_node(("e", e), side=0)
        for k in set().union(*edges):
            g.add_node(("r", k), side=1)
            for e in range(3):
                if k in edges[e]:
                    g.add_edge(("e", e), ("r", k))
        if not any(nx.is_isomorphic(g, h, node_match=lambda a, b: a["side"] == b["side"]) for h in graphs):
            graphs.append(g)
    return len(graphs)


def test_twelve_classes_by_two_methods():
    assert len(enumerate_classes()) == 12
    assert orbit_count_by_isomorphism() == 12


def test_parse_and_format_round_trip():
    s = parse_structure("{1234,1267,456}")
    assert s.universe == (1, 2, 3, 4, 5, 6, 7)
    assert format_structure(s) == "{1234,1267,456}"
    assert parse_structure(json.dumps(s.to_json())) == s


@pytest.mark.parametrize("bad", ["", "1234", "{}", "{12,a3}", "{120,13}", "{12,,3}", '{"edges": 3}'])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_structure(bad)


def test_validation_kinds():
    s = AccessStructure.from_edges([{1, 2}, {1, 2, 3}, set()], universe=[1, 2, 3, 4])
    kinds = {v.kind for v in validate(s).violations}
    assert kinds == {"NotAntichain", "EmptyEdge", "UncoveredParticipant"}
    assert validate(parse_structure("{12,13,23}")).ok


def test_quantum_condition():
    assert is_quantum(parse_structure("{12,13,23}"))
    assert not is_quantum(parse_structure("{12,34,15}"))


def test_maximal_unauthorized_threshold():
    s = parse_structure("{12,13,23}")
    assert sorted(map(sorted, s.maximal_unauthorized())) == [[1], [2], [3]]


def test_maximal_unauthorized_g9():
    s = parse_structure("{124,136,235}")
    got = {frozenset(b) for b in s.maximal_unauthorized()}
    for b in got:
        assert not s.authorized(b)
        assert all(s.authorized(b | {x}) for x in s.universe if x not in b)
    assert frozenset({1, 2, 3}) in got


def test_remove_drops_participants():
    s = remove(parse_structure("{124,136,235}"), {4})
    assert set(s.universe) == {1, 2, 3, 5, 6}
    assert frozenset({1, 2}) in s.edges


def test_regions_of_g9():
    occ = region_occupancy(parse_structure("{124,136,235}"))
    assert occ.region({0}) == {4}
    assert occ.region({0, 1}) == {1}
    assert occ.region({0, 1, 2}) == frozenset()
    assert len(occ.i_regions(2)) == 3


def test_kind_predicates():
    assert kind_predicates(parse_structure("{124,136,235}")).hypercycle
    star = kind_predicates(parse_structure("{12,13,14}"))
    assert star.hyperstar and not star.hyperpath
    assert kind_predicates(parse_structure("{12,23,34}")).hyperpath


@pytest.mark.parametrize("cid", sorted(CLASS_TEMPLATES))
def test_templates_classify_to_themselves(cid):
    assert classify(template_structure(cid)).class_id == cid


def test_three_edge_structure_is_g9():
    cls = classify(parse_structure("{1234,1267,456}"))
    assert cls.label == "G9"
    assert sorted(cls.block_sizes, reverse=True) == [2, 1, 1, 1, 1, 1]


@given(st.sampled_from(sorted(CLASS_TEMPLATES)), st.data())
def test_classification_invariant_under_relabelling(cid, data):
    nb = max(int(ch) for e in CLASS_TEMPLATES[cid] for ch in e)
    sizes = data.draw(st.lists(st.integers(1, 2), min_size=nb, max_size=nb))
    s = template_structure(cid, sizes)
    perm = data.draw(st.permutations(list(s.universe)))
    relabel = dict(zip(s.universe, perm))
    order = data.draw(st.permutations(range(3)))
    t = AccessStructure.from_edges([{relabel[x] for x in s.edges[i]} for i in order])
    cls = classify(t)
    assert cls.class_id == cid
    assert sorted(cls.block_sizes) == sorted(sizes)


@pytest.mark.parametrize("text", ["{12,13}", "{12,34,15}", "{12,123,34}", "{12,13,14,15}"])
def test_not_classifiable(text):
    with pytest.raises(NotClassifiable):
        classify(parse_structure(text))


def test_catalog_contents():
    rows = catalog()
    assert len(rows) == 83
    assert [r.serial for r in rows] == list(range(1, 84))
    assert rows[56].text == "{1234,1267,456}" and rows[56].class_id == 9
    for r in rows:
        assert classify(r.structure).class_id == r.class_id
        assert r.rate == optimal_rate(r.class_id)
    assert {r.rate_label for r in rows[:23]} == {"hyperstar"}
    assert {r.rate for r in rows[23:34]} == {Fraction(1)}
    assert {r.rate for r in rows[34:]} == {Fraction(2, 3)}
