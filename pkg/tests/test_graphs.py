from __future__ import annotations

import pytest

from dml.errors import IllFormedGraphMorphism, InvalidSpan, NoSharedApex
from dml.graphs import Arrow, GraphMorphism, PlainGraph, graph_pushout, inclusion, parameter_passing


def one_edge(name, src, tgt):
    return PlainGraph(name, (src,) if src == tgt else (src, tgt), {name: (src, tgt)})


def test_gluing_two_edges_along_a_node():
    f, a = one_edge("f", "X", "Y"), one_edge("a", "U", "X")
    apex = PlainGraph("apex", ("X",))
    po = graph_pushout(inclusion(apex, f), inclusion(apex, a))
    assert sorted(po.graph.nodes) == ["U", "X", "Y"]
    assert po.graph.edges == {"f": ("X", "Y"), "a": ("U", "X")}
    po.left.check()
    po.right.check()


def test_gluing_parallel_edges_along_an_edge():
    g = PlainGraph("G", ("A", "B"), {"e": ("A", "B")})
    h = PlainGraph("H", ("A", "B"), {"e": ("A", "B"), "k": ("B", "A")})
    po = graph_pushout(inclusion(g, g), inclusion(g, h))
    assert po.graph.edges == {"e": ("A", "B"), "k": ("B", "A")}


def test_morphism_must_preserve_endpoints():
    g = one_edge("e", "A", "B")
    h = PlainGraph("H", ("A", "B"), {"e": ("B", "A")})
    with pytest.raises(IllFormedGraphMorphism):
        GraphMorphism(g, h, {"A": "A", "B": "B"}, {"e": "e"}).check()


def test_span_legs_share_a_source():
    g, h = one_edge("e", "A", "B"), one_edge("k", "C", "D")
    with pytest.raises(InvalidSpan):
        graph_pushout(inclusion(g, g), inclusion(h, h))


def test_dangling_edges_are_rejected():
    with pytest.raises(ValueError):
        PlainGraph("G", ("A",), {"e": ("A", "B")})


def test_parameter_passing_composes():
    arrow = parameter_passing(one_edge("f", "X", "Y"), one_edge("a", "U", "X"))
    assert (arrow.source, arrow.target, arrow.label) == ("U", "Y", "f.a")
    assert arrow.steps == ("a", "f")


def test_parameter_passing_chains():
    first = parameter_passing(one_edge("f", "X", "Y"), one_edge("a", "U", "X"))
    second = parameter_passing(one_edge("g", "Y", "Z"), first.as_graph())
    assert second.label == "g.f.a"
    assert second.steps == ("a", "f", "g")


def test_identity_is_a_unit():
    ident = one_edge("id_X", "X", "X")
    a = one_edge("a", "U", "X")
    assert parameter_passing(ident, a).label == "a"
    f = one_edge("f", "X", "Y")
    assert parameter_passing(f, one_edge("id_X", "X", "X")).label == "f"


def test_identity_only_label():
    assert Arrow("X", "X", ()).label == "id_X"


def test_parameter_passing_needs_a_shared_node():
    with pytest.raises(NoSharedApex):
        parameter_passing(one_edge("f", "X", "Y"), one_edge("a", "U", "V"))
    with pytest.raises(NoSharedApex):
        parameter_passing(one_edge("f", "X", "Y"), one_edge("a", "X", "V"))
