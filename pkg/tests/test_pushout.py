from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dml.core import Cone, Diagram, Member, Morphism, Span, Specification, compose_morphisms, validate_diagram
from dml.errors import (
    BaseMismatch,
    CompositeLegTarget,
    InvalidSpan,
    KindClash,
    NameTaken,
    NonCommutingCone,
)
from dml.pushout import compute_pushout, is_pushout, mediating_morphism, name_classes, verify_cone_commutes

from gen import random_cone_over, random_span
from oracles import closure_partition


def spec(name, *members, kind="class"):
    return Specification(name, kind, tuple(Member(m) for m in members))


@pytest.fixture
def diamond(load):
    return load("virtual_inheritance.dml")


@pytest.fixture
def span_only(diamond):
    keep = {k: v for k, v in diamond.morphisms.items() if k in ("f1", "f2")}
    return Diagram(diamond.specs, keep)


def test_diamond_pushout_shares_m0(span_only):
    p = compute_pushout(span_only, Span("X", "f1", "f2"), "P")
    assert p.vertex.member_names == ("m0", "m1", "m2")
    assert p.provenance["m0"] == ((1, "Y1", "m0"), (2, "Y2", "m0"))
    assert p.provenance["m2"] == ((2, "Y2", "m2"),)
    assert dict(p.left_coprojection.mapping) == {"m0": ("m0",), "m1": ("m1",)}
    assert p.cone == Cone("P", "X", "f1", "f2", "P", "in1_P", "in2_P")
    assert p.added_equation in p.diagram.equations
    assert validate_diagram(p.diagram) == []


def test_declared_diamond_is_a_pushout(diamond):
    ok, cert = is_pushout(diamond, diamond.cones["diamond"])
    assert ok and cert.holds
    assert dict(cert.mapping) == {"m0": "m0", "m1": "m1", "m2": "m2"}


def test_same_names_outside_the_apex_stay_apart():
    x = spec("X", "m0")
    y1, y2 = spec("Y1", "m0", "k"), spec("Y2", "m0", "k")
    d = Diagram.build(
        [x, y1, y2],
        [Morphism("f1", "X", "Y1", "generic", {"m0": ("m0",)}), Morphism("f2", "X", "Y2", "generic", {"m0": ("m0",)})],
    )
    span = Span("X", "f1", "f2")
    assert compute_pushout(d, span, "P").vertex.member_names == ("m0", "Y1::k", "Y2::k")
    assert compute_pushout(d, span, "P", naming="opaque").vertex.member_names == ("v0", "v1", "v2")


def test_name_classes_policies():
    classes = [((1, "a"), (2, "b")), ((1, "c"),)]
    assert name_classes(classes, ("L", "R"), "left") == ["L::a", "c"]
    assert name_classes(classes, ("L", "R"), "right") == ["R::b", "c"]
    with pytest.raises(ValueError):
        name_classes(classes, ("L", "R"), "middle")


def test_empty_apex_gives_coproduct():
    d = Diagram.build(
        [spec("X"), spec("Y1", "a"), spec("Y2", "b")],
        [Morphism("f1", "X", "Y1"), Morphism("f2", "X", "Y2")],
    )
    p = compute_pushout(d, Span("X", "f1", "f2"), "P")
    assert p.vertex.member_names == ("a", "b")


def test_collapse_through_a_non_injective_leg():
    d = Diagram.build(
        [spec("X", "p", "q"), spec("Y1", "a", "b"), spec("Y2", "c")],
        [
            Morphism("f1", "X", "Y1", "generic", {"p": ("a",), "q": ("b",)}),
            Morphism("f2", "X", "Y2", "generic", {"p": ("c",), "q": ("c",)}),
        ],
    )
    p = compute_pushout(d, Span("X", "f1", "f2"), "P")
    assert len(p.vertex.members) == 1
    assert {o[2] for o in p.provenance[p.vertex.member_names[0]]} == {"a", "b", "c"}


def test_span_errors(diamond, span_only):
    with pytest.raises(InvalidSpan):
        compute_pushout(diamond, Span("Y1", "f1", "f2"), "P")
    with pytest.raises(NameTaken):
        compute_pushout(span_only, Span("X", "f1", "f2"), "Z")
    with pytest.raises(NameTaken):
        compute_pushout(span_only, Span("X", "f1", "f2"), "P", left_coproj="f1")
    composite = span_only.with_morphisms(
        Morphism("f3", "X", "Y1", "generic", {"m0": ("m0", "m1")})
    )
    with pytest.raises(CompositeLegTarget):
        compute_pushout(composite, Span("X", "f3", "f2"), "P")


def test_kind_clash_is_reported():
    y1 = Specification("Y1", "class", (Member("a", "field", ("int",)),))
    d = Diagram.build(
        [spec("X", "p"), y1, spec("Y2", "b")],
        [Morphism("f1", "X", "Y1", "generic", {"p": ("a",)}), Morphism("f2", "X", "Y2", "generic", {"p": ("b",)})],
    )
    with pytest.raises(KindClash):
        compute_pushout(d, Span("X", "f1", "f2"), "P")


def test_cone_commutes_check(diamond):
    assert verify_cone_commutes(diamond, diamond.cones["diamond"])
    z = spec("Z", "m0", "m0'", "m1", "m2")
    g2 = Morphism("g2", "Y2", "Z", "generic", {"m0": ("m0'",), "m2": ("m2",)})
    bad = Diagram(diamond.specs, diamond.morphisms).with_specs(z).with_morphisms(g2)
    assert not verify_cone_commutes(bad, diamond.cones["diamond"])
    with pytest.raises(NonCommutingCone):
        is_pushout(bad, diamond.cones["diamond"])


def test_over_identification_is_refuted(diamond):
    z = spec("Z", "m0", "m12")
    g1 = Morphism("g1", "Y1", "Z", "generic", {"m0": ("m0",), "m1": ("m12",)})
    g2 = Morphism("g2", "Y2", "Z", "generic", {"m0": ("m0",), "m2": ("m12",)})
    d = Diagram(diamond.specs, diamond.morphisms).with_specs(z).with_morphisms(g1, g2)
    ok, cert = is_pushout(d, diamond.cones["diamond"])
    assert not ok
    assert cert.kind == "over-identification" and cert.members == ("m1", "m2")


def test_extra_member_is_refuted(diamond):
    z = spec("Z", "m0", "m1", "m2", "m3")
    d = diamond.with_specs(z)
    ok, cert = is_pushout(d, diamond.cones["diamond"])
    assert (ok, cert.kind, cert.members) == (False, "extra-member", ("m3",))


def test_mediating_into_z_plus_m3(span_only):
    p = compute_pushout(span_only, Span("X", "f1", "f2"), "P")
    zm = spec("Z+m3", "m0", "m1", "m2", "m3")
    h1 = Morphism("h1", "Y1", "Z+m3", "generic", {"m0": ("m0",), "m1": ("m1",)})
    h2 = Morphism("h2", "Y2", "Z+m3", "generic", {"m0": ("m0",), "m2": ("m2",)})
    d = p.diagram.with_specs(zm).with_morphisms(h1, h2)
    other = Cone("other", "X", "f1", "f2", "Z+m3", "h1", "h2")
    h = mediating_morphism(d, p, other)
    assert (h.source, h.target, h.kind) == ("P", "Z+m3", "mediating")
    assert dict(h.mapping) == {"m0": ("m0",), "m1": ("m1",), "m2": ("m2",)}
    # the Z+m3 cone is not itself a pushout
    assert is_pushout(d, other)[1].kind == "extra-member"


def test_mediating_rejects_other_bases(diamond):
    other = Cone("other", "X", "f2", "f1", "Z", "g2", "g1")
    with pytest.raises(BaseMismatch):
        mediating_morphism(diamond, diamond.cones["diamond"], other)


def test_pushout_agrees_with_closure_oracle():
    rng = random.Random(3)
    for _ in range(200):
        d, span = random_span(rng)
        p = compute_pushout(d, span, "P")
        x, f1, f2 = d.spec("X"), d.morphism("f1"), d.morphism("f2")
        want = closure_partition(
            d.spec("Y1").member_names,
            d.spec("Y2").member_names,
            [(f1.mapping[m][0], f2.mapping[m][0]) for m in x.member_names],
        )
        got = {frozenset((leg, m) for leg, _, m in o) for o in p.provenance.values()}
        assert got == want


def test_random_cones_factor_uniquely():
    rng = random.Random(5)
    for _ in range(100):
        d, span = random_span(rng)
        full, p, other = random_cone_over(rng, d, span)
        h = mediating_morphism(full, p, other)
        for g, gp in ((p.left_coprojection, full.morphism("h1")), (p.right_coprojection, full.morphism("h2"))):
            assert dict(compose_morphisms(g, h).mapping) == dict(gp.mapping)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10_000))
def test_pushout_is_symmetric(seed):
    d, span = random_span(random.Random(seed))
    left = compute_pushout(d, span, "P", naming="opaque")
    right = compute_pushout(d, Span("X", "f2", "f1"), "P", naming="opaque")
    flip = {1: 2, 2: 1}
    a = {frozenset((leg, m) for leg, _, m in o) for o in left.provenance.values()}
    b = {frozenset((flip[leg], m) for leg, _, m in o) for o in right.provenance.values()}
    assert a == b
