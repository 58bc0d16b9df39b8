from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dml import corpus
from dml.core import Diagram, Member, Morphism, Specification
from dml.dsl import HEADER, is_bare, load, parse, quote, serialize, tokenize
from dml.errors import InvalidDiagram, ParseError, ValidationError

from gen import random_diagram

DIAMOND = """
spec X class { method m0() }
spec Y1 class { method m0()  method m1() }
spec Y2 class { method m0()  method m2() }
spec Z class { method m0()  method m1()  method m2() }
morphism f1 : X -> Y1 kind=inheritance
morphism f2 : X -> Y2 kind=inheritance
morphism g1 : Y1 -> Z kind=inheritance
morphism g2 : Y2 -> Z kind=inheritance
equation f1;g1 = f2;g2
"""


def test_parse_the_diamond():
    d = parse(DIAMOND)
    assert (len(d.specs), len(d.morphisms), len(d.equations)) == (4, 4, 1)
    assert d.morphism("g1").mapping["m1"] == ("m1",)


def test_empty_input_is_the_empty_diagram():
    d = parse("")
    assert not d.specs and not d.morphisms and not d.equations and not d.cones
    assert serialize(d) == HEADER
    assert parse("# only a comment\n\n").specs == {}


def test_unknown_spec_kind():
    with pytest.raises(ParseError) as err:
        parse("spec X clazz {}")
    e = err.value
    assert (e.location.line, e.location.column) == (1, 8)
    assert set(e.expected) == {"class", "abstract", "builtin", "object", "typename", "unit"}


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("spec X class { method m( }", 1, 26),
        ("spec X class {}\n\n  spec Y class { feld a }", 3, 18),
        ('spec "X class {}', 1, 6),
        ("morphism f X -> Y", 1, 12),
        ("spec X class {}\nequation f = ", 2, 14),
    ],
)
def test_error_positions(text, line, column):
    with pytest.raises(ParseError) as err:
        parse(text)
    loc = err.value.location
    assert (loc.line, loc.column) == (line, column)
    lines = text.split("\n")
    assert 1 <= loc.line <= len(lines)
    assert 1 <= loc.column <= len(lines[loc.line - 1]) + 1


def test_validation_errors_are_not_parse_errors():
    with pytest.raises(ValidationError) as err:
        parse("spec X class {}\nmorphism f : X -> Y")
    assert [v.rule for v in err.value.violations] == ["unresolved"]
    with pytest.raises(ValidationError) as err:
        parse("spec X class {}\nspec X class {}")
    assert [v.rule for v in err.value.violations] == ["duplicate-spec"]
    with pytest.raises(ValidationError) as err:
        parse("spec A class { method m() }\nspec B class { method n() }\nmorphism f : A -> B { m -> m9 }")
    assert "unknown-member" in {v.rule for v in err.value.violations}


def test_default_images_by_name():
    d = parse("spec A class { method m() }\nspec B class { method m()  method n() }\nmorphism f : A -> B")
    assert dict(d.morphism("f").mapping) == {"m": ("m",)}


def test_ctor_defaults_to_the_spec_name():
    d = parse("spec Zp class { ctor(int)  dtor() }")
    assert d.spec("Zp").member_names == ("Zp", "~Zp")
    assert d.spec("Zp").member("Zp").kind == "constructor"


def test_template_suffix_is_normalized():
    d = parse("spec Envelope⟨Zp⟩ class {}")
    assert list(d.specs) == ["Envelope<Zp>"]


def test_pushouts_are_elaborated():
    d = parse(
        """
        spec X class { method m0() }
        spec Y1 class { method m0()  method m1() }
        spec Y2 class { method m0()  method m2() }
        morphism f1 : X -> Y1
        morphism f2 : X -> Y2
        pushout P from span(X, f1, f2) via g1, g2
        """
    )
    assert d.spec("P").member_names == ("m0", "m1", "m2")
    assert d.morphism("g1").kind == "coprojection"
    assert str(d.equations[-1].lhs) == "f1;g1"


def test_declared_vertex_only_registers_the_cone(load):
    d = load("virtual_inheritance.dml")
    assert list(d.cones) == ["diamond"]
    assert d.morphism("g1").kind == "inheritance"


def test_composites(load):
    d = load("linbox_copy.dml")
    c = d.morphism("abs_to_E2")
    assert c.components == ("inh", "tpp", "env_inst")
    assert "= inh;tpp;env_inst" in serialize(d)


def test_tokens():
    toks = tokenize('spec "Y1::m1" Envelope<Zp> 2 # note\n')
    assert [(t.type, t.value) for t in toks] == [
        ("NAME", "spec"),
        ("STRING", "Y1::m1"),
        ("NAME", "Envelope<Zp>"),
        ("NUMBER", "2"),
        ("EOF", ""),
    ]
    assert toks[2].span.column == 15


def test_quoting():
    assert is_bare("Zp") and is_bare("Envelope<Zp>")
    assert is_bare("spec")  # keywords are contextual
    assert not is_bare("Y1::m1") and not is_bare("Envelope⟨Zp⟩") and not is_bare("2")
    assert quote("Y1::m1") == '"Y1::m1"'
    assert quote('a"b') == '"a\\"b"'


def test_odd_names_round_trip():
    x = Specification("X", "class", (Member("m0"),))
    y = Specification("Y1", "class", (Member("Y1::m1"), Member("m0'")))
    d = Diagram.build([x, y], [Morphism("f", "X", "Y1", "generic", {"m0": ("Y1::m1",)})])
    text = serialize(d)
    assert '"Y1::m1"' in text
    assert parse(text) == d


def test_serialize_refuses_invalid_diagrams():
    bad = Diagram.build([Specification("A", "class", (Member("f"), Member("f")))])
    with pytest.raises(InvalidDiagram):
        serialize(bad)


@pytest.mark.parametrize("name", corpus.FILES)
def test_corpus_round_trips(name, tmp_path):
    d = corpus.load(name)
    text = serialize(d)
    assert parse(text) == d
    assert serialize(parse(text)) == text
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    assert load(path) == d


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_diagrams_round_trip(seed):
    d = random_diagram(random.Random(seed))
    text = serialize(d)
    assert parse(text) == d
    assert serialize(parse(text)) == text
