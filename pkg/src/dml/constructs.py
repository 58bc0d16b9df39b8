"""Object-oriented constructions expressed as pushouts.

Builders set up the span for a construction (template parameter passing,
object instantiation, polymorphism) and hand it to the pushout engine;
:func:`classify_pushout` goes the other way and names the construction a
computed pushout performs.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .core import Cone, Diagram, Member, Morphism, Span, Specification, kind_compatible
from .errors import (
    ExtensionMismatch,
    MissingInterfaceMember,
    NameTaken,
    NotAbstract,
    NotAPushout,
    NotGeneric,
    NotInstantiable,
    UnimplementedVirtual,
)
from .pushout import PushoutResult, compute_pushout, is_pushout

PATTERN_TAGS = (
    "virtual-inheritance",
    "template-parameter-passing",
    "object-instantiation",
    "polymorphism",
    "generic-gluing",
)

# coprojection labels, as the arrows are captioned in DML diagrams
TEMPLATE_PASSING = "template parameter passing"
INSTANTIATION = "instantiation"
POLYMORPHISM = "polymorphism"
EXTENSION = "extension"


@dataclass(frozen=True)
class PushoutPattern:
    tag: str
    bindings: Mapping[str, str] = field(default_factory=dict)


class EnvelopeVariant(str, Enum):
    COPY = "copy"
    INDIRECT = "indirect"
    INHERITANCE = "inheritance"


def _spec(d: Diagram, s: Specification | str) -> Specification:
    return d.spec(s) if isinstance(s, str) else s


def _fresh(taken: Iterable[str], base: str) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    i = 2
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def _is_extension(leg: Morphism, apex: Specification, target: Specification) -> bool:
    images = [leg.mapping[m] for m in apex.member_names]
    name_preserving = all(img == (m,) for m, img in zip(apex.member_names, images))
    return name_preserving and len(target.members) > len(apex.members)


# -- classification --------------------------------------------------------


def classify_cone(d: Diagram, c: Cone) -> PushoutPattern:
    """Name the construction a verified pushout performs.

    Rules, first match wins: both legs inheritance; a type-parameter apex
    with a template-parameter leg into a generic class; an instantiation or
    value leg, or a leg into an object; an abstract apex glued along an
    inheritance leg and an extension; otherwise plain gluing.
    """
    ok, cert = is_pushout(d, c)
    if not ok:
        raise NotAPushout(f"{c.name}: {cert.message}")
    apex = d.spec(c.apex)
    f1, f2 = d.morphism(c.left), d.morphism(c.right)
    y1, y2 = d.spec(f1.target), d.spec(f2.target)
    bindings = {"gluing-point": apex.name, "left": y1.name, "right": y2.name, "vertex": c.vertex}
    legs = ((f1, y1, y2), (f2, y2, y1))

    if f1.kind == "inheritance" and f2.kind == "inheritance":
        return PushoutPattern("virtual-inheritance", bindings)
    if apex.kind == "type-parameter":
        for leg, target, other in legs:
            if (
                leg.kind == "template-parameter"
                and target.kind == "generic-class"
                and other.kind in ("class", "builtin-type", "abstract-class")
            ):
                return PushoutPattern(
                    "template-parameter-passing",
                    {**bindings, "generic": target.name, "actual": other.name},
                )
    for leg, target, other in legs:
        if leg.kind in ("instantiation", "value") or target.kind == "object":
            return PushoutPattern(
                "object-instantiation", {**bindings, "class": other.name, "argument": target.name}
            )
    if apex.kind == "abstract-class":
        for leg, target, other in legs:
            opposite = f2 if leg is f1 else f1
            if opposite.kind == "inheritance" and _is_extension(leg, apex, target):
                return PushoutPattern(
                    "polymorphism", {**bindings, "extension": target.name, "derived": other.name}
                )
    return PushoutPattern("generic-gluing", bindings)


def classify_pushout(d: Diagram, p: PushoutResult | Cone) -> PushoutPattern:
    if isinstance(p, PushoutResult):
        if p.cone.vertex not in d.specs:
            d = p.diagram
        return classify_cone(d, p.cone)
    return classify_cone(d, p)


# -- elaboration of declared pushouts ---------------------------------------


def _template_param(generic: Specification, apex: Specification) -> str:
    if apex.name in generic.type_params:
        return apex.name
    return generic.type_params[0]


def elaborate_pushout(
    d: Diagram,
    span: Span,
    vertex: str,
    *,
    cone_name: str | None = None,
    left_coproj: str | None = None,
    right_coproj: str | None = None,
) -> PushoutResult:
    """Compute a declared pushout and finish its vertex according to its pattern.

    Template parameter passing yields a class with the formal parameter
    replaced by the actual one; the coprojection a construction is named
    after gets that name as its label.
    """
    kw = dict(cone_name=cone_name, left_coproj=left_coproj, right_coproj=right_coproj)
    draft = compute_pushout(d, span, vertex, **kw)
    pattern = classify_cone(draft.diagram, draft.cone)
    b = pattern.bindings
    labels: list[str | None] = [None, None]
    extra: dict = {}
    if pattern.tag == "template-parameter-passing":
        generic = d.spec(b["generic"])
        param = _template_param(generic, d.spec(span.apex))
        rest = tuple(p for p in generic.type_params if p != param)
        extra = dict(
            vertex_kind="generic-class" if rest else "class",
            type_params=rest,
            rename={param: b["actual"]},
        )
        labels[_side(span, d, generic.name)] = TEMPLATE_PASSING
    elif pattern.tag == "object-instantiation":
        labels[_side(span, d, b["class"])] = INSTANTIATION
    elif pattern.tag == "polymorphism":
        labels[_side(span, d, b["extension"])] = POLYMORPHISM
    else:
        return draft
    return compute_pushout(d, span, vertex, labels=tuple(labels), **kw, **extra)


def _side(span: Span, d: Diagram, target: str) -> int:
    return 0 if d.morphism(span.left).target == target else 1


# -- builders ----------------------------------------------------------------


def template_instantiate(
    d: Diagram,
    generic: Specification | str,
    param: str,
    actual: Specification | str,
    result_name: str,
    **names,
) -> PushoutResult:
    """Pass ``actual`` for the formal parameter ``param`` of ``generic``.

    The apex is the type-parameter specification bound to ``param`` (the
    source of the template-parameter morphism into ``generic``); its members
    are the interface ``actual`` has to provide.
    """
    generic, actual = _spec(d, generic), _spec(d, actual)
    if generic.kind != "generic-class" or param not in generic.type_params:
        raise NotGeneric(f"{generic.name} has no type parameter {param!r}")
    candidates = [
        m
        for m in d.morphisms.values()
        if m.target == generic.name
        and d.specs[m.source].kind == "type-parameter"
        and (m.kind == "template-parameter" or m.source == param)
    ]
    candidates.sort(key=lambda m: (m.source != param, m.kind != "template-parameter", m.name))
    if not candidates:
        raise NotGeneric(f"no type-parameter specification is bound to {generic.name}<{param}>")
    binding = candidates[0]
    interface = d.spec(binding.source)
    for m in interface.members:
        if m.name not in actual or not kind_compatible(m.kind, actual.member(m.name).kind):
            raise MissingInterfaceMember(m.name, actual.name)

    existing = sorted(
        (m for m in d.morphisms.values() if m.source == interface.name and m.target == actual.name),
        key=lambda m: m.name,
    )
    if existing:
        provides = existing[0]
    else:
        provides = Morphism(
            _fresh(d.morphisms, f"{interface.name}_to_{actual.name}"),
            interface.name,
            actual.name,
            "implementation",
            {m: (m,) for m in interface.member_names},
        )
        d = d.with_morphisms(provides)
    rest = tuple(p for p in generic.type_params if p != param)
    return compute_pushout(
        d,
        Span(interface.name, binding.name, provides.name),
        result_name,
        vertex_kind="generic-class" if rest else "class",
        type_params=rest,
        rename={param: actual.name},
        labels=(TEMPLATE_PASSING, None),
        **names,
    )


_INT = re.compile(r"-?\d+")
_FLOAT = re.compile(r"-?\d+\.\d+")


def literal_sort(literal: str) -> str:
    if _INT.fullmatch(literal):
        return "int"
    if _FLOAT.fullmatch(literal):
        return "double"
    if literal.startswith('"'):
        return "string"
    if literal.startswith("&"):
        return "pointer"
    return "literal"


def instantiate_object(
    d: Diagram,
    cls: Specification | str,
    obj_name: str,
    ctor_args: Sequence[str] = (),
) -> PushoutResult:
    """Create the object ``obj_name`` of ``cls`` built from ``ctor_args``.

    The arguments live in an object ``<obj_name>_args`` (one value member per
    literal) instantiated from the unit; gluing it with ``cls`` over the unit
    gives the object, whose coprojection from ``cls`` is the instantiation.
    With no arguments this is the empty constructor.
    """
    cls = _spec(d, cls)
    if cls.kind not in ("class", "builtin-type"):
        raise NotInstantiable(f"{cls.name} is a {cls.kind}")
    if obj_name in d.specs:
        raise NameTaken(f"specification {obj_name!r} already exists")
    unit = d.specs.get("U")
    if unit is None or unit.kind != "unit":
        unit = Specification(_fresh(d.specs, "U"), "unit")
        d = d.with_specs(unit)
    args_name = _fresh(d.specs, f"{obj_name}_args")
    args = Specification(
        args_name,
        "object",
        tuple(
            Member(f"arg{i}", "value", (literal_sort(lit),), literal=lit)
            for i, lit in enumerate(ctor_args)
        ),
    )
    to_cls = Morphism(_fresh(d.morphisms, f"{unit.name}_to_{cls.name}"), unit.name, cls.name, "generic")
    d = d.with_specs(args).with_morphisms(to_cls)
    to_args = Morphism(_fresh(d.morphisms, f"{unit.name}_to_{args_name}"), unit.name, args_name, "instantiation")
    d = d.with_morphisms(to_args)
    return compute_pushout(
        d,
        Span(unit.name, to_cls.name, to_args.name),
        obj_name,
        vertex_kind="object",
        labels=(INSTANTIATION, None),
    )


def polymorphism_apply(
    d: Diagram,
    abstract_spec: Specification | str,
    extension: Specification | str,
    derived: Specification | str,
    result_name: str,
    **names,
) -> PushoutResult:
    """Glue ``A+g`` (code written against the abstract interface) with a derived class.

    Pure virtual members of the abstract class resolve to the derived
    class's implementations in the vertex.
    """
    a, ext, b = _spec(d, abstract_spec), _spec(d, extension), _spec(d, derived)
    if a.kind != "abstract-class":
        raise NotAbstract(f"{a.name} is a {a.kind}")
    for m in a.members:
        if m.kind == "pure-virtual-method":
            if m.name not in b or b.member(m.name).kind != "method":
                raise UnimplementedVirtual(m.name, b.name)
        elif m.name not in b or not kind_compatible(m.kind, b.member(m.name).kind):
            raise ExtensionMismatch(f"{b.name} does not inherit {a.name}::{m.name}")
        if m.name not in ext or not kind_compatible(m.kind, ext.member(m.name).kind):
            raise ExtensionMismatch(f"{ext.name} does not contain {a.name}::{m.name}")

    def leg(target: Specification, kind: str, label: str | None) -> Morphism:
        nonlocal d
        for m in sorted(d.morphisms.values(), key=lambda m: m.name):
            if m.source == a.name and m.target == target.name and (kind != "inheritance" or m.kind == kind):
                return m
        made = Morphism(
            _fresh(d.morphisms, f"{a.name}_to_{target.name}"),
            a.name,
            target.name,
            kind,
            {m: (m,) for m in a.member_names},
            label=label,
        )
        d = d.with_morphisms(made)
        return made

    inherit = leg(b, "inheritance", None)
    extend = leg(ext, "generic", EXTENSION)
    return compute_pushout(
        d,
        Span(a.name, extend.name, inherit.name),
        result_name,
        labels=(POLYMORPHISM, None),
        **names,
    )


def make_envelope(
    variant: EnvelopeVariant | str,
    abstract_spec: Specification | None = None,
    param: Specification | None = None,
    name: str = "Env",
) -> Diagram:
    """A generic adaptor ``name<B>`` around the type parameter ``B``.

    ``copy`` holds a ``B`` member, ``indirect`` holds it through a pointer
    and ``inheritance`` inherits from ``B``.  Every non-structor member of
    ``B`` is re-exposed, generic methods included; constructors and
    destructors are the envelope's own.  With ``abstract_spec`` the envelope
    also inherits from the abstract class and implements its interface.
    """
    variant = EnvelopeVariant(variant)
    param = param or Specification("B", "type-parameter")
    ctor_sig = (param.name,) if variant is not EnvelopeVariant.INHERITANCE else next(
        (m.signature for m in param.members if m.kind == "constructor"), ()
    )
    members: dict[str, Member] = {name: Member(name, "constructor", ctor_sig)}
    if any(m.kind == "destructor" for m in param.members):
        members[f"~{name}"] = Member(f"~{name}", "destructor")
    if variant is not EnvelopeVariant.INHERITANCE:
        members["_b"] = Member("_b", "field", (param.name,), indirect=variant is EnvelopeVariant.INDIRECT)
    for m in param.members:
        if not m.is_structor:
            members.setdefault(m.name, m)
    if abstract_spec is not None:
        for m in abstract_spec.members:
            if m.is_structor:
                continue
            kind = "method" if m.kind == "pure-virtual-method" else m.kind
            members.setdefault(m.name, Member(m.name, kind, m.signature, m.is_generic))
    env = Specification(name, "generic-class", tuple(members.values()), (param.name,))

    def into_env(src: Specification) -> dict:
        out = {}
        for m in src.members:
            if m.kind == "destructor":
                out[m.name] = (f"~{name}",)
            elif m.kind == "constructor":
                out[m.name] = (name,)
            else:
                out[m.name] = (m.name,)
        return out

    kind = "inheritance" if variant is EnvelopeVariant.INHERITANCE else "template-parameter"
    morphisms = [Morphism(f"{param.name}_to_{name}", param.name, name, kind, into_env(param))]
    specs = [param, env]
    if abstract_spec is not None:
        specs.insert(1, abstract_spec)
        morphisms.append(
            Morphism(f"{abstract_spec.name}_to_{name}", abstract_spec.name, name, "inheritance", into_env(abstract_spec))
        )
    return Diagram.build(specs, morphisms)


def constructor_adjustment(p: PushoutResult) -> list[Member]:
    """Inherited constructors and destructors the vertex has to re-declare."""
    return [m for m in p.vertex.members if m.is_structor and p.provenance.get(m.name)]
