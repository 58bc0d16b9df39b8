"""Pushouts of spans of specifications.

The vertex of the pushout of ``Y1 <-f1- X -f2-> Y2`` is the disjoint union
of the members of ``Y1`` and ``Y2`` quotiented by ``f1(x) ~ f2(x)`` for
every member ``x`` of ``X``.  Everything else in this module (verification,
comparison maps, mediating morphisms) is read off that quotient.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .core import (
    Cone,
    Diagram,
    Equation,
    Member,
    Morphism,
    Path,
    Span,
    Specification,
    compose_morphisms,
)
from .errors import (
    BaseMismatch,
    CompositeLegTarget,
    InvalidSpan,
    KindClash,
    NameTaken,
    NonCommutingCone,
    NotAPushout,
)
from .unionfind import quotient

NAMING_POLICIES = ("left", "right", "opaque")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def rename_sorts(sort: str, renaming: Mapping[str, str]) -> str:
    """Substitute identifiers inside a sort, including inside template arguments."""
    return _IDENT.sub(lambda m: renaming.get(m.group(0), m.group(0)), sort)


@dataclass(frozen=True)
class MemberClass:
    """One member of the pushout vertex, before naming."""

    origins: tuple[tuple[int, str], ...]  # (leg, member) pairs, leg 1 = left
    kind: str
    template: Member


@dataclass(frozen=True)
class Certificate:
    """Evidence returned by :func:`is_pushout`.

    ``kind`` is ``isomorphism`` (and ``mapping`` sends canonical vertex
    members to members of the tested vertex) or one of ``extra-member``,
    ``over-identification``, ``kind-mismatch``, ``composite-image``, in
    which case ``members`` holds the witness.
    """

    kind: str
    members: tuple[str, ...] = ()
    mapping: Mapping[str, str] = field(default_factory=dict)
    message: str = ""

    @property
    def holds(self) -> bool:
        return self.kind == "isomorphism"


@dataclass(frozen=True)
class PushoutResult:
    cone: Cone
    diagram: Diagram
    provenance: Mapping[str, tuple[tuple[int, str, str], ...]]
    added_equation: Equation

    @property
    def vertex(self) -> Specification:
        return self.diagram.spec(self.cone.vertex)

    @property
    def left_coprojection(self) -> Morphism:
        return self.diagram.morphism(self.cone.left_coproj)

    @property
    def right_coprojection(self) -> Morphism:
        return self.diagram.morphism(self.cone.right_coproj)

    @property
    def needs_constructor_adjustment(self) -> bool:
        return any(m.is_structor for m in self.vertex.members)


def span_parts(d: Diagram, span: Span):
    """Resolve a span to ``(X, f1, f2, Y1, Y2)``, checking it is usable for a pushout."""
    apex = d.spec(span.apex)
    f1, f2 = d.morphism(span.left), d.morphism(span.right)
    for leg in (f1, f2):
        if leg.source != apex.name:
            raise InvalidSpan(f"leg {leg.name} starts at {leg.source}, not at apex {apex.name}")
        if not leg.is_single_valued():
            bad = next(m for m, e in leg.mapping.items() if len(e) != 1)
            raise CompositeLegTarget(
                f"leg {leg.name} sends {bad!r} to the composite {'.'.join(leg.mapping[bad])}"
            )
    return apex, f1, f2, d.spec(f1.target), d.spec(f2.target)


def _merged_kind(kinds: set[str], where: str) -> str:
    if len(kinds) == 1:
        return next(iter(kinds))
    if kinds == {"method", "pure-virtual-method"}:
        return "method"
    raise KindClash(f"cannot merge members of kinds {sorted(kinds)} ({where})")


def member_classes(d: Diagram, span: Span, prefer: int = 1) -> list[MemberClass]:
    """The equivalence classes of the pushout vertex, in deterministic order.

    ``prefer`` picks which leg supplies the representative member when
    several are merged.
    """
    apex, f1, f2, y1, y2 = span_parts(d, span)
    glue = [(f1.mapping[x][0], f2.mapping[x][0]) for x in apex.member_names]
    specs = {1: y1, 2: y2}
    out = []
    for cls in quotient(y1.member_names, y2.member_names, glue):
        members = [(leg, specs[leg].member(m)) for leg, m in cls]
        where = ", ".join(f"{specs[leg].name}::{m.name}" for leg, m in members)
        kind = _merged_kind({m.kind for _, m in members}, where)
        ordered = sorted(members, key=lambda lm: (lm[0] != prefer,))
        template = next(m for _, m in ordered if m.kind == kind)
        out.append(MemberClass(tuple((leg, m.name) for leg, m in members), kind, template))
    return out


def _qualified(origins, names: tuple[str, str], prefer: int) -> str:
    leg, member = sorted(origins, key=lambda o: o[0] != prefer)[0]
    return f"{names[leg - 1]}::{member}"


def name_classes(
    classes: list[tuple[tuple[int, str], ...]],
    spec_names: tuple[str, str],
    policy: str = "left",
) -> list[str]:
    """Names for quotient classes given as ``(leg, name)`` origin tuples.

    ``left``/``right``: a class whose items share one name keeps it;
    otherwise, or on collision, the name is qualified by its origin
    (``Origin::name``), the preferred leg first.  ``opaque`` numbers the
    classes.
    """
    if policy not in NAMING_POLICIES:
        raise ValueError(f"unknown naming policy {policy!r}")
    if policy == "opaque":
        return [f"v{i}" for i in range(len(classes))]
    prefer = 1 if policy == "left" else 2
    tentative = []
    for origins in classes:
        plain = {m for _, m in origins}
        tentative.append(plain.pop() if len(plain) == 1 else _qualified(origins, spec_names, prefer))
    counts: dict[str, int] = {}
    for n in tentative:
        counts[n] = counts.get(n, 0) + 1
    names = [
        _qualified(origins, spec_names, prefer) if counts[n] > 1 and "::" not in n else n
        for origins, n in zip(classes, tentative)
    ]
    seen: set[str] = set()
    final = []
    for n in names:
        while n in seen:
            n += "'"
        seen.add(n)
        final.append(n)
    return final


def _vertex_kind(y1: Specification, y2: Specification, members: list[Member]):
    kinds = {y1.kind, y2.kind}
    if "object" in kinds:
        return "object", ()
    if any(m.kind == "pure-virtual-method" for m in members):
        return "abstract-class", ()
    if "generic-class" in kinds:
        params = tuple(dict.fromkeys(y1.type_params + y2.type_params))
        return "generic-class", params
    return "class", ()


def compute_pushout(
    d: Diagram,
    span: Span,
    vertex_name: str,
    *,
    left_coproj: str | None = None,
    right_coproj: str | None = None,
    cone_name: str | None = None,
    naming: str = "left",
    vertex_kind: str | None = None,
    type_params: tuple[str, ...] | None = None,
    rename: Mapping[str, str] | None = None,
    labels: tuple[str | None, str | None] = (None, None),
) -> PushoutResult:
    """Glue the two leg targets of ``span`` along the image of its apex.

    The returned diagram extends ``d`` with the vertex, both coprojections,
    the commuting equation ``f1;g1 = f2;g2`` and the cone itself.
    ``vertex_kind``, ``type_params`` and ``rename`` (applied to member
    signatures) let the OO constructions finish the vertex off.
    """
    apex, f1, f2, y1, y2 = span_parts(d, span)
    left_coproj = left_coproj or f"in1_{vertex_name}"
    right_coproj = right_coproj or f"in2_{vertex_name}"
    cone_name = cone_name or vertex_name
    if vertex_name in d.specs:
        raise NameTaken(f"specification {vertex_name!r} already exists")
    for m in (left_coproj, right_coproj):
        if m in d.morphisms:
            raise NameTaken(f"morphism {m!r} already exists")
    if left_coproj == right_coproj:
        raise NameTaken(f"both coprojections are named {left_coproj!r}")
    if cone_name in d.cones:
        raise NameTaken(f"pushout {cone_name!r} already exists")

    prefer = 2 if naming == "right" else 1
    classes = member_classes(d, span, prefer)
    names = name_classes([c.origins for c in classes], (y1.name, y2.name), naming)
    rename = dict(rename or {})
    members = []
    for cls, n in zip(classes, names):
        t = cls.template
        sig = tuple(rename_sorts(s, rename) for s in t.signature) if rename else t.signature
        members.append(Member(n, cls.kind, sig, t.is_generic, t.indirect, t.literal))
    kind, params = _vertex_kind(y1, y2, members)
    if vertex_kind is not None:
        kind = vertex_kind
        params = type_params if type_params is not None else (params if kind == "generic-class" else ())
    elif type_params is not None:
        params = type_params
    vertex = Specification(vertex_name, kind, tuple(members), tuple(params))

    g = {1: {}, 2: {}}
    provenance = {}
    specs = {1: y1, 2: y2}
    for cls, n in zip(classes, names):
        for leg, m in cls.origins:
            g[leg][m] = (n,)
        provenance[n] = tuple(sorted((leg, specs[leg].name, m) for leg, m in cls.origins))
    g1 = Morphism(left_coproj, y1.name, vertex_name, "coprojection", g[1], label=labels[0])
    g2 = Morphism(right_coproj, y2.name, vertex_name, "coprojection", g[2], label=labels[1])
    equation = Equation(Path((f1.name, g1.name)), Path((f2.name, g2.name)))
    cone = Cone(cone_name, apex.name, f1.name, f2.name, vertex_name, g1.name, g2.name)
    out = d.with_specs(vertex).with_morphisms(g1, g2).with_equations(equation).with_cones(cone)
    return PushoutResult(cone, out, provenance, equation)


def verify_cone_commutes(d: Diagram, c: Cone) -> bool:
    f1, f2 = d.morphism(c.left), d.morphism(c.right)
    g1, g2 = d.morphism(c.left_coproj), d.morphism(c.right_coproj)
    return dict(compose_morphisms(f1, g1).mapping) == dict(compose_morphisms(f2, g2).mapping)


def comparison_map(d: Diagram, c: Cone):
    """The canonical vertex classes, their names, and where the cone's coprojections send them."""
    if not verify_cone_commutes(d, c):
        raise NonCommutingCone(f"cone {c.name} does not commute")
    span = c.base
    _, _, _, y1, y2 = span_parts(d, span)
    classes = member_classes(d, span)
    names = name_classes([c.origins for c in classes], (y1.name, y2.name))
    g = {1: d.morphism(c.left_coproj), 2: d.morphism(c.right_coproj)}
    images = []
    for cls in classes:
        leg, m = cls.origins[0]
        images.append(g[leg].mapping[m])
    return classes, names, images


def is_pushout(d: Diagram, c: Cone) -> tuple[bool, Certificate]:
    """Decide whether ``c`` is a pushout of its base span.

    The canonical comparison map from the computed pushout into ``c.vertex``
    must be a kind-preserving bijection on members.
    """
    classes, names, images = comparison_map(d, c)
    z = d.spec(c.vertex)
    for n, img in zip(names, images):
        if len(img) != 1:
            cert = Certificate("composite-image", (n,), message=f"{n} is sent to the composite {'.'.join(img)}")
            return False, cert
    hit: dict[str, str] = {}
    for n, img in zip(names, images):
        target = img[0]
        if target in hit:
            cert = Certificate(
                "over-identification",
                (hit[target], n),
                message=f"{hit[target]} and {n} are both sent to {target}; nothing in {c.apex} forces this",
            )
            return False, cert
        hit[target] = n
    for cls, n, img in zip(classes, names, images):
        if z.member(img[0]).kind != cls.kind:
            cert = Certificate(
                "kind-mismatch",
                (n, img[0]),
                message=f"{n} is a {cls.kind} but {img[0]} is a {z.member(img[0]).kind}",
            )
            return False, cert
    extra = tuple(m for m in z.member_names if m not in hit)
    if extra:
        cert = Certificate(
            "extra-member",
            extra,
            message=f"{c.vertex} has members outside both coprojections: {', '.join(extra)}",
        )
        return False, cert
    mapping = {n: img[0] for n, img in zip(names, images)}
    return True, Certificate("isomorphism", mapping=mapping, message=f"{c.vertex} is the pushout of its span")


def _origins_from_cone(d: Diagram, c: Cone) -> dict[str, tuple[int, str]]:
    origins: dict[str, tuple[int, str]] = {}
    for leg, name in ((1, c.left_coproj), (2, c.right_coproj)):
        for m, expr in d.morphism(name).mapping.items():
            if len(expr) == 1:
                origins.setdefault(expr[0], (leg, m))
    return origins


def mediating_morphism(
    d: Diagram, p: PushoutResult | Cone, other: Cone, name: str | None = None
) -> Morphism:
    """The unique ``h: Z -> Z'`` with ``g1.h = g1'`` and ``g2.h = g2'``."""
    if isinstance(p, PushoutResult):
        cone = p.cone
        lookup = Diagram(
            {**p.diagram.specs, **d.specs},
            {**p.diagram.morphisms, **d.morphisms},
        )
        origins = {v: (o[0][0], o[0][2]) for v, o in p.provenance.items()}
    else:
        cone, lookup = p, d
        origins = _origins_from_cone(d, p)
    if cone.base != other.base:
        raise BaseMismatch(f"{other.name} is over {other.base}, not {cone.base}")
    if not verify_cone_commutes(lookup, other):
        raise NonCommutingCone(f"cone {other.name} does not commute")
    g_other = {1: lookup.morphism(other.left_coproj), 2: lookup.morphism(other.right_coproj)}
    vertex = lookup.spec(cone.vertex)
    mapping = {}
    for v in vertex.member_names:
        if v not in origins:
            raise NotAPushout(f"{v} of {vertex.name} lies outside both coprojections")
        leg, m = origins[v]
        mapping[v] = g_other[leg].mapping[m]
    h = Morphism(name or f"h_{cone.vertex}_{other.vertex}", cone.vertex, other.vertex, "mediating", mapping)
    for g, gp in ((cone.left_coproj, other.left_coproj), (cone.right_coproj, other.right_coproj)):
        got = compose_morphisms(lookup.morphism(g), h).mapping
        if dict(got) != dict(lookup.morphism(gp).mapping):
            raise NotAPushout(f"no morphism out of {cone.vertex} factors {gp} through {g}")
    return h
