"""Code skeletons and Graphviz renderings of diagrams.

Two skeleton dialects are produced: ``curly`` (C++ flavoured) and
``interface`` (Java flavoured).  Objects are not given units of their own
text file; they become statements of one ``main`` block.
"""
from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from typing import Iterable

from .constructs import INSTANTIATION
from .core import Cone, Diagram, Member, Morphism, Specification, validate_diagram
from .errors import InvalidDiagram, UnsupportedConstruct
from .pushout import PushoutResult, is_pushout

DIALECTS = ("curly", "interface")
TODO = "{ /* TODO */ }"


@dataclass(frozen=True)
class SkeletonUnit:
    spec_name: str
    dialect: str
    text: str
    is_object: bool = False
    unsupported: tuple[str, ...] = ()


# -- ordering ------------------------------------------------------------------


def emission_order(d: Diagram) -> list[str]:
    """Specifications in dependency order (sources before targets), ties alphabetical."""
    succ: dict[str, set[str]] = {n: set() for n in d.specs}
    for f in d.morphisms.values():
        if f.source != f.target and f.source in succ and f.target in succ:
            succ[f.source].add(f.target)
    indeg = {n: 0 for n in d.specs}
    for n, targets in succ.items():
        for t in targets:
            indeg[t] += 1
    heap = [n for n, k in indeg.items() if k == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for t in sorted(succ[n]):
            indeg[t] -= 1
            if indeg[t] == 0:
                heapq.heappush(heap, t)
    # whatever sits on a cycle follows, alphabetically
    order += sorted(set(d.specs) - set(order))
    return order


# -- shared analysis ---------------------------------------------------------------


def _square_declared(d: Diagram, c: Cone) -> bool:
    square = {(c.left, c.left_coproj), (c.right, c.right_coproj)}
    return any({e.lhs.steps, e.rhs.steps} == square for e in d.equations)


def virtual_arrows(d: Diagram) -> set[str]:
    """Inheritance arrows belonging to the declared square of a virtual-inheritance pushout."""
    out: set[str] = set()
    for c in d.cones.values():
        arrows = (c.left, c.right, c.left_coproj, c.right_coproj)
        if not all(a in d.morphisms for a in arrows):
            continue
        if d.morphisms[c.left].kind != "inheritance" or d.morphisms[c.right].kind != "inheritance":
            continue
        if not _square_declared(d, c) or not is_pushout(d, c)[0]:
            continue
        out.update(a for a in arrows if d.morphisms[a].kind == "inheritance")
    return out


def _bases(d: Diagram, spec: Specification) -> list[Morphism]:
    bases = []
    for f in d.incoming(spec.name):
        if f.components or f.source == f.target:
            continue
        src = d.specs[f.source]
        if f.kind == "inheritance" and src.kind not in ("type-parameter", "unit", "object"):
            bases.append(f)
        elif f.kind == "implementation" and src.kind == "abstract-class":
            bases.append(f)
    return sorted(bases, key=lambda f: (f.source, f.name))


def own_members(d: Diagram, spec: Specification, bases: Iterable[Morphism]) -> list[Member]:
    """Members the class has to declare itself.

    Inherited members are dropped unless they are constructors or
    destructors (never inherited) or implement a pure virtual member.
    """
    inherited: set[str] = set()
    for f in bases:
        src = d.specs[f.source]
        for m in src.members:
            if m.kind != "pure-virtual-method" and not m.is_structor:
                inherited.update(f.mapping.get(m.name, ())[-1:])
    return [m for m in spec.members if m.is_structor or m.name not in inherited]


def _ident(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", name) or "_"


def _member_names(spec: Specification) -> dict[str, str]:
    """Emitted identifier per member: qualified names lose their qualifier when that is unambiguous."""
    short = {m.name: m.name.rsplit("::", 1)[-1] for m in spec.members}
    counts: dict[str, int] = {}
    for s in short.values():
        counts[s] = counts.get(s, 0) + 1
    return {n: _ident(s if counts[s] == 1 else n) for n, s in short.items()}


def _type_name(name: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*(<[A-Za-z0-9_,<>*&:]*>)?", name):
        return name
    return _ident(name)


def _class_name(name: str) -> str:
    return _type_name(name).split("<", 1)[0]


def _is_literal_object(spec: Specification) -> bool:
    return spec.kind == "object" and all(m.kind == "value" for m in spec.members)


def _literals(spec: Specification) -> list[str]:
    return [m.literal or "" for m in spec.members if m.kind == "value"]


def object_construction(d: Diagram, name: str) -> tuple[str | None, list[str]]:
    """Class and constructor arguments of the object ``name``.

    An object that is the vertex of a cone is built from the class on the
    side of its instantiation coprojection, with the other side as argument:
    a pure literal object contributes its literals, any other object is
    passed by address.
    """
    spec = d.spec(name)
    cones = sorted((c for c in d.cones.values() if c.vertex == name), key=lambda c: c.name)
    for c in cones:
        g1, g2 = d.morphisms.get(c.left_coproj), d.morphisms.get(c.right_coproj)
        if g1 is None or g2 is None:
            continue
        if g2.label == INSTANTIATION and g1.label != INSTANTIATION:
            g1, g2 = g2, g1
        elif g1.label != INSTANTIATION and d.specs[g1.source].kind == "object":
            g1, g2 = g2, g1
        arg = d.specs[g2.source]
        if _is_literal_object(arg):
            args = _literals(arg)
        elif arg.kind == "object":
            args = [f"&{arg.name}"]
        else:
            args = []
        return g1.source, args
    if _is_literal_object(spec):
        return None, _literals(spec)
    for f in sorted(d.incoming(name), key=lambda f: f.name):
        if f.kind == "instantiation" and d.specs[f.source].kind not in ("object", "unit"):
            return f.source, []
    return None, []


def object_statement(d: Diagram, name: str, dialect: str = "curly") -> str:
    cls, args = object_construction(d, name)
    ident = _ident(name)
    if cls is None:
        if not args:
            return f"// object {name}"
        if dialect == "curly":
            return f"{', '.join(args)};"
        sort = next((m.signature[0] for m in d.spec(name).members if m.signature), "Object")
        return f"{_type_name(sort)} {ident} = {args[0]};" if len(args) == 1 else f"Object[] {ident} = {{{', '.join(args)}}};"
    cls_t = _type_name(cls)
    if dialect == "curly":
        return f"{cls_t} {ident}({', '.join(args)});" if args else f"{cls_t} {ident};"
    java_args = ", ".join(a[1:] if a.startswith("&") else a for a in args)
    return f"{cls_t} {ident} = new {cls_t}({java_args});"


# -- curly dialect ---------------------------------------------------------------


def _params(sig, sep=", ") -> str:
    return sep.join(f"{_type_name(s)} a{i}" for i, s in enumerate(sig))


def _curly_member(m: Member, ident: str, cls: str) -> str:
    generic = "template <typename V> " if m.is_generic else ""
    if m.kind == "pure-virtual-method":
        return f"{generic}virtual void {ident}({_params(m.signature)}) = 0;"
    if m.kind == "method":
        return f"{generic}void {ident}({_params(m.signature)}) {TODO}"
    if m.kind == "constructor":
        return f"{generic}{cls}({_params(m.signature)}) {TODO}"
    if m.kind == "destructor":
        return f"~{cls}() {TODO}"
    sort = _type_name(m.signature[0]) if m.signature else "auto"
    if m.kind == "field":
        return f"{sort}{'*' if m.indirect else ''} {ident};"
    if m.kind == "value":
        return f"static constexpr {sort} {ident} = {m.literal};"
    return f"typedef {sort} {ident};" if m.signature else f"struct {ident};"


def _curly_class(d: Diagram, spec: Specification, virtual: set[str]) -> str:
    name = _type_name(spec.name)
    if "<" in name and d.specs.get(name.split("<", 1)[0], spec).kind == "generic-class":
        return f"// {spec.name}: template parameter passing\ntemplate struct {name};\n"
    bases = _bases(d, spec)
    heads = [f"public {'virtual ' if f.name in virtual else ''}{_type_name(f.source)}" for f in bases]
    head = "template <" + ", ".join(f"typename {p}" for p in spec.type_params) + "> " if spec.kind == "generic-class" else ""
    head += f"struct {name}"
    if heads:
        head += " : " + ", ".join(heads)
    members = own_members(d, spec, bases)
    if not members:
        return f"{head} {{ }};\n"
    idents = _member_names(spec)
    cls = _class_name(spec.name)
    body = "".join(f"    {_curly_member(m, idents[m.name], cls)}\n" for m in members)
    return f"{head} {{\n{body}}};\n"


def _curly_unit(d: Diagram, spec: Specification, virtual: set[str]) -> SkeletonUnit:
    if spec.kind == "object":
        return SkeletonUnit(spec.name, "curly", object_statement(d, spec.name, "curly") + "\n", True)
    if spec.kind == "builtin-type":
        text = f"// builtin type {spec.name}\n"
    elif spec.kind == "unit":
        text = f"// unit {spec.name}\n"
    elif spec.kind == "type-parameter":
        needs = ", ".join(f"{m.name}({', '.join(m.signature)})" for m in spec.members) or "nothing"
        text = f"// typename {spec.name}: requires {needs}\n"
    else:
        text = _curly_class(d, spec, virtual)
    return SkeletonUnit(spec.name, "curly", text)


# -- interface dialect -------------------------------------------------------------


def _java_member(m: Member, ident: str, cls: str, in_interface: bool) -> str:
    generic = "<V> " if m.is_generic else ""
    if m.kind in ("method", "pure-virtual-method"):
        if in_interface:
            return f"{generic}void {ident}({_params(m.signature)});"
        if m.kind == "pure-virtual-method":
            return f"public abstract {generic}void {ident}({_params(m.signature)});"
        return f"public {generic}void {ident}({_params(m.signature)}) {TODO}"
    if m.kind == "constructor":
        return f"{cls}({_params(m.signature)}) {TODO}"
    if m.kind == "destructor":
        return f"// no destructor in this dialect: {m.name}"
    sort = _type_name(m.signature[0]) if m.signature else "Object"
    if m.kind == "field":
        return f"{sort} {ident};"
    if m.kind == "value":
        return f"static final {sort} {ident} = {m.literal};"
    return f"// type {ident}"


def _interface_unit(d: Diagram, spec: Specification, strict: bool) -> SkeletonUnit:
    name = spec.name
    if spec.kind == "object":
        return SkeletonUnit(name, "interface", object_statement(d, name, "interface") + "\n", True)
    if spec.kind in ("builtin-type", "unit", "type-parameter"):
        label = {"builtin-type": "builtin type", "unit": "unit", "type-parameter": "type parameter"}[spec.kind]
        return SkeletonUnit(name, "interface", f"// {label} {name}\n")
    if spec.kind == "generic-class" or ("<" in name and d.specs.get(name.split("<", 1)[0], spec).kind == "generic-class"):
        problem = f"{name}: generic class; this dialect cannot template it"
        if strict:
            raise UnsupportedConstruct(problem)
        params = ", ".join(spec.type_params)
        what = f"generic class {name}<{params}>" if params else f"template instance {name}"
        text = f"// unsupported: {what}; this dialect cannot template it, write one class per parameter\n"
        return SkeletonUnit(name, "interface", text, unsupported=(problem,))

    bases = _bases(d, spec)
    classes = [f.source for f in bases if d.specs[f.source].kind != "abstract-class"]
    interfaces = sorted({f.source for f in bases if d.specs[f.source].kind == "abstract-class"})
    notes: list[str] = []
    lines: list[str] = []
    if len(classes) > 1:
        problem = f"{name}: multiple class inheritance from {', '.join(classes)}"
        if strict:
            raise UnsupportedConstruct(problem)
        notes.append(problem)
        lines.append(f"// unsupported: multiple class inheritance; only {classes[0]} is extended, not {', '.join(classes[1:])}")
    ident = _ident(name)
    if spec.kind == "abstract-class":
        head = f"public interface {ident}"
        if interfaces:
            head += " extends " + ", ".join(_ident(i) for i in interfaces)
    else:
        head = f"public class {ident}"
        if classes:
            head += f" extends {_ident(classes[0])}"
        if interfaces:
            head += " implements " + ", ".join(_ident(i) for i in interfaces)
    idents = _member_names(spec)
    members = own_members(d, spec, bases)
    body = "".join(
        f"    {_java_member(m, idents[m.name], ident, spec.kind == 'abstract-class')}\n" for m in members
    )
    lines.append(f"{head} {{\n{body}}}" if body else f"{head} {{ }}")
    return SkeletonUnit(name, "interface", "\n".join(lines) + "\n", unsupported=tuple(notes))


# -- entry points ----------------------------------------------------------------


def _require_valid(d: Diagram) -> None:
    violations = validate_diagram(d)
    if violations:
        raise InvalidDiagram(violations)


def emit_skeleton(d: Diagram, dialect: str = "curly", *, strict: bool = False) -> list[SkeletonUnit]:
    """One unit per specification, in dependency order.

    With ``strict`` a construct the dialect cannot express raises
    :class:`UnsupportedConstruct`; otherwise it is kept as a marked comment.
    """
    if dialect not in DIALECTS:
        raise ValueError(f"unknown dialect {dialect!r}; choose from {', '.join(DIALECTS)}")
    _require_valid(d)
    virtual = virtual_arrows(d) if dialect == "curly" else set()
    units = []
    for name in emission_order(d):
        spec = d.specs[name]
        if dialect == "curly":
            units.append(_curly_unit(d, spec, virtual))
        else:
            units.append(_interface_unit(d, spec, strict))
    return units


def main_block(units: list[SkeletonUnit], dialect: str) -> str:
    """Object statements of ``units`` gathered into one entry point."""
    stmts = [u.text for u in units if u.is_object]
    if not stmts:
        return ""
    body = "".join(f"        {s}" if dialect == "interface" else f"    {s}" for s in stmts)
    if dialect == "curly":
        return f"int main() {{\n{body}    return 0;\n}}\n"
    return f"public class Main {{\n    public static void main(String[] args) {{\n{body}    }}\n}}\n"


def render_skeleton(units: list[SkeletonUnit], dialect: str) -> str:
    """All class units followed by the main block, as one text."""
    parts = [u.text for u in units if not u.is_object]
    main = main_block(units, dialect)
    if main:
        parts.append(main)
    return "\n".join(parts)


# -- DOT -------------------------------------------------------------------------

SHAPES = {
    "class": "box",
    "abstract-class": "hexagon",
    "generic-class": "box3d",
    "builtin-type": "oval",
    "object": "note",
    "type-parameter": "diamond",
    "unit": "point",
}


def dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _marked_coprojections(d: Diagram, marked) -> set[str]:
    if marked is None:
        cones = list(d.cones.values())
    else:
        cones = []
        for p in marked:
            if isinstance(p, PushoutResult):
                cones.append(p.cone)
            elif isinstance(p, Cone):
                cones.append(p)
            else:
                cones.append(d.cone(p))
    return {g for c in cones for g in (c.left_coproj, c.right_coproj)}


def emit_dot(d: Diagram, marked_pushouts=None, name: str = "dml") -> str:
    """Graphviz text: a node per specification, an edge per morphism.

    Coprojections of the marked pushouts (all declared cones by default) are
    dashed, composites dotted, everything else solid.
    """
    _require_valid(d)
    dashed = _marked_coprojections(d, marked_pushouts)
    lines = [f"digraph {dot_id(name)} {{", "  rankdir=LR;", "  node [fontname=\"Helvetica\"];"]
    for n in sorted(d.specs):
        spec = d.specs[n]
        label = object_statement(d, n) if spec.kind == "object" else n
        if label.startswith("//"):
            label = n
        lines.append(f"  {dot_id(n)} [label={dot_id(label)}, shape={SHAPES[spec.kind]}];")
    for n in sorted(d.morphisms):
        f = d.morphisms[n]
        text = f.kind if f.label is None else f"{f.kind}: {f.label}"
        style = "dashed" if n in dashed else "dotted" if f.components else "solid"
        lines.append(f"  {dot_id(f.source)} -> {dot_id(f.target)} [label={dot_id(text)}, style={style}, id={dot_id(n)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "DIALECTS",
    "SHAPES",
    "SkeletonUnit",
    "emission_order",
    "emit_dot",
    "emit_skeleton",
    "main_block",
    "object_construction",
    "object_statement",
    "own_members",
    "render_skeleton",
    "virtual_arrows",
]
