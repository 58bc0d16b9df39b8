"""Specifications, morphisms and finitely presented diagrams.

A specification is a named collection of members; a morphism sends every
member of its source to a member expression (a nonempty sequence of member
names) over its target.  Composition substitutes expressions step by step,
which makes the member-level view a category: identities are the
name-preserving maps and substitution is associative.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, NamedTuple

from .errors import NonComposable, NonParallelPaths, UnknownEntity

MEMBER_KINDS = (
    "method",
    "pure-virtual-method",
    "constructor",
    "destructor",
    "field",
    "type-member",
    "value",
)
SPEC_KINDS = (
    "class",
    "abstract-class",
    "generic-class",
    "builtin-type",
    "object",
    "type-parameter",
    "unit",
)
MORPHISM_KINDS = (
    "identity",
    "inheritance",
    "implementation",
    "template-parameter",
    "instantiation",
    "value",
    "coprojection",
    "mediating",
    "generic",
)
# kinds k with k.k = k; identity is handled separately because it absorbs
CLOSED_KINDS = frozenset({"inheritance", "generic"})
STRUCTORS = frozenset({"constructor", "destructor"})

DEFAULT_DEPTH = 8

MemberExpr = tuple  # nonempty tuple of member names over the target


def kind_compatible(source_kind: str, target_kind: str) -> bool:
    """Whether a member of ``source_kind`` may be sent to one of ``target_kind``.

    Kinds are preserved, except that an implementation may stand in for a
    pure virtual method.
    """
    if source_kind == target_kind:
        return True
    return source_kind == "pure-virtual-method" and target_kind == "method"


@dataclass(frozen=True)
class Member:
    name: str
    kind: str = "method"
    signature: tuple[str, ...] = ()
    is_generic: bool = False
    indirect: bool = False
    literal: str | None = None

    @property
    def is_structor(self) -> bool:
        return self.kind in STRUCTORS


@dataclass(frozen=True)
class Specification:
    name: str
    kind: str = "class"
    members: tuple[Member, ...] = ()
    type_params: tuple[str, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "type_params", tuple(self.type_params))
        object.__setattr__(self, "_index", {m.name: m for m in self.members})

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def member(self, name: str) -> Member:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownEntity(f"{self.name} has no member {name!r}") from None

    @property
    def member_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.members)


@dataclass(frozen=True)
class Morphism:
    name: str
    source: str
    target: str
    kind: str = "generic"
    mapping: Mapping[str, MemberExpr] = field(default_factory=dict)
    label: str | None = None
    # nonempty when the morphism is defined as a composite of named morphisms
    components: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "mapping", {k: tuple(v) for k, v in self.mapping.items()}
        )
        object.__setattr__(self, "components", tuple(self.components))

    def __call__(self, member: str) -> MemberExpr:
        return self.mapping[member]

    @property
    def nature(self) -> str:
        """The label when one was given, else the kind."""
        return self.label or self.kind

    def is_single_valued(self) -> bool:
        return all(len(e) == 1 for e in self.mapping.values())


@dataclass(frozen=True)
class Path:
    """Morphism names in application order; ``at`` names the object of an identity path."""

    steps: tuple[str, ...] = ()
    at: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps and self.at is None:
            raise ValueError("an empty path must name its object")

    @classmethod
    def of(cls, *steps: str) -> "Path":
        return cls(tuple(steps))

    @classmethod
    def identity(cls, spec: str) -> "Path":
        return cls((), at=spec)

    def __str__(self) -> str:
        return ";".join(self.steps) if self.steps else f"id({self.at})"


@dataclass(frozen=True)
class Equation:
    lhs: Path
    rhs: Path

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class Span:
    apex: str
    left: str
    right: str


@dataclass(frozen=True)
class Cone:
    name: str
    apex: str
    left: str
    right: str
    vertex: str
    left_coproj: str
    right_coproj: str

    @property
    def base(self) -> Span:
        return Span(self.apex, self.left, self.right)


@dataclass(frozen=True)
class Diagram:
    specs: Mapping[str, Specification] = field(default_factory=dict)
    morphisms: Mapping[str, Morphism] = field(default_factory=dict)
    equations: tuple[Equation, ...] = ()
    cones: Mapping[str, Cone] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "specs", dict(self.specs))
        object.__setattr__(self, "morphisms", dict(self.morphisms))
        object.__setattr__(self, "equations", tuple(self.equations))
        object.__setattr__(self, "cones", dict(self.cones))

    @classmethod
    def build(
        cls,
        specs: Iterable[Specification] = (),
        morphisms: Iterable[Morphism] = (),
        equations: Iterable[Equation] = (),
        cones: Iterable[Cone] = (),
    ) -> "Diagram":
        return cls(
            {s.name: s for s in specs},
            {m.name: m for m in morphisms},
            tuple(equations),
            {c.name: c for c in cones},
        )

    def spec(self, name: str) -> Specification:
        try:
            return self.specs[name]
        except KeyError:
            raise UnknownEntity(f"unknown specification {name!r}") from None

    def morphism(self, name: str) -> Morphism:
        try:
            return self.morphisms[name]
        except KeyError:
            raise UnknownEntity(f"unknown morphism {name!r}") from None

    def cone(self, name: str) -> Cone:
        try:
            return self.cones[name]
        except KeyError:
            raise UnknownEntity(f"unknown cone {name!r}") from None

    def names_in_use(self) -> set[str]:
        return set(self.specs) | set(self.morphisms) | set(self.cones)

    def with_specs(self, *specs: Specification) -> "Diagram":
        new = dict(self.specs)
        new.update((s.name, s) for s in specs)
        return replace(self, specs=new)

    def with_morphisms(self, *morphisms: Morphism) -> "Diagram":
        new = dict(self.morphisms)
        new.update((m.name, m) for m in morphisms)
        return replace(self, morphisms=new)

    def with_equations(self, *equations: Equation) -> "Diagram":
        return replace(self, equations=self.equations + tuple(equations))

    def with_cones(self, *cones: Cone) -> "Diagram":
        new = dict(self.cones)
        new.update((c.name, c) for c in cones)
        return replace(self, cones=new)

    def incoming(self, spec: str) -> list[Morphism]:
        return [m for m in self.morphisms.values() if m.target == spec]

    def outgoing(self, spec: str) -> list[Morphism]:
        return [m for m in self.morphisms.values() if m.source == spec]


# -- composition ---------------------------------------------------------


def identity_morphism(spec: Specification, name: str | None = None) -> Morphism:
    return Morphism(
        name or f"id_{spec.name}",
        spec.name,
        spec.name,
        "identity",
        {m.name: (m.name,) for m in spec.members},
    )


def _composite_kind(f: Morphism, g: Morphism) -> str:
    if f.kind == "identity":
        return g.kind
    if g.kind == "identity":
        return f.kind
    if f.kind == g.kind and f.kind in CLOSED_KINDS:
        return f.kind
    return "generic"


def compose_morphisms(f: Morphism, g: Morphism, name: str | None = None) -> Morphism:
    """Return ``g.f``: first ``f``, then ``g``."""
    if f.target != g.source:
        raise NonComposable(
            f"{f.name}: {f.source}->{f.target} cannot be followed by "
            f"{g.name}: {g.source}->{g.target}"
        )
    mapping = {}
    for member, expr in f.mapping.items():
        steps: list[str] = []
        for step in expr:
            try:
                steps.extend(g.mapping[step])
            except KeyError:
                raise UnknownEntity(f"{g.name} does not map {step!r}") from None
        mapping[member] = tuple(steps)
    components = (f.components or (f.name,)) + (g.components or (g.name,))
    return Morphism(
        name or f"{g.name}.{f.name}",
        f.source,
        g.target,
        _composite_kind(f, g),
        mapping,
        components=components,
    )


def path_endpoints(d: Diagram, path: Path) -> tuple[str, str]:
    if not path.steps:
        d.spec(path.at)
        return path.at, path.at
    morphisms = [d.morphism(s) for s in path.steps]
    for a, b in zip(morphisms, morphisms[1:]):
        if a.target != b.source:
            raise NonComposable(f"path {path}: {a.name} and {b.name} are not consecutive")
    return morphisms[0].source, morphisms[-1].target


def path_morphism(d: Diagram, path: Path) -> Morphism:
    """The composite of a path, as a single morphism."""
    path_endpoints(d, path)
    if not path.steps:
        return identity_morphism(d.spec(path.at))
    result = d.morphism(path.steps[0])
    for step in path.steps[1:]:
        result = compose_morphisms(result, d.morphism(step))
    return result


def path_mapping(d: Diagram, path: Path) -> dict[str, MemberExpr]:
    return dict(path_morphism(d, path).mapping)


# -- validation ----------------------------------------------------------


class Violation(NamedTuple):
    rule: str
    entity: str
    where: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.where}: {self.message}"


def _bad_name(name) -> bool:
    return not isinstance(name, str) or not name or any(c.isspace() for c in name)


def _check_spec(spec: Specification) -> list[Violation]:
    out = []
    where = f"spec {spec.name}"
    if _bad_name(spec.name):
        out.append(Violation("bad-name", str(spec.name), where, "invalid specification name"))
    if spec.kind not in SPEC_KINDS:
        out.append(Violation("bad-kind", spec.name, where, f"unknown kind {spec.kind!r}"))
    seen = set()
    for m in spec.members:
        if _bad_name(m.name):
            out.append(Violation("bad-name", str(m.name), where, "invalid member name"))
        if m.name in seen:
            out.append(Violation("duplicate-member", m.name, where, f"member {m.name!r} declared twice"))
        seen.add(m.name)
        if m.kind not in MEMBER_KINDS:
            out.append(Violation("bad-kind", m.name, where, f"unknown member kind {m.kind!r}"))
        if m.kind == "value" and m.literal is None:
            out.append(Violation("value-without-literal", m.name, where, "value member needs a literal"))
        if m.kind != "value" and m.literal is not None:
            out.append(Violation("literal-on-non-value", m.name, where, "only value members carry literals"))
    if spec.kind == "abstract-class" and not any(
        m.kind == "pure-virtual-method" for m in spec.members
    ):
        out.append(Violation("abstract-without-pure", spec.name, where, "abstract class has no pure virtual member"))
    if spec.kind == "unit" and spec.members:
        out.append(Violation("unit-has-members", spec.name, where, "unit specification must be empty"))
    if (spec.kind == "generic-class") != bool(spec.type_params):
        out.append(Violation("generic-params", spec.name, where, "type parameters go with generic classes only"))
    return out


def _check_morphism(d: Diagram, f: Morphism) -> list[Violation]:
    out = []
    where = f"morphism {f.name}"
    if _bad_name(f.name):
        out.append(Violation("bad-name", str(f.name), where, "invalid morphism name"))
    if f.kind not in MORPHISM_KINDS:
        out.append(Violation("bad-kind", f.name, where, f"unknown morphism kind {f.kind!r}"))
    src, tgt = d.specs.get(f.source), d.specs.get(f.target)
    for end, spec in ((f.source, src), (f.target, tgt)):
        if spec is None:
            out.append(Violation("unknown-spec", end, where, f"no specification {end!r}"))
    if src is None or tgt is None:
        return out
    for m in src.members:
        if m.name not in f.mapping:
            out.append(Violation("non-total", m.name, where, f"{m.name!r} of {src.name} is not mapped"))
    for m, expr in f.mapping.items():
        if m not in src:
            out.append(Violation("unknown-member", m, where, f"{src.name} has no member {m!r}"))
            continue
        if not expr:
            out.append(Violation("empty-expression", m, where, f"{m!r} is mapped to nothing"))
            continue
        missing = [s for s in expr if s not in tgt]
        for s in missing:
            out.append(Violation("unknown-member", s, where, f"{tgt.name} has no member {s!r}"))
        if missing:
            continue
        if len(expr) == 1:
            sk, tk = src.member(m).kind, tgt.member(expr[0]).kind
            if not kind_compatible(sk, tk):
                out.append(Violation("kind-mismatch", m, where, f"{m!r} ({sk}) sent to {expr[0]!r} ({tk})"))
        if f.kind == "identity" and expr != (m,):
            out.append(Violation("bad-identity", m, where, "identity must fix every member"))
        if f.kind == "inheritance" and expr != (m,):
            structor_to_structor = (
                len(expr) == 1
                and src.member(m).is_structor
                and tgt.member(expr[0]).kind == src.member(m).kind
            )
            if not structor_to_structor:
                out.append(Violation("not-name-preserving", m, where, f"inheritance must send {m!r} to itself"))
    if f.kind == "identity" and f.source != f.target:
        out.append(Violation("bad-identity", f.name, where, "identity must be an endomorphism"))
    if f.components:
        try:
            expected = path_morphism(d, Path(f.components))
        except Exception as exc:  # broken components are reported, not raised
            out.append(Violation("bad-composite", f.name, where, str(exc)))
        else:
            if (expected.source, expected.target) != (f.source, f.target) or dict(
                expected.mapping
            ) != dict(f.mapping):
                out.append(Violation("bad-composite", f.name, where, "mapping differs from its components"))
    return out


def _check_path(d: Diagram, path: Path, where: str) -> tuple[list[Violation], tuple | None]:
    out = []
    if not path.steps:
        if path.at not in d.specs:
            out.append(Violation("unknown-spec", str(path.at), where, f"no specification {path.at!r}"))
            return out, None
        return out, (path.at, path.at)
    for s in path.steps:
        if s not in d.morphisms:
            out.append(Violation("unknown-morphism", s, where, f"no morphism {s!r}"))
    if out:
        return out, None
    ms = [d.morphisms[s] for s in path.steps]
    for a, b in zip(ms, ms[1:]):
        if a.target != b.source:
            out.append(Violation("non-consecutive-path", f"{a.name};{b.name}", where, f"{a.name} ends at {a.target}, {b.name} starts at {b.source}"))
    if out:
        return out, None
    return out, (ms[0].source, ms[-1].target)


def _check_cone(d: Diagram, c: Cone) -> list[Violation]:
    out = []
    where = f"pushout {c.name}"
    for spec in (c.apex, c.vertex):
        if spec not in d.specs:
            out.append(Violation("unknown-spec", spec, where, f"no specification {spec!r}"))
    for m in (c.left, c.right, c.left_coproj, c.right_coproj):
        if m not in d.morphisms:
            out.append(Violation("unknown-morphism", m, where, f"no morphism {m!r}"))
    if out:
        return out
    f1, f2 = d.morphisms[c.left], d.morphisms[c.right]
    g1, g2 = d.morphisms[c.left_coproj], d.morphisms[c.right_coproj]
    if f1.source != c.apex or f2.source != c.apex:
        out.append(Violation("bad-cone", c.name, where, "span legs must start at the apex"))
    if (g1.source, g1.target) != (f1.target, c.vertex) or (g2.source, g2.target) != (
        f2.target,
        c.vertex,
    ):
        out.append(Violation("bad-cone", c.name, where, "coprojections must run from the leg targets to the vertex"))
    return out


def validate_diagram(d: Diagram) -> list[Violation]:
    """Every broken invariant of ``d``; empty iff the diagram is well formed."""
    out: list[Violation] = []
    for name, spec in d.specs.items():
        if name != spec.name:
            out.append(Violation("bad-name", name, f"spec {name}", "key differs from specification name"))
        out.extend(_check_spec(spec))
    for name, f in d.morphisms.items():
        if name != f.name:
            out.append(Violation("bad-name", name, f"morphism {name}", "key differs from morphism name"))
        out.extend(_check_morphism(d, f))
    for i, eq in enumerate(d.equations):
        where = f"equation {i + 1} ({eq})"
        lv, lends = _check_path(d, eq.lhs, where)
        rv, rends = _check_path(d, eq.rhs, where)
        out.extend(lv + rv)
        if lends and rends and lends != rends:
            out.append(Violation("non-parallel-equation", str(eq), where, f"{lends[0]}->{lends[1]} vs {rends[0]}->{rends[1]}"))
    for c in d.cones.values():
        out.extend(_check_cone(d, c))
    return out


# -- path equality ---------------------------------------------------------


class PathVerdict(NamedTuple):
    answer: str  # "equal" | "unequal" | "unknown"
    witness: str | None = None


def _normal_word(d: Diagram, path: Path) -> tuple[str, ...]:
    """Flatten composite definitions and drop identities (unit and associativity laws)."""
    word: list[str] = []

    def push(name: str):
        f = d.morphism(name)
        if f.components:
            for c in f.components:
                push(c)
        elif f.kind != "identity":
            word.append(name)

    for s in path.steps:
        push(s)
    return tuple(word)


def _object_at(d: Diagram, word: tuple[str, ...], i: int, start: str) -> str:
    return start if i == 0 else d.morphisms[word[i - 1]].target


def paths_equal(
    d: Diagram, p: Path, q: Path, depth: int = DEFAULT_DEPTH, max_states: int = 50_000
) -> PathVerdict:
    """Three-valued equality of two parallel paths.

    ``unequal`` comes with the first source member on which the induced
    mappings differ.  ``equal`` is established by rewriting ``p`` with the
    declared equations (in both directions, anywhere inside the word) in at
    most ``depth`` steps.  Anything else is ``unknown``.
    """
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    ends_p, ends_q = path_endpoints(d, p), path_endpoints(d, q)
    if ends_p != ends_q:
        raise NonParallelPaths(f"{p} is {ends_p[0]}->{ends_p[1]}, {q} is {ends_q[0]}->{ends_q[1]}")
    mp, mq = path_mapping(d, p), path_mapping(d, q)
    for m in d.spec(ends_p[0]).member_names:
        if mp.get(m) != mq.get(m):
            return PathVerdict("unequal", m)

    start, goal = _normal_word(d, p), _normal_word(d, q)
    if start == goal:
        return PathVerdict("equal")
    rules = []
    for eq in d.equations:
        lhs, rhs = _normal_word(d, eq.lhs), _normal_word(d, eq.rhs)
        src = path_endpoints(d, eq.lhs)[0]
        rules.append((lhs, rhs, src))
        rules.append((rhs, lhs, src))

    origin = ends_p[0]
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        word, dist = frontier.popleft()
        if dist >= depth:
            continue
        for lhs, rhs, src in rules:
            n = len(lhs)
            for i in range(len(word) - n + 1):
                if word[i : i + n] != lhs:
                    continue
                if n == 0 and _object_at(d, word, i, origin) != src:
                    continue
                new = word[:i] + rhs + word[i + n :]
                if new == goal:
                    return PathVerdict("equal")
                if new not in seen:
                    if len(seen) >= max_states:
                        return PathVerdict("unknown")
                    seen.add(new)
                    frontier.append((new, dist + 1))
    return PathVerdict("unknown")
