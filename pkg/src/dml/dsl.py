"""Text format for diagrams (``.dml``).

::

    spec X class { method m0() }
    generic T X { method f(X)  method g() }
    morphism f1 : X -> Y1 kind=inheritance { m0 -> m0 }
    morphism c = f1;g1
    equation f1;g1 = f2;g2
    pushout diamond: Z from span(X, f1, f2) via g1, g2

Mappings omitted from a morphism block default to the like-named member of
the target (a constructor or destructor defaults to the target's only one).
A ``pushout`` whose vertex is not declared is computed when the file is
loaded; one whose vertex is declared is recorded as a cone to be checked.
Names that are not plain identifiers (optionally with template arguments,
``Envelope<Zp>`` or ``Envelope⟨Zp⟩``) are written as double-quoted strings.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .constructs import elaborate_pushout
from .core import (
    Cone,
    Diagram,
    Equation,
    Member,
    Morphism,
    Path,
    Span,
    Specification,
    Violation,
    path_morphism,
    validate_diagram,
)
from .errors import DMLError, InvalidDiagram, ParseError, ValidationError

HEADER = "# DML diagram (canonical form)\n"

SPEC_KIND_WORDS = {
    "class": "class",
    "abstract": "abstract-class",
    "builtin": "builtin-type",
    "object": "object",
    "typename": "type-parameter",
    "unit": "unit",
}
KIND_WORD_OF = {v: k for k, v in SPEC_KIND_WORDS.items()}
DECL_WORDS = ("spec", "generic", "morphism", "equation", "pushout")
MEMBER_WORDS = ("method", "ctor", "dtor", "field", "value", "type")
MODIFIERS = ("pure", "generic", "indirect")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class Token:
    type: str  # NAME, STRING, NUMBER, PUNCT, EOF
    value: str
    span: SourceSpan
    raw: str = ""


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*")
_NUMBER = re.compile(r"-?\d+(?:\.\d+)?")
_TEMPLATE_CHARS = re.compile(r"[A-Za-z0-9_,\s<>⟨⟩*&:]")


def _template_suffix(text: str, i: int) -> int:
    """End index of a balanced ``<...>`` suffix starting at ``i``, or ``i`` if there is none."""
    if i >= len(text) or text[i] not in "<⟨":
        return i
    depth = 0
    j = i
    while j < len(text):
        c = text[j]
        if c in "<⟨":
            depth += 1
        elif c in ">⟩":
            depth -= 1
            if depth == 0:
                return j + 1
        elif c == "\n" or not _TEMPLATE_CHARS.match(c):
            return i
        j += 1
    return i


def _normalize_template(name: str) -> str:
    return re.sub(r"\s+", "", name.replace("⟨", "<").replace("⟩", ">"))


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    n = len(text)

    def advance(k: int):
        nonlocal i, line, col
        for c in text[i : i + k]:
            if c == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        c = text[i]
        if c in " \t\r\n\ufeff":
            advance(1)
            continue
        if c == "#":
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
            continue
        start = SourceSpan(line, col)
        if c == '"':
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    break
                if text[j] == "\\" and j + 1 < n:
                    out.append({"n": "\n", "t": "\t"}.get(text[j + 1], text[j + 1]))
                    j += 2
                else:
                    out.append(text[j])
                    j += 1
            if j >= n or text[j] != '"':
                raise ParseError("unterminated string", SourceSpan(start.line, start.column, j - i), ['"'])
            raw = text[i : j + 1]
            tokens.append(Token("STRING", "".join(out), SourceSpan(line, col, j + 1 - i), raw))
            advance(j + 1 - i)
            continue
        m = _IDENT.match(text, i)
        if m:
            end = _template_suffix(text, m.end())
            raw = text[i:end]
            tokens.append(Token("NAME", _normalize_template(raw), SourceSpan(line, col, end - i), raw))
            advance(end - i)
            continue
        if text.startswith("->", i):
            tokens.append(Token("PUNCT", "->", SourceSpan(line, col, 2), "->"))
            advance(2)
            continue
        m = _NUMBER.match(text, i)
        if m:
            tokens.append(Token("NUMBER", m.group(0), SourceSpan(line, col, m.end() - i), m.group(0)))
            advance(m.end() - i)
            continue
        if c in "{}(),;:=.&":
            tokens.append(Token("PUNCT", c, SourceSpan(line, col, 1), c))
            advance(1)
            continue
        raise ParseError(f"unexpected character {c!r}", SourceSpan(line, col, 1))
    tokens.append(Token("EOF", "", SourceSpan(line, col, 0)))
    return tokens


# -- parser ------------------------------------------------------------------


@dataclass
class _MorphismDecl:
    name: str
    source: str | None = None
    target: str | None = None
    kind: str | None = None
    label: str | None = None
    entries: dict = field(default_factory=dict)
    steps: tuple = ()


@dataclass
class _PushoutDecl:
    name: str
    vertex: str
    apex: str
    left: str
    right: str
    via: tuple | None = None


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.specs: list[tuple[Specification, Token]] = []
        self.morphisms: list[tuple[_MorphismDecl, Token]] = []
        self.equations: list[Equation] = []
        self.pushouts: list[tuple[_PushoutDecl, Token]] = []

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def _peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def _error(self, message: str, expected=()) -> ParseError:
        t = self.tok
        if t.type == "EOF":
            message = f"unexpected end of input: {message}"
        return ParseError(message, t.span, expected)

    def _next(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def _at(self, value: str, type_: str = "PUNCT") -> bool:
        return self.tok.type == type_ and self.tok.value == value

    def _at_word(self, *words: str) -> bool:
        return self.tok.type == "NAME" and self.tok.value in words

    def _expect(self, value: str) -> Token:
        if not self._at(value):
            raise self._error(f"expected {value!r}, found {self.tok.raw or self.tok.type!r}", [repr(value)])
        return self._next()

    def _expect_word(self, word: str) -> Token:
        if not self._at_word(word):
            raise self._error(f"expected {word!r}, found {self.tok.raw or self.tok.type!r}", [word])
        return self._next()

    def _name(self, what: str = "a name") -> str:
        if self.tok.type in ("NAME", "STRING"):
            return self._next().value
        raise self._error(f"expected {what}, found {self.tok.raw or self.tok.type!r}", [what])

    # grammar
    def parse(self):
        while self.tok.type != "EOF":
            if self._at_word("spec"):
                self._spec()
            elif self._at_word("generic"):
                self._generic()
            elif self._at_word("morphism"):
                self._morphism()
            elif self._at_word("equation"):
                self._equation()
            elif self._at_word("pushout"):
                self._pushout()
            else:
                raise self._error(f"unexpected {self.tok.raw or self.tok.type!r}", list(DECL_WORDS))
        return self

    def _spec(self):
        start = self._next()
        name = self._name("a specification name")
        if not self._at_word(*SPEC_KIND_WORDS):
            raise self._error(f"unknown specification kind {self.tok.raw or self.tok.type!r}", list(SPEC_KIND_WORDS))
        kind = SPEC_KIND_WORDS[self._next().value]
        members = self._members(name)
        self.specs.append((Specification(name, kind, members), start))

    def _generic(self):
        start = self._next()
        name = self._name("a generic class name")
        params = []
        while not self._at("{"):
            params.append(self._name("a type parameter or '{'"))
        if not params:
            raise self._error("a generic class needs at least one type parameter", ["a type parameter"])
        members = self._members(name)
        self.specs.append((Specification(name, "generic-class", members, tuple(params)), start))

    def _members(self, owner: str) -> tuple[Member, ...]:
        self._expect("{")
        members = []
        while not self._at("}"):
            members.append(self._member(owner))
            while self._at(";"):
                self._next()
        self._next()
        return tuple(members)

    def _sorts_in_parens(self) -> tuple[str, ...]:
        self._expect("(")
        sorts = []
        if not self._at(")"):
            sorts.append(self._name("a sort"))
            while self._at(","):
                self._next()
                sorts.append(self._name("a sort"))
        self._expect(")")
        return tuple(sorts)

    def _sorts_after_colon(self) -> tuple[str, ...]:
        if not self._at(":"):
            return ()
        self._next()
        sorts = [self._name("a sort")]
        while self._at(","):
            self._next()
            sorts.append(self._name("a sort"))
        return tuple(sorts)

    def _literal(self) -> str:
        t = self.tok
        if t.type == "NUMBER":
            return self._next().value
        if t.type == "STRING":
            return self._next().raw
        if self._at("&"):
            self._next()
            return "&" + self._name("a name after '&'")
        if t.type == "NAME":
            return self._next().value
        raise self._error("expected a literal", ["a number", "a string", "&name"])

    def _member(self, owner: str) -> Member:
        mods = set()
        while self._at_word(*MODIFIERS) and not self._at_word(*MEMBER_WORDS):
            word = self._next().value
            mods.add(word)
        if not self._at_word(*MEMBER_WORDS):
            raise self._error(f"expected a member, found {self.tok.raw or self.tok.type!r}", list(MEMBER_WORDS) + list(MODIFIERS))
        word = self._next().value
        generic, indirect = "generic" in mods, "indirect" in mods
        if "pure" in mods and word != "method":
            raise self._error("only methods can be pure", ["method"])
        if word == "method":
            name = self._name("a method name")
            kind = "pure-virtual-method" if "pure" in mods else "method"
            return Member(name, kind, self._sorts_in_parens(), generic, indirect)
        if word in ("ctor", "dtor"):
            default = owner if word == "ctor" else f"~{owner}"
            name = self._name() if self.tok.type in ("NAME", "STRING") else default
            kind = "constructor" if word == "ctor" else "destructor"
            return Member(name, kind, self._sorts_in_parens(), generic, indirect)
        name = self._name(f"a {word} name")
        sorts = self._sorts_after_colon()
        if word == "value":
            self._expect("=")
            return Member(name, "value", sorts, generic, indirect, self._literal())
        kind = "field" if word == "field" else "type-member"
        return Member(name, kind, sorts, generic, indirect)

    def _attrs(self, decl: _MorphismDecl):
        while self._at_word("kind", "label") and self._peek().type == "PUNCT" and self._peek().value == "=":
            key = self._next().value
            self._next()
            if key == "kind":
                decl.kind = self._name("a morphism kind")
            else:
                if self.tok.type != "STRING":
                    raise self._error("expected a quoted label", ["a string"])
                decl.label = self._next().value

    def _morphism(self):
        start = self._next()
        decl = _MorphismDecl(self._name("a morphism name"))
        if self._at("="):
            self._next()
            path = self._path()
            if not path.steps:
                raise self._error("a composite needs at least one morphism", ["a morphism name"])
            decl.steps = path.steps
            self._attrs(decl)
        else:
            self._expect(":")
            decl.source = self._name("a source specification")
            self._expect("->")
            decl.target = self._name("a target specification")
            self._attrs(decl)
            if self._at("{"):
                self._next()
                while not self._at("}"):
                    key_tok = self.tok
                    member = self._name("a source member")
                    self._expect("->")
                    steps = [self._name("a target member")]
                    while self._at("."):
                        self._next()
                        steps.append(self._name("a target member"))
                    if member in decl.entries:
                        raise ParseError(f"{member!r} mapped twice", key_tok.span, [])
                    decl.entries[member] = tuple(steps)
                    while self._at(";"):
                        self._next()
                self._next()
        self.morphisms.append((decl, start))

    def _path(self) -> Path:
        if self._at_word("id") and self._peek().type == "PUNCT" and self._peek().value == "(":
            self._next()
            self._next()
            at = self._name("a specification")
            self._expect(")")
            return Path.identity(at)
        steps = [self._name("a morphism name")]
        while self._at(";"):
            self._next()
            steps.append(self._name("a morphism name"))
        return Path(tuple(steps))

    def _equation(self):
        self._next()
        lhs = self._path()
        self._expect("=")
        self.equations.append(Equation(lhs, self._path()))

    def _pushout(self):
        start = self._next()
        first = self._name("a pushout or vertex name")
        if self._at(":"):
            self._next()
            name, vertex = first, self._name("a vertex name")
        else:
            name = vertex = first
        self._expect_word("from")
        self._expect_word("span")
        self._expect("(")
        apex = self._name("the apex")
        self._expect(",")
        left = self._name("the left leg")
        self._expect(",")
        right = self._name("the right leg")
        self._expect(")")
        via = None
        if self._at_word("via"):
            self._next()
            g1 = self._name("the left coprojection")
            self._expect(",")
            via = (g1, self._name("the right coprojection"))
        self.pushouts.append((_PushoutDecl(name, vertex, apex, left, right, via), start))


# -- elaboration ---------------------------------------------------------------


def default_image(member: Member, target: Specification) -> tuple[str, ...] | None:
    if member.name in target:
        return (member.name,)
    if member.is_structor:
        same = [m.name for m in target.members if m.kind == member.kind]
        if len(same) == 1:
            return (same[0],)
    return None


def _explicit(decl: _MorphismDecl, d: Diagram) -> Morphism:
    src, tgt = d.specs[decl.source], d.specs[decl.target]
    mapping = {}
    for m in src.members:
        if m.name in decl.entries:
            mapping[m.name] = decl.entries[m.name]
        else:
            image = default_image(m, tgt)
            if image is not None:
                mapping[m.name] = image
    for k, v in decl.entries.items():
        mapping.setdefault(k, v)
    return Morphism(decl.name, decl.source, decl.target, decl.kind or "generic", mapping, decl.label)


def _elaborate(p: _Parser) -> Diagram:
    violations: list[Violation] = []
    specs: dict[str, Specification] = {}
    for spec, _ in p.specs:
        if spec.name in specs:
            violations.append(Violation("duplicate-spec", spec.name, f"spec {spec.name}", "declared twice"))
        specs[spec.name] = spec
    declared_vertices = set(specs)
    seen: set[str] = set()
    for decl, _ in p.morphisms:
        if decl.name in seen:
            violations.append(Violation("duplicate-morphism", decl.name, f"morphism {decl.name}", "declared twice"))
        seen.add(decl.name)
    seen = set()
    for decl, _ in p.pushouts:
        if decl.name in seen:
            violations.append(Violation("duplicate-pushout", decl.name, f"pushout {decl.name}", "declared twice"))
        seen.add(decl.name)
    if violations:
        raise ValidationError(violations)

    d = Diagram(specs)
    morphisms = [decl for decl, _ in p.morphisms]
    pushouts = [decl for decl, _ in p.pushouts]
    progress = True
    while progress and (morphisms or pushouts):
        progress = False
        waiting = []
        for decl in morphisms:
            if decl.steps:
                if not all(s in d.morphisms for s in decl.steps):
                    waiting.append(decl)
                    continue
                try:
                    composite = path_morphism(d, Path(decl.steps))
                except DMLError as exc:
                    raise ValidationError([Violation("bad-composite", decl.name, f"morphism {decl.name}", str(exc))]) from None
                d = d.with_morphisms(
                    Morphism(
                        decl.name,
                        composite.source,
                        composite.target,
                        decl.kind or composite.kind,
                        composite.mapping,
                        decl.label,
                        composite.components,
                    )
                )
            elif decl.source in d.specs and decl.target in d.specs:
                d = d.with_morphisms(_explicit(decl, d))
            else:
                waiting.append(decl)
                continue
            progress = True
        morphisms = waiting
        waiting = []
        for decl in pushouts:
            g1, g2 = decl.via or (f"in1_{decl.vertex}", f"in2_{decl.vertex}")
            if decl.vertex in declared_vertices:
                if g1 in d.morphisms and g2 in d.morphisms and decl.left in d.morphisms and decl.right in d.morphisms:
                    d = d.with_cones(Cone(decl.name, decl.apex, decl.left, decl.right, decl.vertex, g1, g2))
                    progress = True
                else:
                    waiting.append(decl)
                continue
            if decl.apex in d.specs and decl.left in d.morphisms and decl.right in d.morphisms:
                try:
                    d = elaborate_pushout(
                        d,
                        Span(decl.apex, decl.left, decl.right),
                        decl.vertex,
                        cone_name=decl.name,
                        left_coproj=g1,
                        right_coproj=g2,
                    ).diagram
                except DMLError as exc:
                    raise ValidationError(
                        [Violation("pushout-failed", decl.name, f"pushout {decl.name}", f"{type(exc).__name__}: {exc}")]
                    ) from None
                progress = True
            else:
                waiting.append(decl)
        pushouts = waiting

    for decl in morphisms:
        missing = [s for s in decl.steps if s not in d.morphisms] or [
            s for s in (decl.source, decl.target) if s not in d.specs
        ]
        violations.append(Violation("unresolved", decl.name, f"morphism {decl.name}", f"unknown {', '.join(missing)}"))
    for decl in pushouts:
        violations.append(Violation("unresolved", decl.name, f"pushout {decl.name}", "refers to undefined specifications or morphisms"))
    if violations:
        raise ValidationError(violations)
    d = d.with_equations(*p.equations)
    violations = validate_diagram(d)
    if violations:
        raise ValidationError(violations)
    return d


def parse(text: str) -> Diagram:
    """Parse and elaborate a ``.dml`` document into a validated diagram."""
    return _elaborate(_Parser(text).parse())


def load(path) -> Diagram:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# -- serializer ----------------------------------------------------------------


def is_bare(name: str) -> bool:
    if not name or name != name.strip():
        return False
    try:
        toks = tokenize(name)
    except ParseError:
        return False
    return len(toks) == 2 and toks[0].type == "NAME" and toks[0].raw == name == toks[0].value


def quote(name: str) -> str:
    if is_bare(name):
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def _literal_text(lit: str) -> str:
    if _NUMBER.fullmatch(lit):
        return lit
    if lit.startswith("&"):
        return "&" + quote(lit[1:])
    if lit.startswith('"'):
        try:
            toks = tokenize(lit)
        except ParseError:
            toks = []
        if len(toks) == 2 and toks[0].type == "STRING" and toks[0].raw == lit:
            return lit
    if _IDENT.fullmatch(lit):
        return lit
    return quote(lit)


def _sorts(sig) -> str:
    return ", ".join(quote(s) for s in sig)


def _member_line(m: Member, owner: str) -> str:
    mods = []
    if m.indirect:
        mods.append("indirect")
    if m.kind == "pure-virtual-method":
        mods.append("pure")
    if m.is_generic:
        mods.append("generic")
    head = " ".join(mods + [""]) if mods else ""
    if m.kind in ("method", "pure-virtual-method"):
        return f"{head}method {quote(m.name)}({_sorts(m.signature)})"
    if m.kind in ("constructor", "destructor"):
        word, default = ("ctor", owner) if m.kind == "constructor" else ("dtor", f"~{owner}")
        name = "" if m.name == default else f" {quote(m.name)}"
        return f"{head}{word}{name}({_sorts(m.signature)})"
    sig = f": {_sorts(m.signature)}" if m.signature else ""
    if m.kind == "value":
        return f"{head}value {quote(m.name)}{sig} = {_literal_text(m.literal or '')}"
    word = "field" if m.kind == "field" else "type"
    return f"{head}{word} {quote(m.name)}{sig}"


def _spec_block(s: Specification) -> str:
    if s.kind == "generic-class":
        head = f"generic {quote(s.name)} {' '.join(quote(p) for p in s.type_params)}"
    else:
        head = f"spec {quote(s.name)} {KIND_WORD_OF[s.kind]}"
    if not s.members:
        return f"{head} {{}}\n"
    body = "".join(f"  {_member_line(m, s.name)}\n" for m in s.members)
    return f"{head} {{\n{body}}}\n"


def _path_text(p: Path) -> str:
    if not p.steps:
        return f"id({quote(p.at)})"
    return ";".join(quote(s) for s in p.steps)


def _label(f: Morphism) -> str:
    if f.label is None:
        return ""
    escaped = f.label.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f' label="{escaped}"'


def _morphism_block(f: Morphism, d: Diagram) -> str:
    if f.components:
        natural = path_morphism(d, Path(f.components)).kind
        kind = f" kind={f.kind}" if f.kind != natural else ""
        return f"morphism {quote(f.name)} = {';'.join(quote(c) for c in f.components)}{kind}{_label(f)}\n"
    head = f"morphism {quote(f.name)} : {quote(f.source)} -> {quote(f.target)} kind={f.kind}{_label(f)}"
    src, tgt = d.spec(f.source), d.spec(f.target)
    entries = []
    order = [m for m in src.member_names if m in f.mapping] + [m for m in f.mapping if m not in src]
    for m in order:
        expr = f.mapping[m]
        if m in src and default_image(src.member(m), tgt) == expr:
            continue
        entries.append(f"  {quote(m)} -> {'.'.join(quote(s) for s in expr)}\n")
    if not entries:
        return head + "\n"
    return f"{head} {{\n{''.join(entries)}}}\n"


def _pushout_line(c: Cone) -> str:
    name = "" if c.name == c.vertex else f"{quote(c.name)}: "
    return (
        f"pushout {name}{quote(c.vertex)} from span({quote(c.apex)}, {quote(c.left)}, {quote(c.right)})"
        f" via {quote(c.left_coproj)}, {quote(c.right_coproj)}\n"
    )


def serialize(d: Diagram) -> str:
    """Canonical text: specifications, morphisms, equations, pushouts; names sorted."""
    violations = validate_diagram(d)
    if violations:
        raise InvalidDiagram(violations)
    sections = [
        "".join(_spec_block(d.specs[n]) for n in sorted(d.specs)),
        "".join(_morphism_block(d.morphisms[n], d) for n in sorted(d.morphisms)),
        "".join(f"equation {_path_text(e.lhs)} = {_path_text(e.rhs)}\n" for e in d.equations),
        "".join(_pushout_line(d.cones[n]) for n in sorted(d.cones)),
    ]
    return HEADER + "".join("\n" + s for s in sections if s)
