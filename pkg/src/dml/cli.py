"""Command-line front end: ``dml <command> ...``.

Exit codes: 0 success, 1 the diagram is ill-formed or a check failed,
2 usage, parse or file errors.  ``--format kv`` prints the machine report,
one ``key=value`` line per fact, instead of the prose report.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from . import corpus
from .codegen import DIALECTS, emit_dot, emit_skeleton, main_block, object_statement
from .constructs import classify_cone, constructor_adjustment
from .core import DEFAULT_DEPTH, Cone, Diagram, Path, Span, paths_equal
from .dsl import parse
from .errors import DMLError, ParseError, ValidationError
from .pushout import NAMING_POLICIES, compute_pushout, is_pushout, verify_cone_commutes

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
_NUMBERS = {1: "one", 2: "two", 3: "three", 4: "four", 5: "five", 6: "six"}


@dataclass
class CommandResult:
    exit_code: int
    report: str
    machine: list[tuple[str, str]] = field(default_factory=list)

    @property
    def machine_report(self) -> str:
        return "".join(f"{k}={_kv_value(v)}\n" for k, v in self.machine)


def _kv_value(v) -> str:
    return str(v).replace("\\", "\\\\").replace("\n", "\\n")


class _Usage(Exception):
    pass


class _Out:
    """Collects the prose report and the machine report side by side."""

    def __init__(self, color: bool):
        self.lines: list[str] = []
        self.kv: list[tuple[str, str]] = []
        self.color = color

    def say(self, text: str = ""):
        self.lines.append(text)

    def put(self, key: str, value):
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.kv.append((key, str(value)))

    def mark(self, ok: bool, text: str) -> str:
        if not self.color:
            return text
        return f"\033[{'32' if ok else '31'}m{text}\033[0m"

    def result(self, code: int) -> CommandResult:
        self.kv.append(("exit_code", str(code)))
        return CommandResult(code, "\n".join(self.lines) + ("\n" if self.lines else ""), self.kv)


# -- helpers ---------------------------------------------------------------------


def _read(path: str) -> Diagram:
    try:
        text = FsPath(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise _FileProblem(f"file not found: {path}") from None
    except (IsADirectoryError, PermissionError, UnicodeDecodeError) as exc:
        raise _FileProblem(f"cannot read {path}: {exc}") from None
    return parse(text)


class _FileProblem(Exception):
    pass


def _span_of(d: Diagram, text: str) -> Span:
    if text in d.cones:
        return d.cones[text].base
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3 or not all(parts):
        raise _Usage(f"--span takes a declared pushout name or APEX,LEFT,RIGHT, not {text!r}")
    return Span(*parts)


def _natures(d: Diagram, name: str) -> list[str]:
    f = d.morphism(name)
    if not f.components:
        return [f.nature]
    out: list[str] = []
    for c in f.components:
        out += _natures(d, c)
    return out


def _decomposition(d: Diagram, c: Cone, out: _Out) -> None:
    """Describe the coprojection parallel to a composite leg, part by part."""
    for leg, parallel in ((c.left, c.right_coproj), (c.right, c.left_coproj)):
        f = d.morphism(leg)
        if not f.components:
            continue
        parts = _natures(d, leg)
        g = d.morphism(parallel)
        count = _NUMBERS.get(len(parts), str(len(parts)))
        differ = " of different nature" if len(set(parts)) == len(parts) else ""
        out.say(
            f"  coprojection {g.name}: {g.source} -> {g.target} is parallel to {leg} = {';'.join(f.components)},"
            f" composed of {count} morphisms{differ}: {', then '.join(parts)}"
        )
        out.put(f"decomposition.{g.name}.parallel", leg)
        out.put(f"decomposition.{g.name}.count", len(parts))
        out.put(f"decomposition.{g.name}.natures", "; ".join(parts))


def _verify(d: Diagram, name: str, depth: int, out: _Out, prefix: str = "") -> bool:
    c = d.cone(name)
    commutes = verify_cone_commutes(d, c)
    square = paths_equal(d, Path((c.left, c.left_coproj)), Path((c.right, c.right_coproj)), depth)
    out.put(f"{prefix}cone.name", c.name)
    out.put(f"{prefix}pushout.vertex", c.vertex)
    out.put(f"{prefix}cone.commutes", commutes)
    out.put(f"{prefix}square.paths_equal", square.answer)
    if not commutes:
        out.say(f"{out.mark(False, 'FAILED')} {c.name}: the square over {c.apex} does not commute")
        out.put(f"{prefix}certificate.kind", "non-commuting")
        out.put(f"{prefix}certificate.holds", False)
        return False
    ok, cert = is_pushout(d, c)
    out.put(f"{prefix}certificate.kind", cert.kind)
    out.put(f"{prefix}certificate.holds", ok)
    if ok:
        out.say(f"{out.mark(True, 'verified')} {c.name}: {c.vertex} is the pushout of span({c.apex}, {c.left}, {c.right})")
    else:
        out.put(f"{prefix}certificate.witness", ", ".join(cert.members))
        out.say(f"{out.mark(False, 'FAILED')} {c.name}: {cert.kind}: {cert.message}")
    out.say(f"  square {c.left};{c.left_coproj} = {c.right};{c.right_coproj}: {square.answer}")
    return ok


def _classify(d: Diagram, name: str, out: _Out, prefix: str = "") -> None:
    pattern = classify_cone(d, d.cone(name))
    out.put(f"{prefix}pattern.tag", pattern.tag)
    for role in sorted(pattern.bindings):
        out.put(f"{prefix}pattern.{role}", pattern.bindings[role])
    roles = ", ".join(f"{r}={pattern.bindings[r]}" for r in sorted(pattern.bindings))
    out.say(f"  pattern={pattern.tag} ({roles})")


def _member_list(d: Diagram, spec: str) -> str:
    return "{" + ", ".join(d.spec(spec).member_names) + "}"


_UNSAFE = re.compile(r"[^A-Za-z0-9_.-]")


def _file_names(names: list[str], suffix: str) -> list[str]:
    """Safe, pairwise distinct (even on case-insensitive file systems) file names."""
    taken: set[str] = set()
    out = []
    for n in names:
        base = _UNSAFE.sub("_", n).strip(".") or "_"
        cand, i = base, 2
        while cand.lower() in taken:
            cand, i = f"{base}_{i}", i + 1
        taken.add(cand.lower())
        out.append(f"{cand}{suffix}")
    return out


def _write_skeletons(d: Diagram, dialect: str, out_dir: FsPath, strict: bool, out: _Out, prefix: str = "") -> None:
    units = emit_skeleton(d, dialect, strict=strict)
    out_dir.mkdir(parents=True, exist_ok=True)
    classes = [u for u in units if not u.is_object]
    names = _file_names(["main"] + [u.spec_name for u in classes], f".skeleton.{dialect}")
    written = []
    main_file, class_files = names[0], names[1:]
    for u, fname in zip(classes, class_files):
        (out_dir / fname).write_text(u.text, encoding="utf-8")
        written.append(fname)
    main = main_block(units, dialect)
    if main:
        (out_dir / main_file).write_text(main, encoding="utf-8")
        written.append(main_file)
    for i, f in enumerate(written):
        out.put(f"{prefix}skeleton.{dialect}.file.{i}", f)
    notes = [n for u in units for n in u.unsupported]
    for i, n in enumerate(notes):
        out.put(f"{prefix}skeleton.{dialect}.unsupported.{i}", n)
    out.say(f"  {dialect}: {len(written)} files in {out_dir}" + (f", {len(notes)} unsupported constructs marked" if notes else ""))


# -- commands --------------------------------------------------------------------


def _cmd_validate(args, out: _Out) -> int:
    d = _read(args.file)
    out.put("status", "ok")
    for key, n in (("specs", len(d.specs)), ("morphisms", len(d.morphisms)), ("equations", len(d.equations)), ("pushouts", len(d.cones))):
        out.put(key, n)
    out.say(
        f"{out.mark(True, 'valid')}: {len(d.specs)} specifications, {len(d.morphisms)} morphisms,"
        f" {len(d.equations)} equations, {len(d.cones)} pushouts"
    )
    return EXIT_OK


def _cmd_pushout(args, out: _Out) -> int:
    d = _read(args.file)
    span = _span_of(d, args.span)
    p = compute_pushout(d, span, args.vertex, naming=args.naming)
    v = p.vertex
    out.put("pushout.vertex", v.name)
    out.put("pushout.kind", v.kind)
    out.put("pushout.members", ", ".join(v.member_names))
    out.say(f"pushout of span({span.apex}, {span.left}, {span.right}): {v.name} ({v.kind})")
    for m in v.members:
        origins = ", ".join(f"{spec}.{name}" for _, spec, name in p.provenance.get(m.name, ()))
        out.put(f"provenance.{m.name}", origins)
        out.say(f"  {m.name} ({m.kind}) <- {origins}")
    for g in (p.left_coprojection, p.right_coprojection):
        out.put(f"coprojection.{g.name}", f"{g.source} -> {g.target}")
        out.say(f"  coprojection {g.name}: {g.source} -> {g.target}")
    eq = p.added_equation
    out.put("pushout.equation", f"{eq.lhs} = {eq.rhs}")
    out.say(f"  equation {eq.lhs} = {eq.rhs}")
    adjust = [m.name for m in constructor_adjustment(p)]
    out.put("pushout.constructor_adjustment", ", ".join(adjust))
    if adjust:
        out.say(f"  re-declare in {v.name}: {', '.join(adjust)}")
    return EXIT_OK


def _cmd_verify(args, out: _Out) -> int:
    d = _read(args.file)
    ok = _verify(d, args.cone, args.depth, out)
    if ok:
        _decomposition(d, d.cone(args.cone), out)
    return EXIT_OK if ok else EXIT_FAILED


def _cmd_classify(args, out: _Out) -> int:
    d = _read(args.file)
    out.say(f"{args.pushout}:")
    _classify(d, args.pushout, out)
    return EXIT_OK


def _cmd_skeleton(args, out: _Out) -> int:
    d = _read(args.file)
    out.say(f"skeletons of {args.file}")
    _write_skeletons(d, args.dialect, FsPath(args.out), args.strict, out)
    return EXIT_OK


def _cmd_dot(args, out: _Out) -> int:
    d = _read(args.file)
    name = FsPath(args.file).stem
    text = emit_dot(d, name=name)
    out.put("dot.nodes", len(d.specs))
    out.put("dot.edges", len(d.morphisms))
    if args.out in (None, "-"):
        out.say(text.rstrip("\n"))
        return EXIT_OK
    FsPath(args.out).write_text(text, encoding="utf-8")
    out.put("dot.file", args.out)
    out.say(f"wrote {args.out}: {len(d.specs)} nodes, {len(d.morphisms)} edges")
    return EXIT_OK


def _cmd_demo(args, out: _Out) -> int:
    filename = corpus.DEMOS[args.name]
    d = corpus.load(filename)
    out.put("demo", args.name)
    out.put("status", "ok")
    out.put("specs", len(d.specs))
    out.put("morphisms", len(d.morphisms))
    out.put("equations", len(d.equations))
    out.say(f"demo {args.name} ({filename}): valid, {len(d.specs)} specifications, {len(d.morphisms)} morphisms")
    all_ok = True
    for name in sorted(d.cones):
        prefix = f"{name}."
        ok = _verify(d, name, args.depth, out, prefix)
        all_ok &= ok
        if ok:
            _classify(d, name, out, prefix)
            c = d.cone(name)
            out.say(f"  {c.vertex} members {_member_list(d, c.vertex)}")
            out.put(f"{prefix}pushout.members", ", ".join(d.spec(c.vertex).member_names))
            _decomposition(d, c, out)
    objects = [n for n in sorted(d.specs) if d.specs[n].kind == "object"]
    for n in objects:
        out.put(f"object.{n}", object_statement(d, n))
    if objects:
        out.say("objects: " + " ".join(object_statement(d, n) for n in objects))
    if args.name == "linbox-inherit":
        diff = corpus.figure_diff(corpus.load(corpus.DEMOS["linbox-copy"]), d)
        out.say(f"differences from linbox-copy ({len(diff)}):")
        for i, e in enumerate(diff):
            out.say(f"  {e}")
            out.put(f"diff.{i}", str(e))
    for dialect in DIALECTS:
        units = emit_skeleton(d, dialect)
        out.put(f"skeleton.{dialect}.units", len(units))
        notes = [n for u in units for n in u.unsupported]
        out.put(f"skeleton.{dialect}.unsupported", len(notes))
    dot = emit_dot(d, name=args.name)
    out.put("dot.edges.dashed", dot.count("style=dashed"))
    if args.out:
        target = FsPath(args.out)
        out.say("outputs:")
        for dialect in DIALECTS:
            _write_skeletons(d, dialect, target, False, out)
        target.mkdir(parents=True, exist_ok=True)
        (target / f"{args.name}.dot").write_text(dot, encoding="utf-8")
        out.say(f"  dot: {target / (args.name + '.dot')}")
    out.say(out.mark(all_ok, "all pushouts verified" if all_ok else "some pushouts FAILED"))
    return EXIT_OK if all_ok else EXIT_FAILED


# -- parser ------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=_positive, default=DEFAULT_DEPTH, help="rewrite bound for path equality (default %(default)s)")
    common.add_argument("--format", choices=("text", "kv"), default="text", help="prose report or key=value lines")

    parser = argparse.ArgumentParser(prog="dml", description="Diagrammatic Modeling Language: pushouts, checks and code skeletons.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("validate", parents=[common], help="parse and check a diagram")
    p.add_argument("file")
    p.set_defaults(run=_cmd_validate)

    p = sub.add_parser("pushout", parents=[common], help="compute the pushout of a span")
    p.add_argument("file")
    p.add_argument("--span", required=True, help="declared pushout name, or APEX,LEFT,RIGHT")
    p.add_argument("--vertex", required=True, help="name of the new vertex")
    p.add_argument("--naming", choices=NAMING_POLICIES, default="left")
    p.set_defaults(run=_cmd_pushout)

    p = sub.add_parser("verify", parents=[common], help="check that a declared cone is a pushout")
    p.add_argument("file")
    p.add_argument("--cone", required=True)
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("classify", parents=[common], help="name the construction a pushout performs")
    p.add_argument("file")
    p.add_argument("--pushout", required=True)
    p.set_defaults(run=_cmd_classify)

    p = sub.add_parser("skeleton", parents=[common], help="write code skeletons")
    p.add_argument("file")
    p.add_argument("--dialect", choices=DIALECTS, default="curly")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--strict", action="store_true", help="fail on constructs the dialect cannot express")
    p.set_defaults(run=_cmd_skeleton)

    p = sub.add_parser("dot", parents=[common], help="render a diagram as Graphviz DOT")
    p.add_argument("file")
    p.add_argument("--out", help="output file (default: standard output)")
    p.set_defaults(run=_cmd_dot)

    p = sub.add_parser("demo", parents=[common], help="run a bundled diagram end to end")
    p.add_argument("name", choices=sorted(corpus.DEMOS))
    p.add_argument("--out", help="also write skeletons and DOT into this directory")
    p.set_defaults(run=_cmd_demo)
    return parser


def _color_default() -> bool:
    setting = os.environ.get("DML_COLOR")
    if setting is not None:
        return setting != "0"
    return sys.stdout.isatty()


def run(argv: list[str] | None = None, *, color: bool | None = None) -> CommandResult:
    """Execute one command and return its outcome without touching the process streams."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    captured = io.StringIO()
    try:
        with contextlib.redirect_stdout(captured), contextlib.redirect_stderr(captured):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        code = EXIT_OK if exc.code in (0, None) else EXIT_USAGE
        kv = [("error.kind", "usage")] if code else []
        return CommandResult(code, captured.getvalue(), kv + [("exit_code", str(code))])

    out = _Out(_color_default() if color is None else color)
    out.put("command", args.command)
    try:
        code = args.run(args, out)
    except _Usage as exc:
        out.say(f"usage error: {exc}")
        out.put("error.kind", "usage")
        out.put("error.message", exc)
        code = EXIT_USAGE
    except _FileProblem as exc:
        out.say(f"error: {exc}")
        out.put("error.kind", "file-not-found" if "not found" in str(exc) else "unreadable-file")
        out.put("error.message", exc)
        code = EXIT_USAGE
    except ParseError as exc:
        out.say(f"{getattr(args, 'file', args.command)}:{exc}")
        out.put("error.kind", "ParseError")
        out.put("error.line", exc.location.line)
        out.put("error.column", exc.location.column)
        out.put("error.message", exc.message)
        code = EXIT_USAGE
    except ValidationError as exc:
        out.say(f"{out.mark(False, 'invalid')}: {len(exc.violations)} violations")
        out.put("status", "invalid")
        out.put("error.kind", "ValidationError")
        for i, v in enumerate(exc.violations):
            out.say(f"  [{v.rule}] {v.where}: {v.message}")
            out.put(f"violation.{i}", f"{v.rule} {v.entity}: {v.message}")
        code = EXIT_FAILED
    except DMLError as exc:
        out.say(f"{type(exc).__name__}: {exc}")
        out.put("error.kind", type(exc).__name__)
        out.put("error.message", exc)
        code = EXIT_FAILED
    except OSError as exc:
        out.say(f"error: {exc}")
        out.put("error.kind", "io")
        out.put("error.message", exc)
        code = EXIT_USAGE
    result = out.result(code)
    if args.format == "kv":
        result = CommandResult(result.exit_code, result.machine_report, result.machine)
    return result


def main(argv: list[str] | None = None) -> int:
    result = run(argv)
    stream = sys.stdout if result.exit_code in (EXIT_OK, EXIT_FAILED) else sys.stderr
    stream.write(result.report)
    stream.flush()
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
