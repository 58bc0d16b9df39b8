"""Bundled example diagrams and the structural comparison of two figures."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from ..codegen import object_statement
from ..core import Diagram
from ..dsl import parse

FILES = (
    "virtual_inheritance.dml",
    "parameter_passing.dml",
    "template.dml",
    "polymorphism.dml",
    "envelope_java.dml",
    "linbox_copy.dml",
    "linbox_inherit.dml",
)

DEMOS = {
    "virtual-inheritance": "virtual_inheritance.dml",
    "template": "template.dml",
    "polymorphism": "polymorphism.dml",
    "linbox-copy": "linbox_copy.dml",
    "linbox-inherit": "linbox_inherit.dml",
}


def read_text(filename: str) -> str:
    if filename not in FILES:
        raise KeyError(f"no bundled diagram {filename!r}")
    return resources.files(__name__).joinpath(filename).read_text(encoding="utf-8")


def load(filename: str) -> Diagram:
    return parse(read_text(filename))


@dataclass(frozen=True)
class DiffEntry:
    change: str  # box-removed, box-added, arrow-removed, arrow-added, construction-changed
    subject: str
    before: str | None = None
    after: str | None = None

    def __str__(self) -> str:
        if self.change == "construction-changed":
            return f"{self.change} {self.subject}: {self.before} => {self.after}"
        return f"{self.change} {self.subject}"


def _arrows(d: Diagram, boxes: set[str]) -> set[tuple[str, str, str]]:
    return {
        (f.source, f.target, f.kind)
        for f in d.morphisms.values()
        if f.kind != "coprojection" and not f.components and f.source in boxes and f.target in boxes
    }


def _constructions(d: Diagram, boxes: set[str]) -> dict[str, str]:
    return {n: object_statement(d, n) for n in sorted(boxes) if d.specs[n].kind == "object"}


def figure_diff(before: Diagram, after: Diagram) -> list[DiffEntry]:
    """What a reader sees change between two DML figures.

    Boxes are compared by name; drawn arrows (neither coprojections nor
    composites) by source, target and kind among the boxes both figures
    share; objects by their construction statement.
    """
    entries = []
    b1, b2 = set(before.specs), set(after.specs)
    entries += [DiffEntry("box-removed", n) for n in sorted(b1 - b2)]
    entries += [DiffEntry("box-added", n) for n in sorted(b2 - b1)]
    common = b1 & b2
    a1, a2 = _arrows(before, common), _arrows(after, common)
    entries += [DiffEntry("arrow-removed", f"{s} -> {t} [{k}]") for s, t, k in sorted(a1 - a2)]
    entries += [DiffEntry("arrow-added", f"{s} -> {t} [{k}]") for s, t, k in sorted(a2 - a1)]
    c1, c2 = _constructions(before, common), _constructions(after, common)
    for n in sorted(set(c1) & set(c2)):
        if c1[n] != c2[n]:
            entries.append(DiffEntry("construction-changed", n, c1[n], c2[n]))
    return entries
