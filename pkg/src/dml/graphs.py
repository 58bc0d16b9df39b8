"""Pushouts in the category of directed multigraphs, and parameter passing.

Parameter passing ``f(a)`` is read as composition: the actual parameter is
an arrow ``a: U -> X`` out of the unit, the function an arrow ``f: X -> Y``.
Gluing the two one-edge graphs along ``X`` gives the path ``U -> X -> Y``,
and composing along that path gives ``f.a: U -> Y``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import IllFormedGraphMorphism, InvalidSpan, NoSharedApex
from .pushout import name_classes
from .unionfind import quotient


@dataclass(frozen=True)
class PlainGraph:
    name: str
    nodes: tuple[str, ...] = ()
    edges: Mapping[str, tuple[str, str]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", {e: tuple(st) for e, st in self.edges.items()})
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise ValueError(f"graph {self.name} repeats a node")
        for e, (s, t) in self.edges.items():
            if s not in known or t not in known:
                raise ValueError(f"edge {e} of {self.name} has a dangling endpoint")


@dataclass(frozen=True)
class GraphMorphism:
    source: PlainGraph
    target: PlainGraph
    nodes: Mapping[str, str]
    edges: Mapping[str, str] = field(default_factory=dict)

    def check(self) -> None:
        for n in self.source.nodes:
            if self.nodes.get(n) not in self.target.nodes:
                raise IllFormedGraphMorphism(f"node {n} has no image in {self.target.name}")
        for e, (s, t) in self.source.edges.items():
            image = self.edges.get(e)
            if image not in self.target.edges:
                raise IllFormedGraphMorphism(f"edge {e} has no image in {self.target.name}")
            if self.target.edges[image] != (self.nodes[s], self.nodes[t]):
                raise IllFormedGraphMorphism(f"edge {e} -> {image} does not preserve endpoints")


def inclusion(sub: PlainGraph, whole: PlainGraph) -> GraphMorphism:
    return GraphMorphism(sub, whole, {n: n for n in sub.nodes}, {e: e for e in sub.edges})


@dataclass(frozen=True)
class GraphPushout:
    graph: PlainGraph
    left: GraphMorphism
    right: GraphMorphism


def graph_pushout(
    left: GraphMorphism, right: GraphMorphism, name: str = "P", naming: str = "left"
) -> GraphPushout:
    """Quotient the disjoint union of both targets, once for nodes and once for edges."""
    if left.source != right.source:
        raise InvalidSpan("graph morphisms of a span must share their source")
    left.check()
    right.check()
    apex, g1, g2 = left.source, left.target, right.target
    graph_names = (g1.name, g2.name)

    node_classes = quotient(
        g1.nodes, g2.nodes, [(left.nodes[n], right.nodes[n]) for n in apex.nodes]
    )
    node_names = name_classes([tuple(c) for c in node_classes], graph_names, naming)
    node_of = {item: n for cls, n in zip(node_classes, node_names) for item in cls}

    edge_classes = quotient(
        g1.edges, g2.edges, [(left.edges[e], right.edges[e]) for e in apex.edges]
    )
    edge_names = name_classes([tuple(c) for c in edge_classes], graph_names, naming)
    graphs = {1: g1, 2: g2}
    edges = {}
    for cls, n in zip(edge_classes, edge_names):
        leg, e = cls[0]
        s, t = graphs[leg].edges[e]
        edges[n] = (node_of[(leg, s)], node_of[(leg, t)])
    edge_of = {item: n for cls, n in zip(edge_classes, edge_names) for item in cls}

    result = PlainGraph(name, tuple(node_names), edges)
    coproj = []
    for leg, g in graphs.items():
        coproj.append(
            GraphMorphism(
                g,
                result,
                {n: node_of[(leg, n)] for n in g.nodes},
                {e: edge_of[(leg, e)] for e in g.edges},
            )
        )
    return GraphPushout(result, coproj[0], coproj[1])


def is_identity_edge(name: str, ends: tuple[str, str]) -> bool:
    return ends[0] == ends[1] and (name == "id" or name == f"id_{ends[0]}")


@dataclass(frozen=True)
class Arrow:
    """A composite arrow obtained by the composition rule."""

    source: str
    target: str
    steps: tuple[str, ...]  # application order; identities already dropped
    pushout: GraphPushout | None = None

    @property
    def label(self) -> str:
        return ".".join(reversed(self.steps)) if self.steps else f"id_{self.source}"

    def as_graph(self, name: str | None = None) -> PlainGraph:
        nodes = (self.source,) if self.source == self.target else (self.source, self.target)
        return PlainGraph(name or self.label, nodes, {self.label: (self.source, self.target)})


def _steps(label: str) -> tuple[str, ...]:
    return tuple(reversed(label.split(".")))


def parameter_passing(f_graph: PlainGraph, a_graph: PlainGraph) -> Arrow:
    """Glue ``a: U -> X`` and ``f: X -> Y`` along ``X`` and compose to ``f.a: U -> Y``.

    Edge labels of the form ``g.f`` are read as already composed arrows, so
    the result of one call can be fed to the next.
    """
    shared = [n for n in f_graph.nodes if n in a_graph.nodes]
    if not shared:
        raise NoSharedApex(f"{f_graph.name} and {a_graph.name} share no node")
    glue_point = None
    for x in shared:
        out_all = [e for e, (s, _) in f_graph.edges.items() if s == x]
        # an identity is used as the function only when nothing else leaves x
        out_f = sorted(e for e in out_all if not is_identity_edge(e, f_graph.edges[e])) or sorted(out_all)
        in_a = sorted(e for e, (_, t) in a_graph.edges.items() if t == x)
        if out_f and in_a:
            glue_point = (x, out_f[0], in_a[0])
            break
    if glue_point is None:
        raise NoSharedApex(
            f"no node of {f_graph.name} and {a_graph.name} is both the target of the parameter and the source of the function"
        )
    x, f, a = glue_point
    apex = PlainGraph("apex", (x,), {})
    po = graph_pushout(inclusion(apex, f_graph), inclusion(apex, a_graph))

    u = po.right.nodes[a_graph.edges[a][0]]
    y = po.left.nodes[f_graph.edges[f][1]]
    steps = []
    for label, ends in ((a, a_graph.edges[a]), (f, f_graph.edges[f])):
        if not is_identity_edge(label, ends):
            steps.extend(s for s in _steps(label) if not s.startswith("id_") and s != "id")
    return Arrow(u, y, tuple(steps), po)
