"""Diagrammatic Modeling Language: object-oriented designs as diagrams of specifications."""
from __future__ import annotations

from .codegen import SkeletonUnit, emit_dot, emit_skeleton, render_skeleton
from .constructs import (
    EnvelopeVariant,
    PushoutPattern,
    classify_cone,
    classify_pushout,
    constructor_adjustment,
    elaborate_pushout,
    instantiate_object,
    make_envelope,
    polymorphism_apply,
    template_instantiate,
)
from .core import (
    Cone,
    Diagram,
    Equation,
    Member,
    Morphism,
    Path,
    PathVerdict,
    Span,
    Specification,
    Violation,
    compose_morphisms,
    identity_morphism,
    path_morphism,
    paths_equal,
    validate_diagram,
)
from .dsl import SourceSpan, parse, serialize
from .errors import (
    DMLError,
    UnknownEntity,
    NonComposable,
    NonParallelPaths,
    InvalidSpan,
    CompositeLegTarget,
    KindClash,
    NameTaken,
    NonCommutingCone,
    BaseMismatch,
    IllFormedGraphMorphism,
    NoSharedApex,
    NotAPushout,
    MissingInterfaceMember,
    NotGeneric,
    NotInstantiable,
    NotAbstract,
    ExtensionMismatch,
    UnimplementedVirtual,
    UnsupportedConstruct,
    InvalidDiagram,
    ValidationError,
    ParseError,
)
from .graphs import Arrow, GraphMorphism, PlainGraph, graph_pushout, parameter_passing
from .pushout import (
    Certificate,
    PushoutResult,
    comparison_map,
    compute_pushout,
    is_pushout,
    mediating_morphism,
    verify_cone_commutes,
)

__version__ = "0.1.0"
