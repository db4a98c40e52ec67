"""Multi-dimensional customization model on top of the metagraph algebra.

An application exposes customization points, each offering components. Every
concern groups components (crosscutting points) into a metagraph whose edges
mean "required by": the invertex components are required by the outvertex
components, either all of them (AND) or any one (OR). Concerns are organized
into dimensions; inside a dimension the concerns partition the full component
set (a derived, edgeless None concern absorbs the remainder) and each concern
must be independent of its siblings. A tenant's customization is a set of
per-concern selections of components and recorded requirement edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import UnknownComponent, UnknownConcern, UnknownDimension, UnknownElement
from .metagraph import (
    Edge,
    Metagraph,
    TripleMatrix,
    build_adjacency,
    closure,
    new_metagraph,
    sum_adjacency,
)

MODE_AND = "and"
MODE_OR = "or"

NONE_CONCERN_NAME = "None"


@dataclass(frozen=True)
class Component:
    id: str
    point: str
    label: str = ""
    description: Optional[str] = None


@dataclass(frozen=True)
class CustomizationPoint:
    id: str
    name: str
    components: frozenset[str]


@dataclass(frozen=True)
class RequirementEdge:
    """A "required by" edge: invertex components are required by outvertex ones."""

    id: str
    invertex: frozenset[str]
    outvertex: frozenset[str]
    mode: str = MODE_OR

    def to_edge(self) -> Edge:
        return Edge(self.id, self.invertex, self.outvertex)


def requirement(edge_id: str, required: Iterable[str], requiring: Iterable[str],
                mode: str = MODE_OR) -> RequirementEdge:
    return RequirementEdge(edge_id, frozenset(required), frozenset(requiring), mode)


@dataclass(frozen=True)
class Concern:
    id: str
    name: str
    components: frozenset[str]
    edges: tuple[RequirementEdge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))

    def metagraph(self) -> Metagraph:
        """The concern as a metagraph over its own component set."""
        return new_metagraph(self.components, [e.to_edge() for e in self.edges])

    def incoming(self, component: str) -> list[RequirementEdge]:
        """Requirement edges pointing at `component`, AND first, then by id.

        Edges with an empty invertex produce no adjacency triples and are
        therefore not incoming requirements.
        """
        found = [
            e for e in self.edges
            if component in e.outvertex and e.invertex
        ]
        found.sort(key=lambda e: (e.mode != MODE_AND, e.id))
        return found


@dataclass(frozen=True)
class Dimension:
    id: str
    name: str
    concerns: tuple[Concern, ...]
    none_concern: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "concerns", tuple(sorted(self.concerns, key=lambda c: c.id)))

    def concern(self, concern_id: str) -> Concern:
        for cn in self.concerns:
            if cn.id == concern_id:
                return cn
        raise UnknownConcern(concern_id)

    def edges(self) -> list[RequirementEdge]:
        return [e for cn in self.concerns for e in cn.edges]


@dataclass(frozen=True)
class AppModel:
    id: str
    revision: str
    customization_points: tuple[CustomizationPoint, ...]
    components: tuple[Component, ...]
    dimensions: tuple[Dimension, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "customization_points",
            tuple(sorted(self.customization_points, key=lambda p: p.id)))
        object.__setattr__(
            self, "components", tuple(sorted(self.components, key=lambda c: c.id)))
        object.__setattr__(
            self, "dimensions", tuple(sorted(self.dimensions, key=lambda d: d.id)))
        object.__setattr__(self, "_components", {c.id: c for c in self.components})
        concern_index: dict[str, tuple[Dimension, Concern]] = {}
        edge_index: dict[str, RequirementEdge] = {}
        for dim in self.dimensions:
            for cn in dim.concerns:
                concern_index.setdefault(cn.id, (dim, cn))
                for e in cn.edges:
                    edge_index.setdefault(e.id, e)
        object.__setattr__(self, "_concerns", concern_index)
        object.__setattr__(self, "_edges", edge_index)

    @property
    def component_ids(self) -> frozenset[str]:
        return frozenset(self._components)

    def component(self, component_id: str) -> Component:
        try:
            return self._components[component_id]
        except KeyError:
            raise UnknownComponent(component_id) from None

    def has_component(self, component_id: str) -> bool:
        return component_id in self._components

    def concern(self, concern_id: str) -> Concern:
        try:
            return self._concerns[concern_id][1]
        except KeyError:
            raise UnknownConcern(concern_id) from None

    def concern_dimension(self, concern_id: str) -> Dimension:
        try:
            return self._concerns[concern_id][0]
        except KeyError:
            raise UnknownConcern(concern_id) from None

    def has_concern(self, concern_id: str) -> bool:
        return concern_id in self._concerns

    def dimension(self, dimension_id: str) -> Dimension:
        for dim in self.dimensions:
            if dim.id == dimension_id:
                return dim
        raise UnknownDimension(dimension_id)

    def all_edges(self) -> list[RequirementEdge]:
        return [e for dim in self.dimensions for e in dim.edges()]

    def requirement_edge(self, edge_id: str) -> Optional[RequirementEdge]:
        return self._edges.get(edge_id)


@dataclass(frozen=True)
class Violation:
    code: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} at {self.location}: {self.message}"


@dataclass
class WellFormednessReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def add(self, code: str, location: str, message: str):
        self.violations.append(Violation(code, location, message))


def validate_model(m: AppModel) -> WellFormednessReport:
    """Check every model invariant, returning all violations found.

    Codes: OverlappingConcerns (two concerns of one dimension share a
    component), UncoveredComponent (a component in no concern of some
    dimension), DependentConcern (a concern's component is produced or used
    by another concern's edge in the same dimension), DuplicateEdgeId
    (one edge id with conflicting definitions), ConcernInMultipleDimensions,
    and DanglingEdgeReference (edge mentions an unknown component).
    """
    report = WellFormednessReport()
    known = frozenset(c.id for c in m.components)

    seen_concern: dict[str, str] = {}
    for dim in m.dimensions:
        for cn in dim.concerns:
            if cn.id in seen_concern:
                report.add(
                    "ConcernInMultipleDimensions",
                    f"concern {cn.id}",
                    f"appears in {seen_concern[cn.id]} and {dim.id}",
                )
            else:
                seen_concern[cn.id] = dim.id

    edge_defs: dict[str, tuple] = {}
    for dim in m.dimensions:
        for cn in dim.concerns:
            for e in cn.edges:
                definition = (e.invertex, e.outvertex, e.mode)
                if e.id in edge_defs and edge_defs[e.id] != definition:
                    report.add(
                        "DuplicateEdgeId",
                        f"edge {e.id}",
                        f"conflicting definitions (one in concern {cn.id})",
                    )
                edge_defs.setdefault(e.id, definition)
                for x in sorted(e.invertex | e.outvertex):
                    if x not in known:
                        report.add(
                            "DanglingEdgeReference",
                            f"edge {e.id} in concern {cn.id}",
                            f"references unknown component {x}",
                        )

    for dim in m.dimensions:
        concerns = list(dim.concerns)
        for i, a in enumerate(concerns):
            for b in concerns[i + 1:]:
                shared = a.components & b.components
                if shared:
                    report.add(
                        "OverlappingConcerns",
                        f"dimension {dim.id}",
                        f"concerns {a.id} and {b.id} share {sorted(shared)}",
                    )
        covered = set()
        for cn in concerns:
            covered |= cn.components
        for missing in sorted(known - covered):
            report.add(
                "UncoveredComponent",
                f"dimension {dim.id}",
                f"component {missing} is in no concern",
            )
        # Independence inside the dimension metagraph: a concern's component
        # may be produced or used only by the concern's own edges. Pure
        # inputs/outputs of the dimension are exempt by construction (a
        # foreign edge touching x makes x non-pure).
        for cn in concerns:
            own = {e.id for e in cn.edges}
            foreign = [e for other in concerns for e in other.edges if e.id not in own]
            for e in foreign:
                produced = sorted(cn.components & e.outvertex)
                if produced:
                    report.add(
                        "DependentConcern",
                        f"concern {cn.id} in dimension {dim.id}",
                        f"{produced} produced by foreign edge {e.id}",
                    )
                used = sorted(cn.components & e.invertex)
                if used:
                    report.add(
                        "DependentConcern",
                        f"concern {cn.id} in dimension {dim.id}",
                        f"{used} used by foreign edge {e.id}",
                    )
    return report


def derive_none_concerns(m: AppModel) -> AppModel:
    """Give every dimension a None concern holding its unassigned components.

    Dimensions that already carry one are left alone. The synthesized concern
    is edgeless and may be empty.
    """
    taken = set(m._concerns)
    new_dimensions = []
    for dim in m.dimensions:
        if dim.none_concern is not None:
            new_dimensions.append(dim)
            continue
        covered = set()
        for cn in dim.concerns:
            covered |= cn.components
        none_id = f"{dim.id}.none"
        while none_id in taken:
            none_id += "+"
        taken.add(none_id)
        none = Concern(none_id, NONE_CONCERN_NAME, frozenset(m.component_ids - covered))
        new_dimensions.append(
            Dimension(dim.id, dim.name, dim.concerns + (none,), none_id)
        )
    return AppModel(
        m.id, m.revision, m.customization_points, m.components, tuple(new_dimensions)
    )


def dimension_adjacency(m: AppModel, dimension_id: str) -> TripleMatrix:
    """Sum of the dimension's concern adjacencies over the full component set."""
    dim = m.dimension(dimension_id)
    domain = m.component_ids
    total = build_adjacency(new_metagraph(domain, []))
    for cn in dim.concerns:
        part = build_adjacency(new_metagraph(domain, [e.to_edge() for e in cn.edges]))
        total = sum_adjacency(total, part)
    return total


def app_metagraph(m: AppModel) -> Metagraph:
    """The whole application: every component, every dimension's edges."""
    edges: dict[str, Edge] = {}
    duplicates = []
    for e in m.all_edges():
        plain = e.to_edge()
        if e.id in edges and edges[e.id] != plain:
            duplicates.append(plain)
        edges.setdefault(e.id, plain)
    return new_metagraph(m.component_ids, list(edges.values()) + duplicates)


def concern_metagraph(m: AppModel, concern_id: str) -> Metagraph:
    return m.concern(concern_id).metagraph()


@dataclass(frozen=True)
class GuidanceEntry:
    """One customization path a tenant can review: how `target` is reached."""

    source: str
    target: str
    coinput: frozenset[str]
    cooutput: frozenset[str]
    path: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.path)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "coinput": sorted(self.coinput),
            "cooutput": sorted(self.cooutput),
            "path": list(self.path),
            "length": self.length,
        }


def concern_guidance(
    m: AppModel,
    concern_id: str,
    target: Optional[str] = None,
    max_path_len: Optional[int] = None,
) -> list[GuidanceEntry]:
    """Every requirement path of the concern, optionally only into `target`.

    Entries are ordered by (path length, source id, path ids) so repeated
    calls render identically.
    """
    cn = m.concern(concern_id)
    if target is not None and target not in cn.components:
        raise UnknownElement(target)
    matrix = closure(cn.metagraph(), max_path_len)
    entries = [
        GuidanceEntry(source, tgt, triple.coinput, triple.cooutput, triple.path)
        for source, tgt, triple in matrix.iter_triples()
        if target is None or tgt == target
    ]
    entries.sort(key=lambda g: (g.length, g.source, g.path, g.target))
    return entries


@dataclass
class ConcernSelection:
    """A tenant's picks inside one concern: components plus recorded edges."""

    components: set[str] = field(default_factory=set)
    edges: set[str] = field(default_factory=set)

    def clone(self) -> "ConcernSelection":
        return ConcernSelection(set(self.components), set(self.edges))

    @property
    def empty(self) -> bool:
        return not self.components and not self.edges


@dataclass
class TenantCustomization:
    """Mutable per-tenant state; one session owns and serializes mutations."""

    tenant: str
    model_id: str
    revision: str
    selections: dict[str, ConcernSelection] = field(default_factory=dict)

    @property
    def selected_components(self) -> set[str]:
        out: set[str] = set()
        for sel in self.selections.values():
            out |= sel.components
        return out

    @property
    def recorded_edges(self) -> set[str]:
        out: set[str] = set()
        for sel in self.selections.values():
            out |= sel.edges
        return out

    def selection(self, concern_id: str) -> ConcernSelection:
        return self.selections.setdefault(concern_id, ConcernSelection())

    def components_by_point(self, m: AppModel) -> dict[str, set[str]]:
        chosen = self.selected_components
        return {
            point.id: set(point.components) & chosen
            for point in m.customization_points
        }

    def clone(self) -> "TenantCustomization":
        return TenantCustomization(
            self.tenant,
            self.model_id,
            self.revision,
            {cid: sel.clone() for cid, sel in self.selections.items() if not sel.empty},
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TenantCustomization):
            return NotImplemented
        mine = {k: (frozenset(v.components), frozenset(v.edges))
                for k, v in self.selections.items() if not v.empty}
        theirs = {k: (frozenset(v.components), frozenset(v.edges))
                  for k, v in other.selections.items() if not v.empty}
        return (self.tenant, self.model_id, self.revision, mine) == (
            other.tenant, other.model_id, other.revision, theirs)


def new_customization(m: AppModel, tenant: str = "default") -> TenantCustomization:
    return TenantCustomization(tenant, m.id, m.revision)
