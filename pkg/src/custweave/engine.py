"""Incremental validation of tenant customization operations.

Two operations exist: add a component to a concern, and delete a component.
An add is accepted when the component has no incoming requirement edges in
its concern, or when one incoming edge is already satisfied by the tenant's
selections; the satisfying edge and its supporting components are recorded.
A delete is rejected while the component supports any recorded requirement;
otherwise it removes the component everywhere, dropping recorded edges whose
last selected beneficiary it was. Every accepted operation keeps the
customization in a state the from-scratch checker `oracle_valid` accepts.

The engine is stateless: it transforms (model, customization) pairs, and a
customization is only mutated by a decision with a valid verdict. Callers
must apply operations of one session serially; distinct sessions may run in
parallel against the shared immutable model.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    ComponentNotInConcern,
    ComponentNotPresent,
    CustweaveError,
    RevisionMismatch,
    UnknownComponent,
    UnknownConcern,
)
from .metagraph import Cell, Edge, Metagraph, adjacency_column, adjacency_row, new_metagraph
from .model import (
    MODE_AND,
    AppModel,
    TenantCustomization,
    new_customization,
)

VALID = "valid"
INVALID = "invalid"


@dataclass(frozen=True)
class Decision:
    """Outcome of one operation, with everything the caller needs to audit it."""

    verdict: str
    reason: str
    satisfied_edge: Optional[str] = None
    recorded_supports: frozenset[str] = frozenset()
    removed_edges: frozenset[str] = frozenset()
    state_version: int = 0

    @property
    def valid(self) -> bool:
        return self.verdict == VALID

    def with_version(self, version: int) -> "Decision":
        return dataclasses.replace(self, state_version=version)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "satisfied_edge": self.satisfied_edge,
            "recorded_supports": sorted(self.recorded_supports),
            "removed_edges": sorted(self.removed_edges),
            "state_version": self.state_version,
        }


def _check_revision(m: AppModel, td: TenantCustomization):
    if td.revision != m.revision or td.model_id != m.id:
        raise RevisionMismatch(f"customization targets {td.model_id}@{td.revision}, "
                               f"model is {m.id}@{m.revision}")


def add_component(m: AppModel, td: TenantCustomization, concern_id: str,
                  component_id: str) -> Decision:
    """Validate and apply an add; td is mutated only on a valid verdict.

    Incoming requirement edges are scanned AND-first, then by edge id; the
    first satisfied edge wins and is recorded together with its supports
    (the whole invertex for AND, the selected part for OR). A component with
    incoming edges and no satisfied one is rejected; one with no incoming
    edges is a free add. Re-adding is a valid no-op.
    """
    _check_revision(m, td)
    if not m.has_component(component_id):
        raise UnknownComponent(component_id)
    concern = m.concern(concern_id)  # raises UnknownConcern
    if component_id not in concern.components:
        raise ComponentNotInConcern(f"{component_id} not offered by {concern_id}")

    selection = td.selections.get(concern_id)
    if selection is not None and component_id in selection.components:
        return Decision(VALID, "AlreadyPresent")

    selected = td.selected_components
    incoming = concern.incoming(component_id)
    for e in incoming:
        if e.mode == MODE_AND:
            satisfied = e.invertex <= selected
            supports = e.invertex
        else:
            supports = e.invertex & selected
            satisfied = bool(supports)
        if satisfied:
            sel = td.selection(concern_id)
            sel.components.add(component_id)
            sel.components |= supports
            sel.edges.add(e.id)
            return Decision(VALID, "EdgeSatisfied", satisfied_edge=e.id,
                            recorded_supports=frozenset(supports))
    if incoming:
        return Decision(INVALID, "RequirementsUnsatisfied")
    td.selection(concern_id).components.add(component_id)
    return Decision(VALID, "FreeAdd")


def tenant_metagraph(m: AppModel, td: TenantCustomization) -> Metagraph:
    """The customization as a metagraph: selections as the generating set,
    recorded edges restricted to selected components."""
    selected = frozenset(td.selected_components)
    edges = []
    for edge_id in sorted(td.recorded_edges):
        e = m.requirement_edge(edge_id)
        if e is None:
            continue
        edges.append(Edge(e.id, e.invertex & selected, e.outvertex & selected))
    return new_metagraph(selected, [e for e in edges if e.invertex or e.outvertex])


def tenant_row(m: AppModel, td: TenantCustomization, x: str) -> dict[tuple[str, str], Cell]:
    return adjacency_row(tenant_metagraph(m, td), x)


def tenant_column(m: AppModel, td: TenantCustomization, x: str) -> dict[tuple[str, str], Cell]:
    return adjacency_column(tenant_metagraph(m, td), x)


def delete_component(m: AppModel, td: TenantCustomization, component_id: str) -> Decision:
    """Validate and apply a delete; td is mutated only on a valid verdict.

    The component's row in the tenant metagraph must be empty (it supports
    no recorded requirement). Recorded edges for which it is the last
    selected beneficiary (empty cooutput in its column) are dropped, then
    the component leaves every concern selection.
    """
    _check_revision(m, td)
    if component_id not in td.selected_components:
        raise ComponentNotPresent(component_id)

    if tenant_row(m, td, component_id):
        return Decision(INVALID, "RequiredByOthers")

    removed: set[str] = set()
    for cell in tenant_column(m, td, component_id).values():
        for triple in cell:
            if not triple.cooutput:
                removed.add(triple.path[0])
    for sel in td.selections.values():
        sel.edges -= removed
        sel.components.discard(component_id)
    for concern_id in [cid for cid, sel in td.selections.items() if sel.empty]:
        del td.selections[concern_id]
    return Decision(VALID, "Deleted", removed_edges=frozenset(removed))


def apply_operation(m: AppModel, td: TenantCustomization, op: dict) -> Decision:
    """Dispatch one wire-shaped operation dict.

    Reference errors come back as invalid decisions so a replay never
    aborts; a revision mismatch still raises (transport-level concern).
    """
    if not isinstance(op, dict) or op.get("op") not in ("add", "delete"):
        return Decision(INVALID, "MalformedOperation")
    component = op.get("component")
    if not isinstance(component, str) or not component:
        return Decision(INVALID, "MalformedOperation")
    if "revision" in op and op["revision"] != m.revision:
        raise RevisionMismatch(f"operation targets revision {op['revision']!r}")
    try:
        if op["op"] == "add":
            concern = op.get("concern")
            if not isinstance(concern, str) or not concern:
                return Decision(INVALID, "MalformedOperation")
            return add_component(m, td, concern, component)
        return delete_component(m, td, component)
    except RevisionMismatch:
        raise
    except CustweaveError as exc:
        return Decision(INVALID, exc.code)


@dataclass
class ReplayResult:
    final: TenantCustomization
    decisions: list[Decision]
    first_invalid: Optional[int]


def replay(m: AppModel, ops: list[dict], tenant: str = "default") -> ReplayResult:
    """Apply an operation sequence from the empty customization.

    Invalid operations leave the state untouched and are recorded in place;
    the replay itself never fails. Deterministic for identical inputs.
    """
    td = new_customization(m, tenant)
    decisions: list[Decision] = []
    first_invalid: Optional[int] = None
    version = 0
    for index, op in enumerate(ops):
        try:
            decision = apply_operation(m, td, op)
        except RevisionMismatch as exc:
            decision = Decision(INVALID, exc.code)
        if decision.valid:
            version += 1
        decision = decision.with_version(version)
        decisions.append(decision)
        if first_invalid is None and not decision.valid:
            first_invalid = index
    return ReplayResult(td, decisions, first_invalid)


class Session:
    """One tenant's live operation sequence against an immutable model."""

    def __init__(self, session_id: str, model: AppModel,
                 customization: Optional[TenantCustomization] = None):
        self.id = session_id
        self.model = model
        self.customization = customization if customization is not None \
            else new_customization(model)
        self.op_log: list[tuple[dict, Decision]] = []
        self.state_version = 0

    def apply(self, op: dict) -> Decision:
        decision = apply_operation(self.model, self.customization, op)
        if decision.valid:
            self.state_version += 1
        decision = decision.with_version(self.state_version)
        self.op_log.append((dict(op), decision))
        return decision


@dataclass
class OracleReport:
    valid: bool
    violations: list[str] = field(default_factory=list)


def oracle_valid(m: AppModel, td: TenantCustomization) -> OracleReport:
    """From-scratch validity check of a whole customization, no incremental state.

    A customization is valid when (1) it only references the model's concerns,
    components and edges, with per-concern containment; (2) every recorded
    edge is satisfied by the selected set (AND: whole invertex selected,
    OR: some invertex member selected) and actually requires something;
    (3) every selected component is justified by some concern selection where
    it either has no incoming requirement edges or benefits from a recorded
    edge; and (4) every recorded edge still has a selected beneficiary.
    """
    violations: list[str] = []
    if td.model_id != m.id or td.revision != m.revision:
        violations.append(
            f"customization targets {td.model_id}@{td.revision}, "
            f"model is {m.id}@{m.revision}"
        )
        return OracleReport(False, violations)

    selected = td.selected_components
    live = {cid: sel for cid, sel in sorted(td.selections.items()) if not sel.empty}

    for cid, sel in live.items():
        if not m.has_concern(cid):
            violations.append(f"unknown concern {cid}")
            continue
        concern = m.concern(cid)
        for x in sorted(sel.components - concern.components):
            violations.append(f"component {x} not offered by concern {cid}")
        own_edges = {e.id: e for e in concern.edges}
        for edge_id in sorted(sel.edges):
            e = own_edges.get(edge_id)
            if e is None:
                violations.append(f"edge {edge_id} not part of concern {cid}")
                continue
            if not e.invertex:
                violations.append(f"recorded edge {edge_id} has no requirement components")
            elif e.mode == MODE_AND:
                missing = sorted(e.invertex - selected)
                if missing:
                    violations.append(
                        f"recorded edge {edge_id} missing required components {missing}"
                    )
            elif not e.invertex & selected:
                violations.append(
                    f"recorded edge {edge_id} has no selected required component"
                )
            if not e.outvertex & selected:
                violations.append(f"recorded edge {edge_id} has no selected beneficiary")

    for x in sorted(selected):
        justified = False
        for cid, sel in live.items():
            if x not in sel.components or not m.has_concern(cid):
                continue
            concern = m.concern(cid)
            incoming = concern.incoming(x)
            if not incoming:
                justified = True
                break
            if any(eid in sel.edges for eid in (e.id for e in incoming)):
                justified = True
                break
        if not justified:
            violations.append(f"component {x} selected without a satisfied requirement")

    return OracleReport(not violations, violations)
