"""Document serialization and the seeded benchmark-model generator.

Model and customization documents are JSON (format_version 1). Saving is
canonical (sorted keys, sorted id arrays, two-space indent, trailing
newline), so equal values always produce identical bytes and golden tests
can compare byte-for-byte. None concerns are derived on load and omitted on
save; the reserved invertex token "and" marks an AND edge on import and is
never a component id.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Optional, Union

from .errors import (
    CustomizationInvalid,
    InfeasibleParams,
    ModelInvalid,
    ParseError,
    RevisionMismatch,
    SchemaError,
)
from .metagraph import TripleMatrix
from .model import (
    MODE_AND,
    MODE_OR,
    AppModel,
    Component,
    Concern,
    ConcernSelection,
    CustomizationPoint,
    Dimension,
    RequirementEdge,
    TenantCustomization,
    derive_none_concerns,
    validate_model,
)

FORMAT_VERSION = 1
AND_MARKER = "and"

BENCH_CSV_HEADER = "run,model_size,op,concurrency,latency_us"


def canonical_json(payload) -> bytes:
    """Stable bytes for any JSON-serializable payload."""
    return (json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode()


def _parse(data: Union[bytes, str]) -> dict:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("document root must be an object")
    return doc


def _require(doc: dict, where: str, fields: dict[str, type], optional: dict[str, type] = {}):
    for name, kind in fields.items():
        if name not in doc:
            raise SchemaError(f"{where}: missing required field {name!r}")
        if not isinstance(doc[name], kind):
            raise SchemaError(f"{where}: field {name!r} must be {kind.__name__}")
    for name in doc:
        if name not in fields and name not in optional:
            raise SchemaError(f"{where}: unknown field {name!r}")
        if name in optional and doc[name] is not None and not isinstance(doc[name], optional[name]):
            raise SchemaError(f"{where}: field {name!r} must be {optional[name].__name__}")


def _id_list(value, where: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise SchemaError(f"{where}: expected a list of id strings")
    return value


def _check_version(doc: dict):
    if doc.get("format_version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {doc.get('format_version')!r}")


def load_model(data: Union[bytes, str]) -> AppModel:
    """Parse, normalize and validate a model document.

    Raises ParseError for bad JSON, SchemaError for structural problems
    (unknown fields, missing fields, unknown references, the "and" token as
    a component id), and ModelInvalid with the well-formedness report when
    the parsed model violates a model invariant.
    """
    doc = _parse(data)
    _require(doc, "model", {
        "format_version": int, "id": str, "revision": str,
        "customization_points": list, "components": list, "dimensions": list,
    })
    _check_version(doc)

    points: dict[str, CustomizationPoint] = {}
    declared_members: dict[str, list[str]] = {}
    for raw in doc["customization_points"]:
        _require(raw, "customization point", {"id": str, "name": str, "components": list})
        if raw["id"] in points:
            raise SchemaError(f"duplicate customization point {raw['id']!r}")
        members = _id_list(raw["components"], f"point {raw['id']}")
        declared_members[raw["id"]] = members
        points[raw["id"]] = CustomizationPoint(raw["id"], raw["name"], frozenset(members))

    components: dict[str, Component] = {}
    for raw in doc["components"]:
        _require(raw, "component", {"id": str, "point": str},
                 {"label": str, "description": str})
        cid = raw["id"]
        if cid == AND_MARKER:
            raise SchemaError(f"{AND_MARKER!r} is reserved and cannot be a component id")
        if cid in components:
            raise SchemaError(f"duplicate component {cid!r}")
        if raw["point"] not in points:
            raise SchemaError(f"component {cid}: unknown customization point {raw['point']!r}")
        components[cid] = Component(cid, raw["point"], raw.get("label", ""),
                                    raw.get("description"))

    for pid, members in declared_members.items():
        for cid in members:
            if cid not in components:
                raise SchemaError(f"point {pid}: unknown component {cid!r}")
            if components[cid].point != pid:
                raise SchemaError(f"point {pid}: component {cid} declares point "
                                  f"{components[cid].point!r}")
    for comp in components.values():
        if comp.id not in declared_members[comp.point]:
            raise SchemaError(f"point {comp.point}: missing component {comp.id}")

    dimensions: list[Dimension] = []
    seen_dims: set[str] = set()
    for raw_dim in doc["dimensions"]:
        _require(raw_dim, "dimension", {"id": str, "name": str, "concerns": list})
        if raw_dim["id"] in seen_dims:
            raise SchemaError(f"duplicate dimension {raw_dim['id']!r}")
        seen_dims.add(raw_dim["id"])
        concerns = []
        for raw_cn in raw_dim["concerns"]:
            _require(raw_cn, "concern", {"id": str, "name": str, "components": list},
                     {"edges": list})
            members = _id_list(raw_cn["components"], f"concern {raw_cn['id']}")
            for cid in members:
                if cid not in components:
                    raise SchemaError(f"concern {raw_cn['id']}: unknown component {cid!r}")
            edges = []
            seen_edges: set[str] = set()
            for raw_edge in raw_cn.get("edges", []):
                edges.append(_load_edge(raw_edge, raw_cn["id"], components))
                if edges[-1].id in seen_edges:
                    raise SchemaError(f"concern {raw_cn['id']}: duplicate edge "
                                      f"{edges[-1].id!r}")
                seen_edges.add(edges[-1].id)
            concerns.append(Concern(raw_cn["id"], raw_cn["name"],
                                    frozenset(members), tuple(edges)))
        dimensions.append(Dimension(raw_dim["id"], raw_dim["name"], tuple(concerns)))

    model = AppModel(doc["id"], doc["revision"], tuple(points.values()),
                     tuple(components.values()), tuple(dimensions))
    model = derive_none_concerns(model)
    report = validate_model(model)
    if not report.ok:
        raise ModelInvalid(report)
    return model


def _load_edge(raw, concern_id: str, components: dict) -> RequirementEdge:
    _require(raw, f"edge in concern {concern_id}",
             {"id": str, "invertex": list, "outvertex": list}, {"mode": str})
    invertex = _id_list(raw["invertex"], f"edge {raw['id']}")
    outvertex = _id_list(raw["outvertex"], f"edge {raw['id']}")
    mode = raw.get("mode", MODE_OR)
    if mode not in (MODE_AND, MODE_OR):
        raise SchemaError(f"edge {raw['id']}: mode must be '{MODE_AND}' or '{MODE_OR}'")
    if AND_MARKER in invertex:
        # Literal marker encoding of a conjunctive requirement.
        invertex = [x for x in invertex if x != AND_MARKER]
        mode = MODE_AND
    if AND_MARKER in outvertex:
        raise SchemaError(f"edge {raw['id']}: {AND_MARKER!r} marker only valid in invertex")
    for x in invertex + outvertex:
        if x not in components:
            raise SchemaError(f"edge {raw['id']}: unknown component {x!r}")
    return RequirementEdge(raw["id"], frozenset(invertex), frozenset(outvertex), mode)


def save_model(m: AppModel) -> bytes:
    """Canonical model document bytes; None concerns are left implicit."""
    doc = {
        "format_version": FORMAT_VERSION,
        "id": m.id,
        "revision": m.revision,
        "customization_points": [
            {"id": p.id, "name": p.name, "components": sorted(p.components)}
            for p in m.customization_points
        ],
        "components": [_component_doc(c) for c in m.components],
        "dimensions": [
            {
                "id": d.id,
                "name": d.name,
                "concerns": [
                    {
                        "id": cn.id,
                        "name": cn.name,
                        "components": sorted(cn.components),
                        "edges": [
                            {
                                "id": e.id,
                                "invertex": sorted(e.invertex),
                                "outvertex": sorted(e.outvertex),
                                "mode": e.mode,
                            }
                            for e in cn.edges
                        ],
                    }
                    for cn in d.concerns
                    if cn.id != d.none_concern
                ],
            }
            for d in m.dimensions
        ],
    }
    return canonical_json(doc)


def _component_doc(c: Component) -> dict:
    doc = {"id": c.id, "point": c.point, "label": c.label}
    if c.description is not None:
        doc["description"] = c.description
    return doc


def load_customization(data: Union[bytes, str], m: AppModel) -> TenantCustomization:
    """Parse a customization document and check it against the model.

    The document must target the model's id and revision (RevisionMismatch
    otherwise) and must pass the from-scratch oracle (CustomizationInvalid
    with the oracle's violations otherwise).
    """
    from .engine import oracle_valid

    doc = _parse(data)
    _require(doc, "customization", {
        "format_version": int, "model": str, "revision": str,
        "tenant": str, "concerns": list,
    })
    _check_version(doc)
    if doc["model"] != m.id or doc["revision"] != m.revision:
        raise RevisionMismatch(
            f"document targets {doc['model']}@{doc['revision']}, "
            f"model is {m.id}@{m.revision}"
        )
    selections: dict[str, ConcernSelection] = {}
    for raw in doc["concerns"]:
        _require(raw, "concern selection", {"id": str}, {"components": list, "edges": list})
        if raw["id"] in selections:
            raise SchemaError(f"duplicate concern selection {raw['id']!r}")
        selections[raw["id"]] = ConcernSelection(
            set(_id_list(raw.get("components", []), f"selection {raw['id']}")),
            set(_id_list(raw.get("edges", []), f"selection {raw['id']}")),
        )
    td = TenantCustomization(doc["tenant"], doc["model"], doc["revision"], selections)
    report = oracle_valid(m, td)
    if not report.valid:
        raise CustomizationInvalid(report.violations)
    return td


def save_customization(td: TenantCustomization) -> bytes:
    """Canonical customization document bytes; empty selections are omitted."""
    doc = {
        "format_version": FORMAT_VERSION,
        "model": td.model_id,
        "revision": td.revision,
        "tenant": td.tenant,
        "concerns": [
            {
                "id": cid,
                "components": sorted(sel.components),
                "edges": sorted(sel.edges),
            }
            for cid, sel in sorted(td.selections.items())
            if not sel.empty
        ],
    }
    return canonical_json(doc)


def matrix_records(matrix: TripleMatrix) -> list[dict]:
    """Triples of a matrix as plain dicts in deterministic cell order."""
    return [
        {
            "source": source,
            "target": target,
            "coinput": sorted(triple.coinput),
            "cooutput": sorted(triple.cooutput),
            "path": list(triple.path),
            "length": triple.length,
        }
        for source, target, triple in matrix.iter_triples()
    ]


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs for the random benchmark models; same seed, same model."""

    components: int
    customization_points: int = 4
    dimensions: int = 3
    concerns_per_dimension: int = 4
    edge_density: float = 0.3
    and_ratio: float = 0.5
    max_invertex: int = 3
    seed: int = 0


def generate_model(p: GeneratorParams) -> AppModel:
    """Deterministic random model: round-robin points, per-dimension random
    partition into concerns, edges drawn over a random topological order so
    every concern metagraph is acyclic."""
    if min(p.components, p.customization_points, p.dimensions,
           p.concerns_per_dimension, p.max_invertex) < 1:
        raise InfeasibleParams("all counts must be at least 1")
    if not (0.0 <= p.edge_density <= 1.0 and 0.0 <= p.and_ratio <= 1.0):
        raise InfeasibleParams("edge_density and and_ratio must be in [0, 1]")
    if p.components < p.dimensions * p.concerns_per_dimension:
        raise InfeasibleParams(
            f"{p.components} components cannot seed "
            f"{p.dimensions} x {p.concerns_per_dimension} concerns"
        )

    rng = random.Random(p.seed)
    width = max(3, len(str(p.components)))
    component_ids = [f"c{i:0{width}d}" for i in range(1, p.components + 1)]
    point_ids = [f"cp{i:02d}" for i in range(1, p.customization_points + 1)]

    by_point: dict[str, list[str]] = {pid: [] for pid in point_ids}
    components = []
    for i, cid in enumerate(component_ids):
        pid = point_ids[i % len(point_ids)]
        by_point[pid].append(cid)
        components.append(Component(cid, pid, f"component {i + 1}"))
    points = [CustomizationPoint(pid, f"point {pid[2:]}", frozenset(members))
              for pid, members in by_point.items()]

    dimensions = []
    edge_seq = 0
    for d in range(1, p.dimensions + 1):
        dim_id = f"d{d:02d}"
        shuffled = rng.sample(component_ids, len(component_ids))
        buckets: list[list[str]] = [[] for _ in range(p.concerns_per_dimension)]
        for k in range(p.concerns_per_dimension):
            buckets[k].append(shuffled[k])
        for cid in shuffled[p.concerns_per_dimension:]:
            slot = rng.randrange(p.concerns_per_dimension + 1)
            if slot < p.concerns_per_dimension:
                buckets[slot].append(cid)
        concerns = []
        for k, members in enumerate(buckets, start=1):
            order = rng.sample(members, len(members))
            edges = []
            for i in range(1, len(order)):
                if rng.random() >= p.edge_density:
                    continue
                size = rng.randint(1, min(p.max_invertex, i))
                invertex = rng.sample(order[:i], size)
                mode = MODE_AND if rng.random() < p.and_ratio else MODE_OR
                edge_seq += 1
                edges.append(RequirementEdge(
                    f"e{edge_seq:05d}", frozenset(invertex),
                    frozenset([order[i]]), mode,
                ))
            concerns.append(Concern(f"{dim_id}.cn{k:02d}", f"concern {k}",
                                    frozenset(members), tuple(edges)))
        dimensions.append(Dimension(dim_id, f"dimension {d}", tuple(concerns)))

    model = AppModel(
        f"bench-{p.components}c-s{p.seed}",
        f"r{p.seed}.{p.components}",
        tuple(points),
        tuple(components),
        tuple(dimensions),
    )
    return derive_none_concerns(model)
