from __future__ import annotations

import json
import random

import pytest

from custweave.errors import (
    CustomizationInvalid,
    InfeasibleParams,
    ModelInvalid,
    ParseError,
    RevisionMismatch,
    SchemaError,
)
from custweave.engine import replay
from custweave.metagraph import build_adjacency
from custweave.model import app_metagraph, validate_model
from custweave.model_io import (
    GeneratorParams,
    generate_model,
    load_customization,
    load_model,
    matrix_records,
    save_customization,
    save_model,
)
from conftest import chain6_model_doc, sec_model_doc


def doc_bytes(doc: dict) -> bytes:
    return json.dumps(doc).encode()


class TestLoadModel:
    def test_worked_example_loads(self, chain6_model, chain6):
        assert app_metagraph(chain6_model) == chain6
        assert build_adjacency(app_metagraph(chain6_model)).triple_count() == 7

    def test_parse_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            load_model(b'{"format_version": 1,')
        assert "line" in str(err.value)

    def test_not_utf8(self):
        with pytest.raises(ParseError):
            load_model(b"\xff\xfe\x00!")

    def test_unknown_top_level_field(self):
        doc = chain6_model_doc()
        doc["zap"] = 1
        with pytest.raises(SchemaError):
            load_model(doc_bytes(doc))

    def test_missing_required_field(self):
        doc = chain6_model_doc()
        del doc["revision"]
        with pytest.raises(SchemaError):
            load_model(doc_bytes(doc))

    def test_wrong_format_version(self):
        doc = chain6_model_doc()
        doc["format_version"] = 2
        with pytest.raises(SchemaError):
            load_model(doc_bytes(doc))

    def test_edge_referencing_unknown_component(self):
        doc = chain6_model_doc()
        doc["dimensions"][0]["concerns"][0]["edges"][0]["invertex"] = ["ghost"]
        with pytest.raises(SchemaError):
            load_model(doc_bytes(doc))

    def test_and_forbidden_as_component_id(self):
        doc = chain6_model_doc()
        doc["components"].append({"id": "and", "point": "cp1", "label": "and"})
        doc["customization_points"][0]["components"].append("and")
        with pytest.raises(SchemaError):
            load_model(doc_bytes(doc))

    def test_point_component_cross_check(self):
        doc = chain6_model_doc()
        doc["customization_points"][0]["components"].remove("x1")
        with pytest.raises(SchemaError):
            load_model(doc_bytes(doc))

    def test_invalid_model_embeds_report(self):
        doc = chain6_model_doc()
        concern = doc["dimensions"][0]["concerns"][0]
        doc["dimensions"][0]["concerns"].append(
            {"id": "dup", "name": "dup", "components": concern["components"], "edges": []}
        )
        with pytest.raises(ModelInvalid) as err:
            load_model(doc_bytes(doc))
        assert "OverlappingConcerns" in err.value.report.codes()

    def test_and_marker_normalized(self):
        doc = sec_model_doc()
        edges = doc["dimensions"][0]["concerns"][0]["edges"]
        edges[0] = {"id": "eA", "invertex": ["and", "x1", "x2"], "outvertex": ["x4"]}
        m = load_model(doc_bytes(doc))
        edge = m.concern("SEC").edges[0]
        assert edge.id == "eA"
        assert edge.mode == "and"
        assert edge.invertex == {"x1", "x2"}
        saved = json.loads(save_model(m))
        saved_edge = saved["dimensions"][0]["concerns"][0]["edges"][0]
        assert saved_edge["mode"] == "and"
        assert "and" not in saved_edge["invertex"]

    def test_and_marker_in_outvertex_rejected(self):
        doc = sec_model_doc()
        doc["dimensions"][0]["concerns"][0]["edges"][0]["outvertex"] = ["and", "x4"]
        with pytest.raises(SchemaError):
            load_model(doc_bytes(doc))


class TestModelRoundTrip:
    @pytest.mark.parametrize("doc_fn", [chain6_model_doc, sec_model_doc])
    def test_save_load_save_is_stable(self, doc_fn):
        first = save_model(load_model(doc_bytes(doc_fn())))
        assert save_model(load_model(first)) == first

    def test_parse_of_serialize_equals_value(self, chain6_model):
        assert load_model(save_model(chain6_model)) == chain6_model

    def test_none_concerns_omitted(self, chain6_model):
        raw = json.loads(save_model(chain6_model))
        ids = [cn["id"] for d in raw["dimensions"] for cn in d["concerns"]]
        assert ids == ["core"]


class TestCustomizationDocuments:
    def test_round_trip(self, sec_model):
        ops = [{"op": "add", "component": c, "concern": "SEC"} for c in ("x1", "x2", "x4")]
        td = replay(sec_model, ops).final
        data = save_customization(td)
        loaded = load_customization(data, sec_model)
        assert loaded == td
        assert save_customization(loaded) == data

    def test_empty_document(self, sec_model):
        doc = {
            "format_version": 1, "model": "secapp", "revision": "rev1",
            "tenant": "t", "concerns": [],
        }
        td = load_customization(doc_bytes(doc), sec_model)
        assert td.selected_components == set()

    def test_edge_without_supports_rejected(self, sec_model):
        doc = {
            "format_version": 1, "model": "secapp", "revision": "rev1",
            "tenant": "t",
            "concerns": [{"id": "SEC", "components": ["x4"], "edges": ["eA"]}],
        }
        with pytest.raises(CustomizationInvalid) as err:
            load_customization(doc_bytes(doc), sec_model)
        assert any("eA" in v for v in err.value.violations)

    def test_revision_mismatch(self, sec_model):
        doc = {
            "format_version": 1, "model": "secapp", "revision": "other",
            "tenant": "t", "concerns": [],
        }
        with pytest.raises(RevisionMismatch):
            load_customization(doc_bytes(doc), sec_model)

    def test_parse_error(self, sec_model):
        with pytest.raises(ParseError):
            load_customization(b"{", sec_model)


def _assert_acyclic(concern):
    """Kahn's algorithm over the component dependency graph of one concern."""
    successors: dict[str, set[str]] = {c: set() for c in concern.components}
    indegree: dict[str, int] = {c: 0 for c in concern.components}
    for e in concern.edges:
        for src in e.invertex:
            for dst in e.outvertex:
                if dst not in successors[src]:
                    successors[src].add(dst)
                    indegree[dst] += 1
    queue = [c for c, deg in indegree.items() if deg == 0]
    visited = 0
    while queue:
        current = queue.pop()
        visited += 1
        for nxt in successors[current]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                queue.append(nxt)
    assert visited == len(concern.components), f"cycle in concern {concern.id}"


class TestGenerator:
    def test_deterministic(self):
        p = GeneratorParams(components=40, seed=99)
        assert save_model(generate_model(p)) == save_model(generate_model(p))

    def test_generated_models_are_well_formed(self):
        rng = random.Random(61)
        for _ in range(20):
            dims = rng.randint(1, 3)
            cpd = rng.randint(1, 4)
            p = GeneratorParams(
                components=rng.randint(dims * cpd, 60),
                customization_points=rng.randint(1, 5),
                dimensions=dims,
                concerns_per_dimension=cpd,
                edge_density=rng.random(),
                and_ratio=rng.random(),
                max_invertex=rng.randint(1, 4),
                seed=rng.randrange(2**32),
            )
            m = generate_model(p)
            assert validate_model(m).ok
            for dim in m.dimensions:
                for cn in dim.concerns:
                    _assert_acyclic(cn)
                for c in m.component_ids:
                    assert sum(1 for cn in dim.concerns if c in cn.components) == 1

    def test_infeasible(self):
        with pytest.raises(InfeasibleParams):
            generate_model(GeneratorParams(components=3, dimensions=2,
                                           concerns_per_dimension=4))
        with pytest.raises(InfeasibleParams):
            generate_model(GeneratorParams(components=0))
        with pytest.raises(InfeasibleParams):
            generate_model(GeneratorParams(components=10, edge_density=1.5))

    def test_zero_density_means_edgeless(self):
        m = generate_model(GeneratorParams(components=30, edge_density=0.0, seed=5))
        assert all(cn.edges == () for d in m.dimensions for cn in d.concerns)

    def test_round_trip(self):
        m = generate_model(GeneratorParams(components=25, seed=3))
        assert load_model(save_model(m)) == m


class TestMatrixRecords:
    def test_deterministic_order(self, chain6):
        records = matrix_records(build_adjacency(chain6))
        assert [(r["source"], r["target"]) for r in records] == [
            ("x1", "x3"), ("x1", "x4"), ("x2", "x3"), ("x2", "x4"),
            ("x2", "x5"), ("x4", "x6"), ("x5", "x6"),
        ]
        assert records[0]["coinput"] == ["x2"]
        assert matrix_records(build_adjacency(chain6)) == records
