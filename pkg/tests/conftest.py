from __future__ import annotations

import json

import pytest

from custweave.metagraph import Metagraph, edge, new_metagraph
from custweave.model import AppModel
from custweave.model_io import load_model


@pytest.fixture
def chain6() -> Metagraph:
    """Six elements, three edges; the standard worked example everywhere."""
    return new_metagraph(
        {"x1", "x2", "x3", "x4", "x5", "x6"},
        [
            edge("e1", {"x1", "x2"}, {"x3", "x4"}),
            edge("e2", {"x2"}, {"x5"}),
            edge("e3", {"x4", "x5"}, {"x6"}),
        ],
    )


def chain6_model_doc() -> dict:
    """The six-element example wrapped as a one-concern, one-dimension model."""
    return {
        "format_version": 1,
        "id": "pipeline",
        "revision": "rev1",
        "customization_points": [
            {"id": "cp1", "name": "stage one", "components": ["x1", "x2", "x3"]},
            {"id": "cp2", "name": "stage two", "components": ["x4", "x5", "x6"]},
        ],
        "components": [
            {"id": f"x{i}", "point": "cp1" if i <= 3 else "cp2", "label": f"unit {i}"}
            for i in range(1, 7)
        ],
        "dimensions": [
            {
                "id": "flow",
                "name": "flow",
                "concerns": [
                    {
                        "id": "core",
                        "name": "core",
                        "components": ["x1", "x2", "x3", "x4", "x5", "x6"],
                        "edges": [
                            {"id": "e1", "invertex": ["x1", "x2"],
                             "outvertex": ["x3", "x4"], "mode": "or"},
                            {"id": "e2", "invertex": ["x2"],
                             "outvertex": ["x5"], "mode": "or"},
                            {"id": "e3", "invertex": ["x4", "x5"],
                             "outvertex": ["x6"], "mode": "or"},
                        ],
                    }
                ],
            }
        ],
    }


def sec_model_doc() -> dict:
    """Five components under one security concern with two AND requirements."""
    return {
        "format_version": 1,
        "id": "secapp",
        "revision": "rev1",
        "customization_points": [
            {"id": "auth", "name": "authentication",
             "components": ["x1", "x2", "x3", "x4", "x5"]},
        ],
        "components": [
            {"id": f"x{i}", "point": "auth", "label": f"feature {i}"}
            for i in range(1, 6)
        ],
        "dimensions": [
            {
                "id": "security",
                "name": "security",
                "concerns": [
                    {
                        "id": "SEC",
                        "name": "hardening",
                        "components": ["x1", "x2", "x3", "x4", "x5"],
                        "edges": [
                            {"id": "eA", "invertex": ["x1", "x2"],
                             "outvertex": ["x4"], "mode": "and"},
                            {"id": "eB", "invertex": ["x2", "x3"],
                             "outvertex": ["x5"], "mode": "and"},
                        ],
                    }
                ],
            }
        ],
    }


@pytest.fixture
def chain6_model() -> AppModel:
    return load_model(json.dumps(chain6_model_doc()))


@pytest.fixture
def sec_model() -> AppModel:
    return load_model(json.dumps(sec_model_doc()))
