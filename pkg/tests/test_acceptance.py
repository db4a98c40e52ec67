"""Acceptance suite: every release criterion, one test and one printed line each.

Run with `pytest tests/test_acceptance.py -v` (add -s to watch the summary
lines stream).
"""

from __future__ import annotations

import csv
import random
import time
from pathlib import Path

import pytest
from click.testing import CliRunner

from custweave.cli import main as cli_main
from custweave.engine import apply_operation, oracle_valid, replay, tenant_row
from custweave.errors import ComponentNotPresent
from custweave.metagraph import Triple, build_adjacency, closure, is_metapath, is_simple_path
from custweave.model import ConcernSelection, new_customization
from custweave.model_io import (
    generate_model,
    load_customization,
    load_model,
    save_customization,
    save_model,
)
from oracles import add_should_succeed, enumerate_simple_paths, random_metagraph
from test_engine import random_ops, random_params

GOLDEN = Path(__file__).parent / "golden"


def report(name: str, passed: bool, extra: str = ""):
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {name}: {status}{' (' + extra + ')' if extra else ''}")
    assert passed, name


def t(ci, co, *path) -> Triple:
    return Triple(frozenset(ci), frozenset(co), tuple(path))


ADJACENCY_CELLS = {
    ("x1", "x3"): frozenset({t({"x2"}, {"x4"}, "e1")}),
    ("x1", "x4"): frozenset({t({"x2"}, {"x3"}, "e1")}),
    ("x2", "x3"): frozenset({t({"x1"}, {"x4"}, "e1")}),
    ("x2", "x4"): frozenset({t({"x1"}, {"x3"}, "e1")}),
    ("x2", "x5"): frozenset({t((), (), "e2")}),
    ("x4", "x6"): frozenset({t({"x5"}, (), "e3")}),
    ("x5", "x6"): frozenset({t({"x4"}, (), "e3")}),
}

CLOSURE_EXTRA_CELLS = {
    ("x1", "x6"): frozenset({t({"x2", "x5"}, {"x3", "x4"}, "e1", "e3")}),
    ("x2", "x6"): frozenset({
        t({"x1", "x5"}, {"x3", "x4"}, "e1", "e3"),
        t({"x4"}, {"x5"}, "e2", "e3"),
    }),
}


def test_criterion_adjacency_matrix_reproduction(chain6):
    best = min(
        _timed(lambda: build_adjacency(chain6))[0] for _ in range(5)
    )
    cells = dict(build_adjacency(chain6).cells)
    report(
        "adjacency matrix reproduction",
        cells == ADJACENCY_CELLS and best < 0.001,
        f"{len(cells)} cells in {best * 1e6:.0f}us",
    )


def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return time.perf_counter() - start, value


def test_criterion_closure_matrix_reproduction(chain6):
    expected = dict(ADJACENCY_CELLS)
    for key, extra in CLOSURE_EXTRA_CELLS.items():
        expected[key] = expected.get(key, frozenset()) | extra
    got = closure(chain6)
    two_into_x6 = {triple.coinput for triple in got.cell("x2", "x6")}
    report(
        "closure matrix reproduction",
        dict(got.cells) == expected
        and two_into_x6 == {frozenset({"x1", "x5"}), frozenset({"x4"})}
        and not got.truncated,
    )


def test_criterion_path_and_metapath_worked_examples(chain6):
    check = is_simple_path(chain6, ["e1", "e3"], "x2", "x6")
    report(
        "simple path and metapath worked examples",
        check.holds
        and check.coinput == {"x1", "x5"}
        and check.cooutput == {"x3", "x4"}
        and check.length == 2
        and is_metapath(chain6, {"e1", "e2", "e3"}, {"x1", "x2"}, {"x6"}),
    )


def test_criterion_closure_equals_bruteforce_enumeration():
    start = time.perf_counter()
    rng = random.Random(20260808)
    for _ in range(200):
        s = random_metagraph(rng, max_elements=8, max_edges=6)
        expected = {k: frozenset(v) for k, v in enumerate_simple_paths(s).items()}
        got = dict(closure(s).cells)
        assert got == expected, s
    elapsed = time.perf_counter() - start
    report("closure equals brute-force enumeration x200", elapsed < 10.0,
           f"{elapsed:.2f}s")


def test_criterion_algorithm_soundness_randomized():
    start = time.perf_counter()
    rng = random.Random(424242)
    pairs = 1000
    checked_ops = 0
    for _ in range(pairs):
        model = generate_model(random_params(rng, 50))
        td = new_customization(model)
        for op in random_ops(rng, model, rng.randint(20, 200)):
            checked_ops += 1
            decision = apply_operation(model, td, op)
            if decision.valid:
                result = oracle_valid(model, td)
                assert result.valid, (op, result.violations)
            elif decision.reason == "RequirementsUnsatisfied":
                concern = model.concern(op["concern"])
                assert not add_should_succeed(
                    concern, td.selected_components, op["component"])
            elif decision.reason == "RequiredByOthers":
                assert tenant_row(model, td, op["component"])
            elif decision.reason == "ComponentNotPresent":
                assert op["component"] not in td.selected_components
    elapsed = time.perf_counter() - start
    report("algorithm soundness on 1000 random op sequences",
           elapsed < 60.0, f"{checked_ops} ops in {elapsed:.2f}s")


def test_criterion_replay_determinism(sec_model):
    rng = random.Random(99)
    model = generate_model(random_params(rng, 40))
    ops = random_ops(rng, model, 150)
    first = replay(model, ops)
    second = replay(model, ops)
    report(
        "replay determinism",
        [d.to_dict() for d in first.decisions] == [d.to_dict() for d in second.decisions]
        and save_customization(first.final) == save_customization(second.final),
    )


@pytest.mark.slow
def test_criterion_benchmark_shape(tmp_path):
    runner = CliRunner()
    csv_path = tmp_path / "bench.csv"
    sizes = [100, 200, 300, 400, 500, 600, 700, 800, 900, 1000]
    start = time.perf_counter()
    result = runner.invoke(cli_main, [
        "bench",
        "--sizes", ",".join(str(s) for s in sizes),
        "--concurrency", "1,2,4,8,16",
        "--ops", "1000",
        "--size", "500",
        "--seed", "1",
        "--csv", str(csv_path),
    ], catch_exceptions=False)
    elapsed = time.perf_counter() - start

    with csv_path.open() as fh:
        rows = list(csv.DictReader(fh))
    size_rows = [r for r in rows if r["concurrency"] == "1" and int(r["model_size"]) in sizes]
    concurrency_rows = [r for r in rows if r["concurrency"] != "1"]
    medians_reported = result.output.count("median=")
    report(
        "benchmark shape (sizes and concurrency)",
        result.exit_code == 0
        and len(rows) == 15000
        and len(size_rows) >= 10000
        and len(concurrency_rows) == 4000
        and medians_reported == 15
        and (tmp_path / "bench_sizes.png").exists()
        and (tmp_path / "bench_concurrency.png").exists()
        and elapsed < 300.0,
        f"{len(rows)} rows in {elapsed:.1f}s",
    )


def test_criterion_document_round_trips(sec_model):
    stable = True
    for name in ("pipeline_model.json", "security_model.json"):
        data = (GOLDEN / name).read_bytes()
        stable = stable and save_model(load_model(data)) == data
    customization = (GOLDEN / "sec_final.json").read_bytes()
    stable = stable and save_customization(
        load_customization(customization, sec_model)) == customization
    # a generated model and a replayed customization round-trip the same way
    model = generate_model(random_params(random.Random(5), 30))
    model_bytes = save_model(model)
    stable = stable and save_model(load_model(model_bytes)) == model_bytes
    report("document round-trips are byte-stable", stable)
