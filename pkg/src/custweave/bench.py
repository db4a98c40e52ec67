"""Benchmark harness: operation latency vs model size and vs concurrency.

The workload is valid-biased: roughly 80% adds whose requirements are
already satisfiable and 20% deletes of currently free components, falling
back to the other kind when one is unavailable, so a healthy run produces
zero invalid decisions. Size mode applies operations in-process; concurrency
mode starts the HTTP service in a background thread and drives it from
parallel clients over independent sessions, each client checking every
response against its own serial replay. Closure precomputation is timed
separately and never counts towards operation latency.
"""

from __future__ import annotations

import json
import random
import statistics
import time
from dataclasses import dataclass, field
from typing import Optional

import httpx

from .engine import Session, apply_operation
from .metagraph import closure
from .model import AppModel, new_customization
from .model_io import BENCH_CSV_HEADER, GeneratorParams, generate_model, save_model
from .service import ServiceThread

ADD_FRACTION = 0.8


@dataclass(frozen=True)
class BenchRow:
    run: int
    model_size: int
    op: str
    concurrency: int
    latency_us: int

    def csv(self) -> str:
        return f"{self.run},{self.model_size},{self.op},{self.concurrency},{self.latency_us}"


@dataclass
class GroupSummary:
    model_size: int
    concurrency: int
    count: int
    median_us: float
    p95_us: float
    mean_us: float

    def line(self) -> str:
        return (
            f"size={self.model_size} concurrency={self.concurrency} "
            f"ops={self.count} median={self.median_us:.1f}us "
            f"p95={self.p95_us:.1f}us mean={self.mean_us:.1f}us"
        )


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    closure_seconds: dict[int, float] = field(default_factory=dict)

    def summaries(self) -> list[GroupSummary]:
        groups: dict[tuple[int, int], list[int]] = {}
        for row in self.rows:
            groups.setdefault((row.model_size, row.concurrency), []).append(row.latency_us)
        out = []
        for (size, concurrency), values in sorted(groups.items()):
            ordered = sorted(values)
            p95 = ordered[int(0.95 * (len(ordered) - 1))]
            out.append(GroupSummary(size, concurrency, len(values),
                                    statistics.median(ordered), float(p95),
                                    statistics.fmean(ordered)))
        return out

    def write_csv(self, path: str):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(BENCH_CSV_HEADER + "\n")
            for row in self.rows:
                fh.write(row.csv() + "\n")


class Workload:
    """Seed-deterministic stream of operations that are valid by construction."""

    def __init__(self, model: AppModel, seed: int):
        self.model = model
        self.rng = random.Random(seed)
        self.td = new_customization(model)
        self.pairs = [
            (cn.id, component)
            for dim in model.dimensions
            for cn in dim.concerns
            for component in sorted(cn.components)
        ]
        self.incoming = {
            (cn.id, component): cn.incoming(component)
            for dim in model.dimensions
            for cn in dim.concerns
            for component in cn.components
        }

    def _addable(self, concern_id: str, component: str, selected: set[str]) -> bool:
        sel = self.td.selections.get(concern_id)
        if sel is not None and component in sel.components:
            return False
        incoming = self.incoming[(concern_id, component)]
        if not incoming:
            return True
        for e in incoming:
            if e.mode == "and" and e.invertex <= selected:
                return True
            if e.mode != "and" and e.invertex & selected:
                return True
        return False

    def _deletable(self, component: str, selected: set[str]) -> bool:
        for edge_id in self.td.recorded_edges:
            e = self.model.requirement_edge(edge_id)
            if component in e.invertex and e.outvertex & selected:
                return False
        return True

    def _pick_add(self, selected: set[str]) -> Optional[dict]:
        for _ in range(24):
            concern_id, component = self.rng.choice(self.pairs)
            if self._addable(concern_id, component, selected):
                return {"op": "add", "component": component, "concern": concern_id}
        for concern_id, component in self.pairs:
            if self._addable(concern_id, component, selected):
                return {"op": "add", "component": component, "concern": concern_id}
        return None

    def _pick_delete(self, selected: set[str]) -> Optional[dict]:
        if not selected:
            return None
        pool = sorted(selected)
        for _ in range(24):
            component = self.rng.choice(pool)
            if self._deletable(component, selected):
                return {"op": "delete", "component": component}
        for component in pool:
            if self._deletable(component, selected):
                return {"op": "delete", "component": component}
        return None

    def next_op(self) -> dict:
        selected = self.td.selected_components
        if self.rng.random() < ADD_FRACTION:
            op = self._pick_add(selected) or self._pick_delete(selected)
        else:
            op = self._pick_delete(selected) or self._pick_add(selected)
        if op is None:
            raise RuntimeError("workload exhausted: nothing addable or deletable")
        return op

    def apply_local(self, op: dict):
        return apply_operation(self.model, self.td, op)


def bench_params(size: int, seed: int) -> GeneratorParams:
    return GeneratorParams(
        components=size,
        customization_points=max(1, size // 25),
        dimensions=3,
        concerns_per_dimension=4,
        edge_density=0.3,
        and_ratio=0.5,
        max_invertex=3,
        seed=seed,
    )


def _time_closures(model: AppModel) -> float:
    start = time.perf_counter()
    for dim in model.dimensions:
        for cn in dim.concerns:
            closure(cn.metagraph())
    return time.perf_counter() - start


def bench_sizes(sizes: list[int], ops: int, seed: int) -> BenchReport:
    """In-process operation latency for one tenant per model size."""
    report = BenchReport()
    for run, size in enumerate(sizes):
        model = generate_model(bench_params(size, seed))
        report.closure_seconds[size] = _time_closures(model)
        workload = Workload(model, seed + run)
        for _ in range(ops):
            op = workload.next_op()
            start = time.perf_counter_ns()
            decision = workload.apply_local(op)
            elapsed = (time.perf_counter_ns() - start) // 1000
            if not decision.valid:
                report.failures.append(f"size {size}: {op} -> {decision.reason}")
            report.rows.append(BenchRow(run, size, op["op"], 1, elapsed))
    return report


def _concurrency_client(base_url: str, session_id: str, model: AppModel,
                        seed: int, count: int, run: int, level: int,
                        report: BenchReport, lock) -> None:
    workload = Workload(model, seed)
    mirror = Session(session_id, model, workload.td)  # shares the workload state
    rows: list[BenchRow] = []
    failures: list[str] = []
    with httpx.Client(base_url=base_url, timeout=60) as client:
        for _ in range(count):
            op = workload.next_op()
            expected = mirror.apply(op)
            start = time.perf_counter_ns()
            response = client.post(f"/v1/sessions/{session_id}/ops",
                                   content=json.dumps(op))
            elapsed = (time.perf_counter_ns() - start) // 1000
            rows.append(BenchRow(run, len(model.components), op["op"], level, elapsed))
            if response.status_code != 200:
                failures.append(f"HTTP {response.status_code}: {response.text}")
            elif response.json() != expected.to_dict():
                failures.append(
                    f"decision drift for {op}: {response.text} != {expected.to_dict()}"
                )
    with lock:
        report.rows.extend(rows)
        report.failures.extend(failures)


def bench_concurrency(levels: list[int], ops: int, seed: int,
                      size: int = 500) -> BenchReport:
    """Service-backed latency with parallel clients on independent sessions."""
    import threading

    report = BenchReport()
    model = generate_model(bench_params(size, seed))
    lock = threading.Lock()
    with ServiceThread() as svc:
        with httpx.Client(base_url=svc.base_url, timeout=60) as client:
            response = client.post("/v1/models", content=save_model(model))
            if response.status_code != 201:
                report.failures.append(f"model upload failed: {response.text}")
                return report
            for run, level in enumerate(levels):
                session_ids = []
                for _ in range(level):
                    created = client.post(f"/v1/models/{model.id}/sessions")
                    session_ids.append(created.json()["id"])
                share = [ops // level + (1 if i < ops % level else 0)
                         for i in range(level)]
                threads = [
                    threading.Thread(
                        target=_concurrency_client,
                        args=(svc.base_url, sid, model, seed * 1000 + run * 100 + i,
                              share[i], run, level, report, lock),
                    )
                    for i, sid in enumerate(session_ids)
                ]
                for t in threads:
                    t.start()
                for t in threads:
                    t.join()
    return report
