"""Timing harness: build/solve split, minimum over repeats, cross-checked values."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, fields
from typing import Mapping, Sequence

from .dimacs import ProblemFile, builder_from_lists
from .graph import mem_footprint
from .parallel import BlockPartition, NonConvergence, contiguous_partition
from .solvers import SOLVERS, SolverSpec


class ValueMismatch(AssertionError):
    """Solvers disagree on the max-flow value; never a timing artifact."""

    def __init__(self, values: Mapping[str, int]):
        self.values = dict(values)
        desc = ", ".join(f"{k}={v}" for k, v in self.values.items())
        super().__init__(f"flow values disagree: {desc}")


@dataclass
class BenchRecord:
    dataset: str
    algorithm: str
    threads: int
    build_ns: int
    solve_ns: int
    flow_value: int | None  # None when the solver did not converge
    repeats: int
    # published reference footprint, then this implementation's own arrays
    mem_model: str
    mem_model_bytes: int
    accounted_bytes: int


def run_bench(
    problem: ProblemFile,
    algs: Sequence[str],
    threads: Sequence[int] = (1,),
    repeats: int = 3,
    dataset: str = "",
    partition: BlockPartition | None = None,
    pack: bool = False,
    solvers: Mapping[str, SolverSpec] | None = None,
) -> list[BenchRecord]:
    """Time every algorithm (and thread count, for parallel ones) on `problem`.

    Node and arc lists are materialized before any timer starts. Build time
    covers graph construction and packing; solve time covers the min-cut
    computation only. Times are minima over `repeats` runs. Raises
    ValueMismatch if any two runs report different flow values.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    registry = solvers if solvers is not None else SOLVERS
    n, terms, arcs, constant = problem.terminal_and_arc_lists()
    m_t = sum((cs > 0) + (ct > 0) for _, cs, ct in terms)
    records: list[BenchRecord] = []
    seen: dict[str, int] = {}
    for alg in algs:
        if alg not in registry:
            raise ValueError(f"unknown algorithm {alg!r}")
        spec = registry[alg]
        for k in threads if spec.parallel else [1]:
            part = partition
            if spec.parallel and part is None:
                part = contiguous_partition(n, 2 * k)
            best_build = best_solve = None
            value: int | None = None
            accounted = m_n = 0
            for r in range(repeats):
                t0 = time.perf_counter_ns()
                g = builder_from_lists(n, terms, arcs, constant).build(pack=pack)
                t1 = time.perf_counter_ns()
                res = spec.run(g, part, k)
                t2 = time.perf_counter_ns()
                v = None if isinstance(res, NonConvergence) else res.flow_value
                if r and v != value:
                    raise ValueMismatch({f"{alg}#run1": value, f"{alg}#run{r + 1}": v})
                value = v
                best_build = t1 - t0 if best_build is None else min(best_build, t1 - t0)
                best_solve = t2 - t1 if best_solve is None else min(best_solve, t2 - t1)
                accounted = g.accounted_bytes()
                m_n = g.arc_count // 2
            if value is not None:
                seen[f"{alg}@{k}"] = value
                if len(set(seen.values())) > 1:
                    raise ValueMismatch(seen)
            records.append(
                BenchRecord(
                    dataset,
                    alg,
                    k,
                    best_build,
                    best_solve,
                    value,
                    repeats,
                    spec.memory_model,
                    mem_footprint(spec.memory_model, n, m_t, m_n),
                    accounted,
                )
            )
    return records


CSV_FIELDS = [f.name for f in fields(BenchRecord)]


def records_csv(records: Sequence[BenchRecord], header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_FIELDS, lineterminator="\n")
    if header:
        w.writeheader()
    for r in records:
        w.writerow(asdict(r))
    return buf.getvalue()


def records_jsonl(records: Sequence[BenchRecord]) -> str:
    return "".join(json.dumps(asdict(r)) + "\n" for r in records)
