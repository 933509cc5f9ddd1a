"""Name-addressed registry of every solver.

Each entry takes a built graph, a block partition (ignored by serial solvers)
and a thread count, and returns a CutResult. Dual decomposition may instead
return NonConvergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .bk import bk_solve
from .graph import CutResult, Graph
from .hpf import hpf_solve
from .parallel import BlockPartition, NonConvergence, ard_solve, dd_solve, liu_sun_solve, make_overlapping
from .ppr import ppr_solve


@dataclass(frozen=True)
class SolverSpec:
    name: str
    run: Callable[[Graph, BlockPartition | None, int], "CutResult | NonConvergence"]
    parallel: bool
    memory_model: str  # reference model used for mem_footprint


def _dd(g: Graph, p: BlockPartition | None, threads: int):
    return dd_solve(g, make_overlapping(g, p), threads)


SOLVERS: dict[str, SolverSpec] = {
    "bk": SolverSpec("bk", lambda g, p, k: bk_solve(g), False, "MBK"),
    "ppr-fifo": SolverSpec("ppr-fifo", lambda g, p, k: ppr_solve(g, "fifo"), False, "HI-PR"),
    "ppr-hi": SolverSpec("ppr-hi", lambda g, p, k: ppr_solve(g, "hi"), False, "HI-PR"),
    **{
        name: SolverSpec(name, (lambda c: lambda g, p, k: hpf_solve(g, c))(name), False, "HPF")
        for name in ("hpf-hf", "hpf-hl", "hpf-lf", "hpf-ll")
    },
    "liusun": SolverSpec("liusun", lambda g, p, k: liu_sun_solve(g, p, k), True, "Liu-Sun"),
    "dd": SolverSpec("dd", _dd, True, "Strandmark-Kahl"),
    "ard": SolverSpec("ard", lambda g, p, k: ard_solve(g, p, k), True, "P-ARD"),
}


def get_solver(name: str) -> SolverSpec:
    try:
        return SOLVERS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(SOLVERS)}") from None
