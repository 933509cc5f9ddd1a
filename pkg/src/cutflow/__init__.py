"""Min-cut/max-flow solvers, energy constructions, parallel drivers and tools."""

from .bk import BkSolver, bk_solve
from .energy import EnergyProblem, NonSubmodularTerm, QpboLabel, build_qpbo, build_submodular, solve_qpbo
from .graph import (
    INF_CAP,
    CapacityOverflowError,
    CutResult,
    Graph,
    GraphBuilder,
    IndexRangeError,
    Side,
    cut_capacity,
    mem_footprint,
)
from .hpf import HpfConfig, hpf_solve
from .parallel import BlockPartition, ard_solve, dd_solve, liu_sun_solve, make_overlapping, split_grid
from .ppr import ppr_solve
from .solvers import SOLVERS

__all__ = [
    "INF_CAP",
    "SOLVERS",
    "BkSolver",
    "BlockPartition",
    "CapacityOverflowError",
    "CutResult",
    "EnergyProblem",
    "Graph",
    "GraphBuilder",
    "HpfConfig",
    "IndexRangeError",
    "NonSubmodularTerm",
    "QpboLabel",
    "Side",
    "ard_solve",
    "bk_solve",
    "build_qpbo",
    "build_submodular",
    "cut_capacity",
    "dd_solve",
    "hpf_solve",
    "liu_sun_solve",
    "make_overlapping",
    "mem_footprint",
    "ppr_solve",
    "solve_qpbo",
    "split_grid",
]
