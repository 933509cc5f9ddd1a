"""Binary pairwise energies and their s-t graph constructions.

Labels map to cut sides as x_i = 1 <=> node i on the source side, so the unary
E_i(0) becomes the source capacity c_si and E_i(1) the sink capacity c_it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Sequence

from .graph import CutResult, Graph, GraphBuilder, Side, cut_capacity

Term = tuple[int, int, int, int, int, int]  # (i, j, E00, E01, E10, E11)


class NonSubmodularTerm(ValueError):
    def __init__(self, i: int, j: int):
        super().__init__(f"pairwise term ({i}, {j}) is not submodular")
        self.pair = (i, j)


class QpboLabel(IntEnum):
    ZERO = 0
    ONE = 1
    UNLABELED = -1


@dataclass
class EnergyProblem:
    """Unary and pairwise tables of a binary energy over `var_count` variables."""

    var_count: int
    unary: list[tuple[int, int]] = field(default_factory=list)
    pairwise: list[Term] = field(default_factory=list)

    def __post_init__(self):
        if not self.unary:
            self.unary = [(0, 0)] * self.var_count
        if len(self.unary) != self.var_count:
            raise ValueError("unary table must have one entry per variable")
        normalized = []
        seen = set()
        for i, j, a, b, c, d in self.pairwise:
            if i == j:
                raise ValueError(f"pairwise term on a single variable {i}")
            if not (0 <= i < self.var_count and 0 <= j < self.var_count):
                raise IndexError(f"pairwise term ({i}, {j}) out of range")
            if i > j:
                i, j, b, c = j, i, c, b
            if (i, j) in seen:
                raise ValueError(f"duplicate pairwise term ({i}, {j})")
            seen.add((i, j))
            normalized.append((i, j, a, b, c, d))
        self.pairwise = normalized


def is_submodular(term: Sequence[int]) -> bool:
    """E00 + E11 <= E01 + E10; accepts a 4-tuple or a full (i, j, ...) term."""
    a, b, c, d = term[-4:]
    return a + d <= b + c


def energy_of(e: EnergyProblem, labeling: Sequence[int]) -> int:
    if len(labeling) != e.var_count:
        raise ValueError("labeling must cover every variable")
    total = 0
    for (u0, u1), x in zip(e.unary, labeling):
        total += u1 if x else u0
    for i, j, a, b, c, d in e.pairwise:
        total += (a, b, c, d)[2 * labeling[i] + labeling[j]]
    return total


class _Reparam:
    """Unaries, offset and pairwise arcs after moving pairwise mass to unaries."""

    def __init__(self, e: EnergyProblem):
        self.u0 = [a for a, _ in e.unary]
        self.u1 = [b for _, b in e.unary]
        self.offset = 0
        # (i, j, cap): pays cap when x_i = 1 and x_j = 0
        self.diff: list[tuple[int, int, int]] = []
        # (i, j, cap): pays cap when x_i = x_j = 1 (non-submodular part)
        self.both: list[tuple[int, int, int]] = []

    def linear(self, i: int, coef: int) -> None:
        self.u1[i] += coef

    def add(self, term: Term) -> None:
        i, j, a, b, c, d = term
        self.offset += a
        w = b + c - a - d
        if w >= 0:
            p = w // 2
            q = w - p
            # a + (c-a-p) x_i + (b-a-q) x_j + p [x_i=1,x_j=0] + q [x_i=0,x_j=1]
            self.linear(i, c - a - p)
            self.linear(j, b - a - q)
            if p:
                self.diff.append((i, j, p))
            if q:
                self.diff.append((j, i, q))
        else:
            # a + (c-a) x_i + (b-a) x_j + (a+d-b-c) x_i x_j
            self.linear(i, c - a)
            self.linear(j, b - a)
            self.both.append((i, j, -w))

    def terminals(self) -> tuple[list[tuple[int, int]], int]:
        """Non-negative (c_si, c_it) per variable plus the extra energy offset."""
        out = []
        extra = 0
        for a, b in zip(self.u0, self.u1):
            m = min(a, b, 0)
            extra += m
            out.append((a - m, b - m))
        return out, extra


def build_submodular(e: EnergyProblem, pack: bool = False) -> tuple[Graph, int]:
    """Graph whose max-flow value plus the returned offset is the minimum energy."""
    r = _Reparam(e)
    for t in e.pairwise:
        if not is_submodular(t):
            raise NonSubmodularTerm(t[0], t[1])
        r.add(t)
    terms, extra = r.terminals()
    b = GraphBuilder(e.var_count, len(r.diff))
    for i, (cs, ct) in enumerate(terms):
        b.add_terminal(i, cs, ct)
    for i, j, cap in r.diff:
        b.add_edge(i, j, cap, merge=True)
    return b.build(pack=pack), r.offset + extra


def labeling_from_cut(cut: CutResult) -> list[int]:
    return [1 if s == Side.SOURCE else 0 for s in cut.side]


def build_qpbo(e: EnergyProblem, pack: bool = False) -> Graph:
    """Doubled graph: node i encodes x_i = 1 on the source side, node i + N
    encodes x_i = 0 on the source side. Every term appears once in each half,
    so a consistent cut costs exactly twice the energy minus twice the offset
    returned by `qpbo_offset`."""
    n = e.var_count
    r = _Reparam(e)
    for t in e.pairwise:
        r.add(t)
    terms, _ = r.terminals()
    b = GraphBuilder(2 * n, 2 * (len(r.diff) + len(r.both)))
    for i, (cs, ct) in enumerate(terms):
        b.add_terminal(i, cs, ct)
        b.add_terminal(i + n, ct, cs)
    for i, j, cap in r.diff:
        b.add_edge(i, j, cap, merge=True)
        b.add_edge(j + n, i + n, cap, merge=True)
    for i, j, cap in r.both:
        b.add_edge(i, j + n, cap, merge=True)
        b.add_edge(j, i + n, cap, merge=True)
    return b.build(pack=pack)


def qpbo_offset(e: EnergyProblem) -> int:
    """Energy offset of one half of the doubled graph."""
    r = _Reparam(e)
    for t in e.pairwise:
        r.add(t)
    _, extra = r.terminals()
    return r.offset + extra


def extract_qpbo_labels(e: EnergyProblem, cut: CutResult) -> list[QpboLabel]:
    n = e.var_count
    if len(cut.side) != 2 * n:
        raise ValueError(f"cut has {len(cut.side)} nodes, expected {2 * n}")
    out = []
    for i in range(n):
        primal = cut.side[i] == Side.SOURCE
        mirror = cut.side[i + n] == Side.SOURCE
        if primal and not mirror:
            out.append(QpboLabel.ONE)
        elif mirror and not primal:
            out.append(QpboLabel.ZERO)
        else:
            out.append(QpboLabel.UNLABELED)
    return out


def _reach(g: Graph, seeds: list[int], forward: bool) -> list[bool]:
    head, r_cap, sister = g.head, g.r_cap, g.sister
    out = g.out_arcs()
    seen = [False] * g.n
    q = deque(seeds)
    for s in seeds:
        seen[s] = True
    while q:
        u = q.popleft()
        for a in out[u]:
            v = head[a]
            if not seen[v] and (r_cap[a] if forward else r_cap[sister[a]]) > 0:
                seen[v] = True
                q.append(v)
    return seen


def qpbo_cut(g: Graph, var_count: int) -> CutResult:
    """Canonical minimum cut of a solved doubled graph.

    `g` must hold a maximum flow in its residuals. Primal nodes use the
    smallest source set, complement nodes the largest one. The residual
    closure of that union stays inside the largest source set, so it is still
    a minimum cut. Without
    non-submodular terms the two halves are disconnected and every variable
    comes out labeled.
    """
    tr = g.tr_cap
    smallest = _reach(g, [i for i in range(g.n) if tr[i] > 0], forward=True)
    to_sink = _reach(g, [i for i in range(g.n) if tr[i] < 0], forward=False)
    seeds = [i for i in range(g.n) if smallest[i] or (i >= var_count and not to_sink[i])]
    closed = _reach(g, seeds, forward=True)
    side = [Side.SOURCE if c else Side.SINK for c in closed]
    return CutResult(cut_capacity(g, side), side)


def solve_qpbo(e: EnergyProblem, solver: Callable[[Graph], CutResult] | None = None) -> list[QpboLabel]:
    """QPBO partial labeling. `solver` must leave a maximum flow in the residuals."""
    from .bk import bk_solve

    g = build_qpbo(e)
    (solver or bk_solve)(g)
    return extract_qpbo_labels(e, qpbo_cut(g, e.var_count))
