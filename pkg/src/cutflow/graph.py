"""Compact index-addressed s-t graph with folded terminals.

Nodes and half-arcs are addressed by integer indices. Half-arcs are created in
pairs: in an unpacked graph the reverse of arc ``a`` is ``a ^ 1``. A packed
graph stores each node's outgoing half-arcs contiguously, which breaks the XOR
pairing, so it carries an explicit ``sister`` table instead.

Terminal arcs are never stored as arcs. Each node keeps one signed residual
terminal capacity ``tr_cap`` (positive: residual source arc, negative: residual
sink arc) and the common part ``min(c_si, c_it)`` goes to ``flow_constant``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

INDEX_LIMIT = 2**32
INF_CAP = 2**62
CAP_BOUND = 2**63 - 1


class IndexRangeError(ValueError):
    """Node or arc count does not fit 32-bit indices."""


class CapacityOverflowError(OverflowError):
    """Capacity exceeds the declared bound."""


class Side(IntEnum):
    SOURCE = 0
    SINK = 1


@dataclass
class CutResult:
    """Max-flow value plus per-node side of a minimum cut."""

    flow_value: int
    side: list[Side]

    def source_set(self) -> list[int]:
        return [i for i, s in enumerate(self.side) if s == Side.SOURCE]


class GraphBuilder:
    """Accumulates nodes, terminal capacities and arc pairs before `build`."""

    def __init__(self, node_count: int, expected_arcs: int = 0):
        if node_count < 1:
            raise ValueError("node_count must be >= 1")
        if node_count >= INDEX_LIMIT:
            raise IndexRangeError(f"node_count {node_count} exceeds 32-bit index range")
        self.node_count = node_count
        self.expected_arcs = expected_arcs
        self.src = [0] * node_count
        self.snk = [0] * node_count
        # one entry per pair: tail, head, cap, rev_cap
        self.tails: list[int] = []
        self.heads: list[int] = []
        self.caps: list[int] = []
        self.rev_caps: list[int] = []
        self._pair_of: dict[tuple[int, int], int] = {}
        self._total = 0
        self.constant = 0  # flow on direct source-sink arcs

    @property
    def pair_count(self) -> int:
        return len(self.tails)

    @property
    def flow_constant(self) -> int:
        return self.constant + sum(min(a, b) for a, b in zip(self.src, self.snk))

    def add_constant(self, c: int) -> None:
        """Capacity of a direct source-to-sink arc; always saturated."""
        if c < 0:
            raise ValueError("capacity must be non-negative")
        self._charge(c)
        self.constant += c

    def _charge(self, amount: int) -> None:
        if amount > INF_CAP:
            raise CapacityOverflowError(f"capacity {amount} exceeds {INF_CAP}")
        self._total += amount
        if self._total > CAP_BOUND:
            raise CapacityOverflowError("sum of capacities exceeds 64-bit bound")

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self.node_count:
            raise IndexError(f"node {i} out of range [0, {self.node_count})")

    def add_terminal(self, i: int, c_si: int, c_it: int) -> None:
        self._check_node(i)
        if c_si < 0 or c_it < 0:
            raise ValueError("terminal capacities must be non-negative")
        self._charge(c_si)
        self._charge(c_it)
        self.src[i] += c_si
        self.snk[i] += c_it

    def add_edge(self, u: int, v: int, cap: int, rev_cap: int = 0, merge: bool = False) -> None:
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise ValueError(f"self-loop on node {u}")
        if cap < 0 or rev_cap < 0:
            raise ValueError("arc capacities must be non-negative")
        self._charge(cap)
        self._charge(rev_cap)
        if merge:
            k = self._pair_of.get((u, v))
            if k is not None:
                self.caps[k] += cap
                self.rev_caps[k] += rev_cap
                return
            k = self._pair_of.get((v, u))
            if k is not None:
                self.caps[k] += rev_cap
                self.rev_caps[k] += cap
                return
        if 2 * (len(self.tails) + 1) >= INDEX_LIMIT:
            raise IndexRangeError("arc count exceeds 32-bit index range")
        k = len(self.tails)
        self._pair_of.setdefault((u, v), k)
        self.tails.append(u)
        self.heads.append(v)
        self.caps.append(cap)
        self.rev_caps.append(rev_cap)

    def build(self, pack: bool = False) -> "Graph":
        n = self.node_count
        tr = [a - b for a, b in zip(self.src, self.snk)]
        m = 2 * len(self.tails)
        tail = [0] * m
        head = [0] * m
        cap = [0] * m
        tail[0::2] = self.tails
        tail[1::2] = self.heads
        head[0::2] = self.heads
        head[1::2] = self.tails
        cap[0::2] = self.caps
        cap[1::2] = self.rev_caps
        if not pack:
            return Graph(n, head, cap, tr, self.flow_constant, tail=tail)
        # stable counting sort of half-arcs by tail
        offsets = [0] * (n + 1)
        for u in tail:
            offsets[u + 1] += 1
        for i in range(n):
            offsets[i + 1] += offsets[i]
        pos = offsets[:-1].copy()
        new_of = [0] * m
        for a, u in enumerate(tail):
            new_of[a] = pos[u]
            pos[u] += 1
        p_head = [0] * m
        p_cap = [0] * m
        p_sister = [0] * m
        for a in range(m):
            b = new_of[a]
            p_head[b] = head[a]
            p_cap[b] = cap[a]
            p_sister[b] = new_of[a ^ 1]
        return Graph(n, p_head, p_cap, tr, self.flow_constant, sister=p_sister, offsets=offsets)


class Graph:
    """Built graph. Topology is immutable; `r_cap` and `tr_cap` are solver state."""

    def __init__(
        self,
        n: int,
        head: list[int],
        cap: list[int],
        tr: list[int],
        flow_constant: int,
        *,
        tail: list[int] | None = None,
        sister: list[int] | None = None,
        offsets: list[int] | None = None,
    ):
        self.n = n
        self.head = head
        self.cap = cap
        self.tr_orig = tr
        self.flow_constant = flow_constant
        self.packed = offsets is not None
        self.r_cap = list(cap)
        self.tr_cap = list(tr)
        if self.packed:
            self.offsets = offsets
            self.sister = sister
            self._tail = None
        else:
            self.sister = [a ^ 1 for a in range(len(head))]
            # linked adjacency: first_out[u], next_out[a]
            self.first_out = [-1] * n
            self.next_out = [-1] * len(head)
            for a in range(len(head) - 1, -1, -1):
                u = tail[a]
                self.next_out[a] = self.first_out[u]
                self.first_out[u] = a
            self._tail = tail
        self._out: list[list[int]] | None = None

    @property
    def arc_count(self) -> int:
        return len(self.head)

    @property
    def tail(self) -> list[int]:
        if self._tail is None:
            self._tail = [self.head[s] for s in self.sister]
        return self._tail

    def out_arcs(self) -> list[list[int]]:
        """Per-node lists of outgoing half-arc ids (cached)."""
        if self._out is None:
            if self.packed:
                off = self.offsets
                self._out = [list(range(off[u], off[u + 1])) for u in range(self.n)]
            else:
                out = []
                nxt = self.next_out
                for u in range(self.n):
                    arcs = []
                    a = self.first_out[u]
                    while a != -1:
                        arcs.append(a)
                        a = nxt[a]
                    out.append(arcs)
                self._out = out
        return self._out

    def rev(self, a: int) -> int:
        return self.sister[a]

    def residual_cap(self, a: int) -> int:
        return self.r_cap[a]

    def pairs(self):
        """Yield one representative half-arc per pair."""
        sister = self.sister
        for a in range(len(self.head)):
            if a < sister[a]:
                yield a

    def reset(self) -> None:
        self.r_cap = list(self.cap)
        self.tr_cap = list(self.tr_orig)

    def copy(self) -> "Graph":
        """Shallow topology share, fresh residual state."""
        g = object.__new__(Graph)
        g.__dict__.update(self.__dict__)
        g.r_cap = list(self.cap)
        g.tr_cap = list(self.tr_orig)
        return g

    def accounted_bytes(self) -> int:
        """Bytes of this implementation's own layout (not the reference models).

        Per half-arc: 4-byte head, 8-byte r_cap, 8-byte original cap and a
        4-byte next_out (unpacked) or sister index (packed). Per node: 8-byte
        tr_cap, 8-byte original terminal value, 4-byte first_out or offset.
        """
        return 20 * self.n + 24 * self.arc_count

    def node_arcs_flow(self) -> list[int]:
        """Net flow pushed along each half-arc (cap - r_cap, may be negative)."""
        return [c - r for c, r in zip(self.cap, self.r_cap)]


def cut_capacity(g: Graph, side: Sequence[int]) -> int:
    """Capacity of the s-t cut given by `side`, using original capacities."""
    if len(side) != g.n:
        raise ValueError("side assignment must cover every node")
    total = g.flow_constant
    for i, tr in enumerate(g.tr_orig):
        if side[i] == Side.SOURCE:
            if tr < 0:
                total -= tr
        elif tr > 0:
            total += tr
    head = g.head
    tail = g.tail
    for a, c in enumerate(g.cap):
        if c and side[tail[a]] == Side.SOURCE and side[head[a]] == Side.SINK:
            total += c
    return total


def source_closure(g: Graph, seeds: Sequence[int]) -> list[Side]:
    """SOURCE for every node reachable from `seeds` along residual arcs.

    With every terminal arc saturated, a cut A costs a constant minus the
    excess inside A plus the residual capacity leaving A. Seeding with all
    surplus nodes of a flow whose surplus nodes cannot reach a deficit node
    therefore yields the smallest minimum source set.
    """
    head, r_cap = g.head, g.r_cap
    out = g.out_arcs()
    side = [Side.SINK] * g.n
    stack = list(seeds)
    for i in stack:
        side[i] = Side.SOURCE
    while stack:
        u = stack.pop()
        for a in out[u]:
            v = head[a]
            if side[v] == Side.SINK and r_cap[a] > 0:
                side[v] = Side.SOURCE
                stack.append(v)
    return side


# Reference solver footprints in bytes: (per node, per terminal arc, per undirected neighbor arc)
MEMORY_MODELS: dict[str, tuple[int, int, int]] = {
    "HI-PR": (40, 40, 40),
    "HPF": (104, 48, 48),
    "EIBFS": (72, 0, 72),
    "EIBFS-I": (29, 0, 50),
    "EIBFS-I-NR": (49, 0, 24),
    "BK": (48, 0, 64),
    "MBK": (23, 0, 24),
    "MBK-R": (23, 0, 48),
    "P-PPR": (48, 68, 68),
    "Liu-Sun": (25, 0, 24),
    "Strandmark-Kahl": (29, 0, 24),
    "P-ARD": (40, 0, 32),
}


def mem_footprint(model: str, n: int, m_t: int, m_n: int) -> int:
    """Bytes used by a reference implementation; `m_n` counts undirected arcs."""
    try:
        per_node, per_term, per_arc = MEMORY_MODELS[model]
    except KeyError:
        raise ValueError(f"unknown memory model {model!r}") from None
    return per_node * n + per_term * m_t + per_arc * m_n
