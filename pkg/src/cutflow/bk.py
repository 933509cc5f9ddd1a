"""Boykov-Kolmogorov augmenting paths with search-tree reuse.

A source tree and a sink tree grow towards each other; when they touch, flow
is pushed along the connecting path and the trees are repaired by orphan
adoption. Tree state is kept after a solve so that capacity edits on marked
nodes can be re-solved incrementally.

Node bookkeeping lives in `BkArrays`, which several solvers may share when
they work on disjoint node blocks of one graph (the block-parallel schemes
rely on this).
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .graph import CutResult, Graph, Side

NONE = -1
TERMINAL = -2
ORPHAN = -3
_INF_D = 1 << 60


class BkArrays:
    """Per-node tree state: parent arc, tree tag, timestamp and distance."""

    def __init__(self, n: int):
        self.parent = [NONE] * n
        self.is_sink = [False] * n
        self.ts = [0] * n
        self.dist = [0] * n
        self.in_active = [False] * n


class BkSolver:
    """BK solver over all nodes of `g`, or over the block `nodes` only.

    Arcs leaving the block must have zero residual capacity in both
    directions while the solver runs; then the search never leaves it.
    """

    def __init__(self, g: Graph, nodes: Iterable[int] | None = None, arrays: BkArrays | None = None):
        self.g = g
        self.arrays = arrays if arrays is not None else BkArrays(g.n)
        self.nodes = list(range(g.n)) if nodes is None else list(nodes)
        self.flow = 0  # pushed by this solver, excluding g.flow_constant
        self.time = 0
        self.active: deque[int] = deque()
        self.orphans: list[int] = []
        self.marked: list[int] = []
        self.solved = False

    # -- public API ---------------------------------------------------------

    def solve(self) -> int:
        """Max-flow from scratch on this solver's nodes; returns pushed flow."""
        A = self.arrays
        tr = self.g.tr_cap
        parent, is_sink, ts, dist = A.parent, A.is_sink, A.ts, A.dist
        for i in self.nodes:
            A.in_active[i] = False
            ts[i] = 0
            if tr[i] > 0:
                parent[i] = TERMINAL
                is_sink[i] = False
                dist[i] = 1
                self._set_active(i)
            elif tr[i] < 0:
                parent[i] = TERMINAL
                is_sink[i] = True
                dist[i] = 1
                self._set_active(i)
            else:
                parent[i] = NONE
                is_sink[i] = False
        self.marked.clear()
        self._run()
        self.solved = True
        return self.flow

    def mark_node(self, i: int) -> None:
        """Schedule node `i` for re-examination by the next `resolve`."""
        self.marked.append(i)

    def add_tweights(self, i: int, c_si: int, c_it: int) -> None:
        """Add terminal capacities to node `i` (folded into its residual)."""
        tr = self.g.tr_cap
        delta = tr[i]
        if delta > 0:
            c_si += delta
        else:
            c_it -= delta
        self.flow += min(c_si, c_it)
        tr[i] = c_si - c_it

    def resolve(self) -> int:
        """Re-solve after capacity increases on marked nodes' terminals/arcs."""
        if not self.solved:
            return self.solve()
        self._reuse_trees()
        self._run()
        return self.flow

    def absorb(self, other: "BkSolver") -> None:
        """Take over the nodes and trees of a solver on a disjoint block."""
        self.nodes.extend(other.nodes)
        self.flow += other.flow
        self.time = max(self.time, other.time) + 1
        self.marked.extend(other.marked)
        for i in other.active:
            self.active.append(i)

    def in_source_tree(self, i: int) -> bool:
        A = self.arrays
        return A.parent[i] != NONE and not A.is_sink[i]

    def side_of(self, i: int) -> Side:
        return Side.SOURCE if self.in_source_tree(i) else Side.SINK

    def cut(self) -> CutResult:
        return CutResult(self.g.flow_constant + self.flow, [self.side_of(i) for i in range(self.g.n)])

    # -- internals ----------------------------------------------------------

    def _set_active(self, i: int) -> None:
        if not self.arrays.in_active[i]:
            self.arrays.in_active[i] = True
            self.active.append(i)

    def _reuse_trees(self) -> None:
        A = self.arrays
        g = self.g
        tr = g.tr_cap
        head = g.head
        out = g.out_arcs()
        parent, is_sink, ts, dist = A.parent, A.is_sink, A.ts, A.dist
        self.time += 1
        marked = set(self.marked)
        for i in self.marked:
            t = tr[i]
            p = parent[i]
            if t != 0:
                want_sink = t < 0
                if p != NONE and is_sink[i] != want_sink:
                    # recoloured: its children in the old tree lose their parent
                    # (marked children are settled by their own entry)
                    for a in out[i]:
                        j = head[a]
                        pj = parent[j]
                        if j not in marked and pj >= 0 and is_sink[j] == is_sink[i] and head[pj] == i:
                            parent[j] = ORPHAN
                            self.orphans.append(j)
                parent[i] = TERMINAL
                is_sink[i] = want_sink
                ts[i] = self.time
                dist[i] = 1
            elif p != NONE:
                parent[i] = ORPHAN
                self.orphans.append(i)
            if parent[i] != NONE:
                self._set_active(i)
        self.marked.clear()
        self._adopt_orphans()

    def _run(self) -> None:
        A = self.arrays
        g = self.g
        head, r_cap, sister = g.head, g.r_cap, g.sister
        out = g.out_arcs()
        parent, is_sink, ts, dist, in_active = A.parent, A.is_sink, A.ts, A.dist, A.in_active
        active = self.active
        while active:
            i = active.popleft()
            in_active[i] = False
            if parent[i] == NONE:
                continue
            found = -1
            if not is_sink[i]:
                for a in out[i]:
                    if r_cap[a]:
                        j = head[a]
                        pj = parent[j]
                        if pj == NONE:
                            is_sink[j] = False
                            parent[j] = sister[a]
                            ts[j] = ts[i]
                            dist[j] = dist[i] + 1
                            if not in_active[j]:
                                in_active[j] = True
                                active.append(j)
                        elif is_sink[j]:
                            found = a
                            break
                        elif ts[j] <= ts[i] and dist[j] > dist[i]:
                            parent[j] = sister[a]
                            ts[j] = ts[i]
                            dist[j] = dist[i] + 1
            else:
                for a in out[i]:
                    sa = sister[a]
                    if r_cap[sa]:
                        j = head[a]
                        pj = parent[j]
                        if pj == NONE:
                            is_sink[j] = True
                            parent[j] = sa
                            ts[j] = ts[i]
                            dist[j] = dist[i] + 1
                            if not in_active[j]:
                                in_active[j] = True
                                active.append(j)
                        elif not is_sink[j]:
                            found = sa
                            break
                        elif ts[j] <= ts[i] and dist[j] > dist[i]:
                            parent[j] = sa
                            ts[j] = ts[i]
                            dist[j] = dist[i] + 1
            if found >= 0:
                # keep scanning i until it has no more contacts
                if not in_active[i]:
                    in_active[i] = True
                    active.appendleft(i)
                self._augment(found)
                self.time += 1
                self._adopt_orphans()

    def _augment(self, middle: int) -> None:
        """Push the bottleneck along source-tree path, `middle`, sink-tree path."""
        g = self.g
        head, r_cap, sister, tr = g.head, g.r_cap, g.sister, g.tr_cap
        parent = self.arrays.parent
        orphans = self.orphans

        bottleneck = r_cap[middle]
        i = head[sister[middle]]
        while True:
            a = parent[i]
            if a == TERMINAL:
                break
            c = r_cap[sister[a]]
            if c < bottleneck:
                bottleneck = c
            i = head[a]
        if tr[i] < bottleneck:
            bottleneck = tr[i]
        i = head[middle]
        while True:
            a = parent[i]
            if a == TERMINAL:
                break
            c = r_cap[a]
            if c < bottleneck:
                bottleneck = c
            i = head[a]
        if -tr[i] < bottleneck:
            bottleneck = -tr[i]

        r_cap[sister[middle]] += bottleneck
        r_cap[middle] -= bottleneck
        i = head[sister[middle]]
        while True:
            a = parent[i]
            if a == TERMINAL:
                break
            sa = sister[a]
            r_cap[a] += bottleneck
            r_cap[sa] -= bottleneck
            if not r_cap[sa]:
                parent[i] = ORPHAN
                orphans.append(i)
            i = head[a]
        tr[i] -= bottleneck
        if not tr[i]:
            parent[i] = ORPHAN
            orphans.append(i)
        i = head[middle]
        while True:
            a = parent[i]
            if a == TERMINAL:
                break
            r_cap[sister[a]] += bottleneck
            r_cap[a] -= bottleneck
            if not r_cap[a]:
                parent[i] = ORPHAN
                orphans.append(i)
            i = head[a]
        tr[i] += bottleneck
        if not tr[i]:
            parent[i] = ORPHAN
            orphans.append(i)
        self.flow += bottleneck

    def _adopt_orphans(self) -> None:
        A = self.arrays
        g = self.g
        head, r_cap, sister = g.head, g.r_cap, g.sister
        out = g.out_arcs()
        parent, is_sink, ts, dist = A.parent, A.is_sink, A.ts, A.dist
        orphans = self.orphans
        time = self.time
        while orphans:
            i = orphans.pop()
            if parent[i] != ORPHAN:
                continue
            sink = is_sink[i]
            d_min = _INF_D
            a0 = -1
            for a in out[i]:
                # residual towards i in the source tree, away from i in the sink tree
                if not (r_cap[a] if sink else r_cap[sister[a]]):
                    continue
                j = head[a]
                if parent[j] == NONE or is_sink[j] != sink:
                    continue
                d = 0
                k = j
                while True:
                    if ts[k] == time:
                        d += dist[k]
                        break
                    pk = parent[k]
                    d += 1
                    if pk == TERMINAL:
                        ts[k] = time
                        dist[k] = 1
                        break
                    if pk == ORPHAN:
                        d = _INF_D
                        break
                    k = head[pk]
                if d < _INF_D:
                    if d < d_min:
                        a0 = a
                        d_min = d
                    k = j
                    while ts[k] != time:
                        ts[k] = time
                        dist[k] = d
                        d -= 1
                        k = head[parent[k]]
            if a0 >= 0:
                parent[i] = a0
                ts[i] = time
                dist[i] = d_min + 1
                continue
            parent[i] = NONE
            for a in out[i]:
                j = head[a]
                pj = parent[j]
                if pj == NONE:
                    continue
                # any tree node that could grow into i must be rescanned
                if r_cap[a] if is_sink[j] else r_cap[sister[a]]:
                    self._set_active(j)
                if is_sink[j] == sink and pj >= 0 and head[pj] == i:
                    parent[j] = ORPHAN
                    orphans.append(j)


def bk_solve(g: Graph) -> CutResult:
    """Solve `g` in place; residual capacities end as a maximum flow."""
    s = BkSolver(g)
    s.solve()
    return s.cut()
