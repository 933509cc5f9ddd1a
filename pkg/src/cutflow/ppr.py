"""Preflow push-relabel for the minimum cut.

Source arcs are saturated up front; active nodes are discharged in FIFO or
highest-label order. Global relabeling (exact backward BFS from the sink) runs
at start and every `global_relabel_every` relabels, and the gap heuristic
lifts stranded nodes to the unreachable label n + 1. The solver stops as soon
as no node with excess has a reachable label. The source side is then
everything reachable in the residual graph from a node still holding excess.
"""

from __future__ import annotations

from collections import deque
from enum import Enum

from .graph import CutResult, Graph, cut_capacity, source_closure


class Selection(str, Enum):
    FIFO = "fifo"
    HIGHEST_LABEL = "hi"


class PprState:
    """Excess, labels and current-arc cursors of one run."""

    def __init__(self, g: Graph):
        n = g.n
        self.g = g
        self.excess = [0] * n
        self.label = [0] * n
        self.cursor = [0] * n
        self.top = n + 1  # labels are sink distances, at most n when reachable
        self.count = [0] * (n + 2)  # nodes per reachable label
        self.relabels = 0

    def global_relabel(self) -> None:
        g = self.g
        n = g.n
        top = self.top
        head, r_cap, sister, tr = g.head, g.r_cap, g.sister, g.tr_cap
        out = g.out_arcs()
        d = [top] * n
        q = deque()
        for i in range(n):
            if tr[i] < 0:
                d[i] = 1
                q.append(i)
        while q:
            j = q.popleft()
            dj = d[j] + 1
            for a in out[j]:
                i = head[a]
                if d[i] == top and r_cap[sister[a]] > 0:
                    d[i] = dj
                    q.append(i)
        self.label = d
        self.count = [0] * (n + 2)
        for x in d:
            if x < top:
                self.count[x] += 1
        self.cursor = [0] * n

    def check_labels(self) -> bool:
        """No steep drop: d(i) - d(j) <= 1 on residual arcs with d(i) reachable."""
        g = self.g
        top = self.top
        d = self.label
        tail = g.tail
        for a, r in enumerate(g.r_cap):
            if r > 0:
                i, j = tail[a], g.head[a]
                if d[i] < top and d[i] - d[j] > 1:
                    return False
        for i in range(g.n):
            if g.tr_cap[i] < 0 and 1 < d[i] < top:
                return False
        return True


def ppr_solve(
    g: Graph,
    sel: Selection | str = Selection.FIFO,
    global_relabel_every: int | None = None,
    gap: bool = True,
) -> CutResult:
    """Minimum cut of `g` by push-relabel. Mutates the residuals of `g`."""
    return ppr_run(g, sel, global_relabel_every, gap)[0]


def ppr_run(
    g: Graph,
    sel: Selection | str = Selection.FIFO,
    global_relabel_every: int | None = None,
    gap: bool = True,
) -> tuple[CutResult, PprState]:
    sel = Selection(sel)
    n = g.n
    if global_relabel_every is None:
        global_relabel_every = n
    st = PprState(g)
    top = st.top
    head, r_cap, sister, tr = g.head, g.r_cap, g.sister, g.tr_cap
    out = g.out_arcs()
    excess = st.excess
    for i in range(n):
        if tr[i] > 0:
            excess[i] = tr[i]
            tr[i] = 0
    st.global_relabel()

    fifo = sel is Selection.FIFO
    queue: deque[int] = deque()
    buckets: list[list[int]] = [[] for _ in range(top + 1)]
    hi = [0]  # highest possibly non-empty bucket

    def activate(i: int) -> None:
        if fifo:
            queue.append(i)
        else:
            di = st.label[i]
            buckets[di].append(i)
            if di > hi[0]:
                hi[0] = di

    def rebuild_active() -> None:
        queue.clear()
        for b in buckets:
            b.clear()
        hi[0] = 0
        for i in range(n):
            if excess[i] > 0 and st.label[i] < top:
                activate(i)

    def next_active() -> int:
        d = st.label
        if fifo:
            while queue:
                i = queue.popleft()
                if excess[i] > 0 and d[i] < top:
                    return i
            return -1
        while hi[0] >= 0:
            b = buckets[hi[0]]
            while b:
                i = b.pop()
                if excess[i] > 0 and d[i] == hi[0]:
                    return i
            hi[0] -= 1
        hi[0] = 0
        return -1

    rebuild_active()
    since_global = 0
    while True:
        i = next_active()
        if i < 0:
            break
        d = st.label
        count = st.count
        cursor = st.cursor
        arcs = out[i]
        # discharge i
        while excess[i] > 0:
            if d[i] == 1 and tr[i] < 0:
                delta = min(excess[i], -tr[i])
                tr[i] += delta
                excess[i] -= delta
                continue
            k = cursor[i]
            di = d[i]
            while k < len(arcs):
                a = arcs[k]
                r = r_cap[a]
                if r > 0:
                    j = head[a]
                    if d[j] == di - 1:
                        delta = excess[i] if excess[i] < r else r
                        r_cap[a] = r - delta
                        r_cap[sister[a]] += delta
                        if excess[j] == 0:
                            excess[j] = delta
                            activate(j)
                        else:
                            excess[j] += delta
                        excess[i] -= delta
                        if excess[i] == 0:
                            break
                k += 1
            cursor[i] = k
            if excess[i] == 0:
                break
            # relabel
            new = top
            if tr[i] < 0:
                new = 1
            for a in arcs:
                if r_cap[a] > 0:
                    dj = d[head[a]] + 1
                    if dj < new:
                        new = dj
            if new > top:
                new = top
            old = di
            count[old] -= 1
            d[i] = new
            cursor[i] = 0
            st.relabels += 1
            since_global += 1
            if new < top:
                count[new] += 1
            if gap and count[old] == 0 and 0 < old < top:
                for k2 in range(n):
                    if old < d[k2] < top:
                        count[d[k2]] -= 1
                        d[k2] = top
            if d[i] >= top:
                break
        if since_global >= global_relabel_every:
            since_global = 0
            st.global_relabel()
            rebuild_active()
        elif excess[i] > 0 and st.label[i] < top:
            activate(i)

    side = source_closure(g, [i for i in range(n) if excess[i] > 0])
    return CutResult(cut_capacity(g, side), side), st
