"""Hochbaum pseudoflow: a forest of trees whose roots carry the excess.

Every terminal arc is saturated up front, so each node starts as a singleton
tree with excess ``tr_cap``. Strong trees (positive root excess) are processed
one at a time: the nodes holding the tree's lowest label look for a residual
arc into a node one label lower, and if one exists the tree is hung below it
and the surplus is pushed towards the other root, splitting the path at the
first saturated arc. Otherwise those nodes are relabeled.

Deficit roots never change label, so labels stay at or below the residual
distance to the nearest deficit node. A label of ``n`` therefore means the
node can no longer reach a deficit, and an emptied label level lets every
node above it jump to ``n`` (gap relabeling). The source side of the result
is what the remaining surplus nodes reach in the residual graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

from .graph import CutResult, Graph, cut_capacity, source_closure

NO_PARENT = -1


class LabelRule(str, Enum):
    HIGHEST = "highest"
    LOWEST = "lowest"


class BucketRule(str, Enum):
    FIFO = "fifo"
    LIFO = "lifo"


@dataclass(frozen=True)
class HpfConfig:
    label_rule: LabelRule = LabelRule.HIGHEST
    bucket_rule: BucketRule = BucketRule.FIFO

    @classmethod
    def from_name(cls, name: str) -> "HpfConfig":
        """Parse a two-letter code such as ``"hf"`` (highest label, FIFO)."""
        code = name.lower().removeprefix("hpf-")
        if len(code) != 2 or code[0] not in "hl" or code[1] not in "fl":
            raise ValueError(f"unknown HPF configuration {name!r}")
        return cls(
            LabelRule.HIGHEST if code[0] == "h" else LabelRule.LOWEST,
            BucketRule.FIFO if code[1] == "f" else BucketRule.LIFO,
        )


HPF_CONFIGS = {
    "hpf-hf": HpfConfig(LabelRule.HIGHEST, BucketRule.FIFO),
    "hpf-hl": HpfConfig(LabelRule.HIGHEST, BucketRule.LIFO),
    "hpf-lf": HpfConfig(LabelRule.LOWEST, BucketRule.FIFO),
    "hpf-ll": HpfConfig(LabelRule.LOWEST, BucketRule.LIFO),
}


class HpfState:
    """Forest, labels, excesses and strong-root buckets of one run."""

    def __init__(self, g: Graph, cfg: HpfConfig):
        n = g.n
        self.g = g
        self.cfg = cfg
        self.top = n  # unreachable label
        self.excess = list(g.tr_cap)
        self.label = [1 if e > 0 else 0 for e in self.excess]
        self.parent_arc = [NO_PARENT] * n  # arc from node to its parent
        self.children: list[set[int]] = [set() for _ in range(n)]
        self.cursor = [0] * n
        self.count = [0] * (n + 1)
        for x in self.label:
            self.count[x] += 1
        self.buckets: list[deque[int]] = [deque() for _ in range(n + 1)]
        self.lo = n
        self.hi = -1
        self.merges = 0
        self.relabels = 0
        for i in range(n):
            if self.excess[i] > 0:
                self._add_root(i)

    # -- buckets ------------------------------------------------------------

    def _add_root(self, r: int) -> None:
        lab = self.label[r]
        if lab >= self.top:
            return
        self.buckets[lab].append(r)
        if lab < self.lo:
            self.lo = lab
        if lab > self.hi:
            self.hi = lab

    def _is_live(self, r: int, lab: int) -> bool:
        return self.parent_arc[r] == NO_PARENT and self.excess[r] > 0 and self.label[r] == lab

    def next_root(self) -> int:
        lifo = self.cfg.bucket_rule is BucketRule.LIFO
        buckets = self.buckets
        if self.cfg.label_rule is LabelRule.HIGHEST:
            while self.hi >= 0:
                b = buckets[self.hi]
                while b:
                    r = b.pop() if lifo else b.popleft()
                    if self._is_live(r, self.hi):
                        return r
                self.hi -= 1
        else:
            while self.lo < self.top:
                b = buckets[self.lo]
                while b:
                    r = b.pop() if lifo else b.popleft()
                    if self._is_live(r, self.lo):
                        return r
                self.lo += 1
        self.hi, self.lo = -1, self.top
        return -1

    # -- tree operations ----------------------------------------------------

    def lowest_component(self, r: int) -> list[int]:
        """Nodes of r's tree sharing r's label (the tree minimum), by node id."""
        lab = self.label[r]
        label, children = self.label, self.children
        comp = [r]
        stack = [r]
        while stack:
            u = stack.pop()
            for c in children[u]:
                if label[c] == lab:
                    comp.append(c)
                    stack.append(c)
        comp.sort()
        return comp

    def find_merge_arc(self, comp: list[int]) -> int:
        g = self.g
        head, r_cap = g.head, g.r_cap
        out = g.out_arcs()
        label, cursor = self.label, self.cursor
        want = label[comp[0]] - 1
        for u in comp:
            arcs = out[u]
            k = cursor[u]
            while k < len(arcs):
                a = arcs[k]
                if r_cap[a] > 0 and label[head[a]] == want:
                    cursor[u] = k
                    return a
                k += 1
            cursor[u] = k
        return -1

    def merge(self, root: int, a: int) -> None:
        """Hang root's tree below head[a] via arc a and push root's surplus."""
        g = self.g
        head, r_cap, sister = g.head, g.r_cap, g.sister
        parent_arc, children, excess = self.parent_arc, self.children, self.excess
        self.merges += 1
        # reverse the path from the tail of a up to the old root
        cur = head[sister[a]]
        new_arc = a
        while True:
            old_arc = parent_arc[cur]
            parent_arc[cur] = new_arc
            children[head[new_arc]].add(cur)
            if old_arc == NO_PARENT:
                break
            up = head[old_arc]
            children[up].discard(cur)
            new_arc = sister[old_arc]
            cur = up
        # push the surplus from the old root towards the new root
        cur = root
        while excess[cur] > 0:
            pa = parent_arc[cur]
            if pa == NO_PARENT:
                break
            up = head[pa]
            was = excess[up]
            res = r_cap[pa]
            delta = excess[cur] if excess[cur] <= res else res
            r_cap[pa] = res - delta
            r_cap[sister[pa]] += delta
            excess[up] = was + delta
            excess[cur] -= delta
            if excess[cur] > 0:
                # saturated: cur keeps the rest as a new strong root
                parent_arc[cur] = NO_PARENT
                children[up].discard(cur)
                self._add_root(cur)
            cur = up
            if parent_arc[cur] == NO_PARENT:
                if was <= 0 < excess[cur]:
                    self._add_root(cur)
                break

    def relabel(self, comp: list[int]) -> None:
        label, count, cursor = self.label, self.count, self.cursor
        old = label[comp[0]]
        new = old + 1
        for u in comp:
            label[u] = new
            cursor[u] = 0
        count[old] -= len(comp)
        count[new] += len(comp)
        self.relabels += 1
        if count[old] == 0:
            self._gap(old)

    def _gap(self, g_level: int) -> None:
        """No node sits at g_level: nothing above it can reach a deficit."""
        top = self.top
        label, count = self.label, self.count
        for u in range(self.g.n):
            lab = label[u]
            if g_level < lab < top:
                count[lab] -= 1
                count[top] += 1
                label[u] = top

    def process(self, r: int) -> None:
        comp = self.lowest_component(r)
        a = self.find_merge_arc(comp)
        if a >= 0:
            self.merge(r, a)
        else:
            self.relabel(comp)
            self._add_root(r)

    # -- final labeling and checks -----------------------------------------

    def exact_labels(self) -> None:
        """Replace labels by residual distance to the nearest deficit node."""
        g = self.g
        n = g.n
        head, r_cap, sister = g.head, g.r_cap, g.sister
        out = g.out_arcs()
        d = [self.top] * n
        q = deque()
        for i in range(n):
            if self.excess[i] < 0:
                d[i] = 0
                q.append(i)
        while q:
            j = q.popleft()
            for a in out[j]:
                i = head[a]
                if d[i] == self.top and r_cap[sister[a]] > 0:
                    d[i] = d[j] + 1
                    q.append(i)
        self.label = d

    def check_invariants(self) -> bool:
        """Root-only excess, acyclic parents, and d(u) <= d(v) + 1 on residual arcs."""
        g = self.g
        n = g.n
        for i in range(n):
            if self.parent_arc[i] != NO_PARENT and self.excess[i] != 0:
                return False
        for i in range(n):
            seen = 0
            u = i
            while self.parent_arc[u] != NO_PARENT:
                u = g.head[self.parent_arc[u]]
                seen += 1
                if seen > n:
                    return False
        tail = g.tail
        d = self.label
        for a, r in enumerate(g.r_cap):
            if r > 0 and d[tail[a]] < self.top and d[tail[a]] > d[g.head[a]] + 1:
                return False
        return True


def hpf_run(g: Graph, cfg: HpfConfig | None = None) -> tuple[CutResult, HpfState]:
    cfg = cfg or HpfConfig()
    st = HpfState(g, cfg)
    for i in range(g.n):
        g.tr_cap[i] = 0  # terminal arcs saturated; the excess now lives in st
    while True:
        r = st.next_root()
        if r < 0:
            break
        st.process(r)
    st.exact_labels()
    side = source_closure(g, [i for i in range(g.n) if st.excess[i] > 0])
    return CutResult(cut_capacity(g, side), side), st


def hpf_solve(g: Graph, cfg: HpfConfig | str | None = None) -> CutResult:
    """Minimum cut of `g` by pseudoflow. Mutates the residuals of `g`."""
    if isinstance(cfg, str):
        cfg = HpfConfig.from_name(cfg)
    return hpf_run(g, cfg)[0]
