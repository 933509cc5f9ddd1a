"""Block partitions and three block-parallel max-flow schemes.

* Liu-Sun: sever inter-block arcs, solve blocks with BK in parallel, then
  merge pairs of blocks back with incremental BK re-solves.
* Dual decomposition: overlapping blocks with duplicated nodes; duplicates'
  terminal capacities are moved by a supergradient step until they agree.
* Region discharge (augmenting-path variant): blocks repeatedly push excess
  to the sink or across their boundary, with flows synchronized in between.

Workers are threads. The schemes are correct under any interleaving; the
interpreter lock means they do not run faster than serial BK here.
"""

from __future__ import annotations

import threading
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .bk import BkArrays, BkSolver
from .graph import INF_CAP, CutResult, Graph, GraphBuilder, Side, cut_capacity


@dataclass
class BlockPartition:
    """Disjoint node blocks: `block_of[i]` in [0, block_count)."""

    block_of: list[int]
    block_count: int

    def __post_init__(self):
        sizes = [0] * self.block_count
        for b in self.block_of:
            if not 0 <= b < self.block_count:
                raise ValueError(f"block id {b} out of range")
            sizes[b] += 1
        if any(s == 0 for s in sizes):
            raise ValueError("every block must be nonempty")

    @property
    def n(self) -> int:
        return len(self.block_of)

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.block_count)]
        for i, b in enumerate(self.block_of):
            out[b].append(i)
        return out


@dataclass
class OverlapPartition:
    """Overlapping blocks. `copies[i]` lists (block, local id) for every copy of i."""

    blocks: list[list[int]]
    copies: list[list[tuple[int, int]]]
    home: list[int]
    # pair representative arcs owned by each block
    arcs: list[list[int]] = field(default_factory=list)

    @property
    def duplicates(self) -> dict[int, list[tuple[int, int]]]:
        return {i: c for i, c in enumerate(self.copies) if len(c) > 1}


def _is_power_of_two(k: int) -> bool:
    return k >= 1 and k & (k - 1) == 0


def split_grid(dims: Sequence[int], k: int) -> BlockPartition:
    """Halve the grid along its longest axis until `k` blocks remain.

    `dims` lists extents with the first axis fastest (x, then y, then z).
    Ties between equally long axes split the last of them.
    """
    if not _is_power_of_two(k):
        raise ValueError(f"block count {k} is not a power of two")
    dims = list(dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError("grid extents must be positive")
    boxes = [[(0, d) for d in dims]]
    while len(boxes) < k:
        nxt = []
        for box in boxes:
            sizes = [hi - lo for lo, hi in box]
            longest = max(sizes)
            if longest < 2:
                raise ValueError(f"cannot split {dims} into {k} blocks")
            axis = max(a for a, s in enumerate(sizes) if s == longest)
            lo, hi = box[axis]
            mid = lo + (hi - lo) // 2
            left = list(box)
            right = list(box)
            left[axis] = (lo, mid)
            right[axis] = (mid, hi)
            nxt += [left, right]
        boxes = nxt
    n = 1
    for d in dims:
        n *= d
    block_of = [0] * n
    strides = [1]
    for d in dims[:-1]:
        strides.append(strides[-1] * d)
    for b, box in enumerate(boxes):
        idx = [0]
        for (lo, hi), s in zip(box, strides):
            idx = [base + c * s for base in idx for c in range(lo, hi)]
        for i in idx:
            block_of[i] = b
    return BlockPartition(block_of, k)


def contiguous_partition(n: int, k: int) -> BlockPartition:
    """`k` (or fewer, if n < k) blocks of consecutive node ids."""
    k = max(1, min(k, n))
    return BlockPartition([i * k // n for i in range(n)], k)


def boundary_sets(g: Graph, p: BlockPartition) -> list[set[int]]:
    """Per block R: nodes outside R that are the head of a stored arc from R."""
    out = [set() for _ in range(p.block_count)]
    block_of = p.block_of
    tail = g.tail
    for a, v in enumerate(g.head):
        bu = block_of[tail[a]]
        if block_of[v] != bu:
            out[bu].add(v)
    return out


def _run_all(threads: int, fn, items):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# -- Liu-Sun adaptive bottom-up merging --------------------------------------


@dataclass
class SeveredArcs:
    """Inter-block arc pairs of one block pair with their original residuals."""

    arcs: list[int] = field(default_factory=list)
    caps: list[tuple[int, int]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(c + r for c, r in self.caps)


@dataclass
class LiuSunStats:
    merges: int = 0
    severed_total: int = 0
    restored_total: int = 0


def sever(g: Graph, p: BlockPartition) -> dict[tuple[int, int], SeveredArcs]:
    """Zero every inter-block pair, keyed by (low block, high block)."""
    pairs: dict[tuple[int, int], SeveredArcs] = {}
    tail, head, r_cap, sister = g.tail, g.head, g.r_cap, g.sister
    block_of = p.block_of
    for a in g.pairs():
        bu, bv = block_of[tail[a]], block_of[head[a]]
        if bu == bv:
            continue
        key = (bu, bv) if bu < bv else (bv, bu)
        rec = pairs.setdefault(key, SeveredArcs())
        rec.arcs.append(a)
        rec.caps.append((r_cap[a], r_cap[sister[a]]))
        r_cap[a] = 0
        r_cap[sister[a]] = 0
    return pairs


def liu_sun_solve(
    g: Graph, p: BlockPartition, threads: int = 1, stats: LiuSunStats | None = None
) -> CutResult:
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if p.n != g.n:
        raise ValueError("partition size does not match the graph")
    stats = stats if stats is not None else LiuSunStats()
    pairs = sever(g, p)
    stats.severed_total = sum(r.total for r in pairs.values())

    arrays = BkArrays(g.n)
    solvers = [BkSolver(g, nodes, arrays) for nodes in p.blocks()]
    _run_all(threads, lambda s: s.solve(), solvers)

    tail, head, r_cap, sister = g.tail, g.head, g.r_cap, g.sister
    root = list(range(p.block_count))  # union-find over block ids
    busy = [False] * p.block_count
    cond = threading.Condition()
    in_flight = [0]

    def find(b: int) -> int:
        while root[b] != b:
            root[b] = root[root[b]]
            b = root[b]
        return b

    def score(key: tuple[int, int], rec: SeveredArcs) -> tuple[int, int, tuple[int, int]]:
        # arcs that can seed an augmenting path as soon as they are restored
        seeds = 0
        for a, (c, rc) in zip(rec.arcs, rec.caps):
            u, v = tail[a], head[a]
            su = arrays.parent[u] != -1 and not arrays.is_sink[u]
            sv = arrays.parent[v] != -1 and not arrays.is_sink[v]
            if c and su and not sv:
                seeds += 1
            if rc and sv and not su:
                seeds += 1
        return (-seeds, -rec.total, key)

    def take_pair():
        with cond:
            while True:
                ready = [(k, r) for k, r in pairs.items() if not busy[k[0]] and not busy[k[1]]]
                if ready:
                    key, rec = min(ready, key=lambda kr: score(*kr))
                    del pairs[key]
                    busy[key[0]] = busy[key[1]] = True
                    in_flight[0] += 1
                    return key, rec
                if not pairs or in_flight[0] == 0:
                    return None
                cond.wait()

    def merge(key: tuple[int, int], rec: SeveredArcs) -> None:
        keep, gone = key
        s, t = solvers[keep], solvers[gone]
        s.absorb(t)
        solvers[gone] = None
        for a, (c, rc) in zip(rec.arcs, rec.caps):
            r_cap[a] = c
            r_cap[sister[a]] = rc
            s.mark_node(tail[a])
            s.mark_node(head[a])
        s.resolve()
        with cond:
            stats.merges += 1
            stats.restored_total += rec.total
            root[gone] = keep
            # re-key pairs that touched the absorbed block
            for k in [k for k in pairs if gone in k]:
                r = pairs.pop(k)
                other = k[0] if k[1] == gone else k[1]
                nk = (min(keep, other), max(keep, other))
                if nk in pairs:
                    pairs[nk].arcs += r.arcs
                    pairs[nk].caps += r.caps
                else:
                    pairs[nk] = r
            busy[keep] = busy[gone] = False
            in_flight[0] -= 1
            cond.notify_all()

    def worker(_: int) -> None:
        while True:
            job = take_pair()
            if job is None:
                with cond:
                    cond.notify_all()
                return
            merge(*job)

    _run_all(threads, worker, list(range(threads)))
    assert not pairs
    flow = g.flow_constant + sum(s.flow for s in solvers if s is not None)
    side = [Side.SOURCE if arrays.parent[i] != -1 and not arrays.is_sink[i] else Side.SINK for i in range(g.n)]
    return CutResult(flow, side)


# -- dual decomposition ------------------------------------------------------


@dataclass
class NonConvergence:
    """Duplicates still disagreed after `iterations` rounds."""

    iterations: int
    disagreeing: int


@dataclass
class DdStats:
    iterations: int = 0  # block solves performed, counting the first


def make_overlapping(g: Graph, p: BlockPartition) -> OverlapPartition:
    """Add each node to the home block of every neighbor (closure rule)."""
    n = g.n
    home = list(p.block_of)
    member: list[set[int]] = [{home[i]} for i in range(n)]
    tail, head = g.tail, g.head
    for a in g.pairs():
        u, v = tail[a], head[a]
        member[u].add(home[v])
        member[v].add(home[u])
    blocks: list[list[int]] = [[] for _ in range(p.block_count)]
    for i in range(n):
        for b in sorted(member[i]):
            blocks[b].append(i)
    copies: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for b, nodes in enumerate(blocks):
        for local, i in enumerate(nodes):
            copies[i].append((b, local))
    arcs: list[list[int]] = [[] for _ in range(p.block_count)]
    for a in g.pairs():
        u, v = tail[a], head[a]
        arcs[min(member[u] & member[v])].append(a)
    return OverlapPartition(blocks, copies, home, arcs)


def _split_terminal(tr: int, d: int) -> list[int]:
    q, r = divmod(tr, d)
    return [q + 1 if k < r else q for k in range(d)]


def _block_graph(g: Graph, op: OverlapPartition, b: int, scale: int = 1) -> Graph:
    nodes = op.blocks[b]
    local = {i: k for k, i in enumerate(nodes)}
    bld = GraphBuilder(len(nodes), len(op.arcs[b]))
    tr = g.tr_orig
    for i in nodes:
        cps = op.copies[i]
        share = _split_terminal(scale * tr[i], len(cps))[[c[0] for c in cps].index(b)]
        bld.add_terminal(local[i], max(share, 0), max(-share, 0))
    tail, head, cap, sister = g.tail, g.head, g.cap, g.sister
    for a in op.arcs[b]:
        bld.add_edge(local[tail[a]], local[head[a]], scale * cap[a], scale * cap[sister[a]])
    return bld.build()


def dd_solve(
    g: Graph,
    op: OverlapPartition,
    threads: int = 1,
    max_iters: int = 1000,
    step0: int | None = None,
    scale: int = 64,
    stats: DdStats | None = None,
) -> CutResult | NonConvergence:
    """Supergradient dual decomposition; step tau_t = max(1, step0 // (t + 1))."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if step0 is None:
        # sized to the coupling strength; terminal-sized steps overshoot
        step0 = scale * max(g.cap, default=1)
    step0 = max(step0, 1)
    block_graphs = [_block_graph(g, op, b, scale) for b in range(len(op.blocks))]
    solvers = [BkSolver(bg) for bg in block_graphs]
    dups = op.duplicates
    _run_all(threads, lambda s: s.solve(), solvers)
    disagree = 0
    for t in range(max_iters):
        if stats is not None:
            stats.iterations = t + 1
        disagree = 0
        for copies in dups.values():
            sides = [solvers[b].in_source_tree(loc) for b, loc in copies]
            votes = sum(sides)
            if votes in (0, len(sides)):
                continue
            disagree += 1
            tau = max(1, step0 // (t + 1))
            d = len(sides)
            for (b, loc), x in zip(copies, sides):
                delta = tau * (d * int(x) - votes)
                if delta > 0:
                    solvers[b].add_tweights(loc, 0, delta)
                else:
                    solvers[b].add_tweights(loc, -delta, 0)
                solvers[b].mark_node(loc)
        if not disagree:
            side = [Side.SINK] * g.n
            for i, copies in enumerate(op.copies):
                b, loc = copies[0]
                side[i] = solvers[b].side_of(loc)
            return CutResult(cut_capacity(g, side), side)
        if t + 1 < max_iters:
            _run_all(threads, lambda s: s.resolve(), solvers)
    return NonConvergence(max_iters, disagree)


# -- region discharge --------------------------------------------------------


@dataclass
class ArdStats:
    sweeps: int = 0
    boundary_nodes: int = 0

    @property
    def sweep_bound(self) -> int:
        return 2 * self.boundary_nodes**2 + 1


def _crossing_labels(g: Graph, block_of: list[int]) -> list[float]:
    """Fewest block crossings on a residual path to a node with sink residual."""
    inf = float("inf")
    n = g.n
    head, r_cap, sister = g.head, g.r_cap, g.sister
    out = g.out_arcs()
    d: list[float] = [inf] * n
    q: deque[int] = deque()
    for i in range(n):
        if g.tr_cap[i] < 0:
            d[i] = 0
            q.append(i)
    while q:
        v = q.popleft()
        dv = d[v]
        for a in out[v]:
            u = head[a]
            if r_cap[sister[a]] <= 0:
                continue
            w = 0 if block_of[u] == block_of[v] else 1
            if dv + w < d[u]:
                d[u] = dv + w
                if w:
                    q.append(u)
                else:
                    q.appendleft(u)
    return d


def _discharge(g: Graph, nodes: list[int], boundary: set[int], block_of: list[int], b: int, labels):
    """Staged BK on one block; returns residual updates and crossing flows."""
    order = list(nodes) + sorted(boundary)
    local = {i: k for k, i in enumerate(order)}
    n_in = len(nodes)
    tail, head, r_cap, sister = g.tail, g.head, g.r_cap, g.sister
    out = g.out_arcs()
    bld = GraphBuilder(len(order))
    for i in nodes:
        t = g.tr_cap[i]
        bld.add_terminal(local[i], max(t, 0), max(-t, 0))
    inner: list[int] = []
    cross: list[int] = []
    for i in nodes:
        for a in out[i]:
            j = head[a]
            if block_of[j] == b:
                if a < sister[a]:
                    inner.append(a)
            else:
                cross.append(a)
    for a in inner:
        bld.add_edge(local[tail[a]], local[head[a]], r_cap[a], r_cap[sister[a]])
    for a in cross:
        bld.add_edge(local[tail[a]], local[head[a]], r_cap[a], 0)
    lg = bld.build()
    s = BkSolver(lg)
    s.solve()
    finite = sorted({labels[v] for v in boundary if labels[v] != float("inf")})
    for stage in finite:
        admitted = [v for v in boundary if labels[v] == stage]
        for v in admitted:
            s.add_tweights(local[v], 0, INF_CAP)
            s.mark_node(local[v])
        s.resolve()
    inner_res = [(a, lg.r_cap[2 * k], lg.r_cap[2 * k + 1]) for k, a in enumerate(inner)]
    base = len(inner)
    cross_flow = [(a, lg.cap[2 * (base + k)] - lg.r_cap[2 * (base + k)]) for k, a in enumerate(cross)]
    tr_res = [(i, lg.tr_cap[k]) for k, i in enumerate(order[:n_in])]
    return inner_res, cross_flow, tr_res


def ard_solve(g: Graph, p: BlockPartition, threads: int = 1, stats: ArdStats | None = None) -> CutResult:
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if p.n != g.n:
        raise ValueError("partition size does not match the graph")
    stats = stats if stats is not None else ArdStats()
    blocks = p.blocks()
    bsets = boundary_sets(g, p)
    stats.boundary_nodes = len(set().union(*bsets)) if bsets else 0
    r_cap, sister, head = g.r_cap, g.sister, g.head
    tr = g.tr_cap
    while True:
        if stats.sweeps >= stats.sweep_bound:
            raise RuntimeError(f"region discharge exceeded {stats.sweep_bound} sweeps")
        stats.sweeps += 1
        labels = _crossing_labels(g, p.block_of)
        results = _run_all(
            threads,
            lambda b: _discharge(g, blocks[b], bsets[b], p.block_of, b, labels),
            list(range(p.block_count)),
        )
        crossed = 0
        for inner_res, cross_flow, tr_res in results:
            for a, ra, rs in inner_res:
                r_cap[a] = ra
                r_cap[sister[a]] = rs
            for i, t in tr_res:
                tr[i] = t
        for _, cross_flow, _ in results:
            for a, f in cross_flow:
                if f:
                    crossed += f
                    r_cap[a] -= f
                    r_cap[sister[a]] += f
                    tr[head[a]] += f
        if not crossed:
            break
    # source side: reachable from remaining excess
    seen = [False] * g.n
    q = deque(i for i in range(g.n) if tr[i] > 0)
    for i in q:
        seen[i] = True
    out = g.out_arcs()
    while q:
        u = q.popleft()
        for a in out[u]:
            v = head[a]
            if not seen[v] and r_cap[a] > 0:
                seen[v] = True
                q.append(v)
    side = [Side.SOURCE if x else Side.SINK for x in seen]
    return CutResult(cut_capacity(g, side), side)
