"""DIMACS max-flow text format and block partition files.

Grammar (one item per line, 1-based node ids)::

    c <comment>
    p max <nodes> <arcs>
    n <id> s
    n <id> t
    a <tail> <head> <cap>

The source and sink are dropped when building a graph: arcs out of the source
and into the sink become terminal capacities, a direct source-to-sink arc
becomes a flow constant, and arcs into the source or out of the sink are
ignored since no minimum cut can use them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, GraphBuilder
from .parallel import BlockPartition


class DimacsError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class MissingSource(DimacsError):
    pass


class MissingSink(DimacsError):
    pass


@dataclass
class ProblemFile:
    """A DIMACS problem as written, before any folding or merging."""

    node_count: int
    source: int
    sink: int
    arcs: list[tuple[int, int, int]] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)

    @property
    def inner_ids(self) -> list[int]:
        """1-based ids of non-terminal nodes, in graph node order."""
        return [i for i in range(1, self.node_count + 1) if i not in (self.source, self.sink)]

    @classmethod
    def parse(cls, text: str) -> "ProblemFile":
        header = None
        source = sink = None
        arcs: list[tuple[int, int, int]] = []
        comments: list[str] = []
        declared_arcs = 0
        for lineno, raw in enumerate(text.splitlines(), 1):
            parts = raw.split()
            if not parts:
                continue
            kind = parts[0]
            if kind == "c":
                comments.append(raw[1:].strip())
                continue
            if kind == "p":
                if header is not None:
                    raise DimacsError("second problem line", lineno)
                if len(parts) != 4 or parts[1] != "max":
                    raise DimacsError("expected 'p max <nodes> <arcs>'", lineno)
                header = _ints(parts[2:], lineno)
                if header[0] < 2 or header[1] < 0:
                    raise DimacsError("problem line needs nodes >= 2 and arcs >= 0", lineno)
                declared_arcs = header[1]
                continue
            if header is None:
                raise DimacsError(f"'{kind}' line before the problem line", lineno)
            n = header[0]
            if kind == "n":
                if len(parts) != 3 or parts[2] not in ("s", "t"):
                    raise DimacsError("expected 'n <id> s' or 'n <id> t'", lineno)
                (i,) = _ints(parts[1:2], lineno)
                _check_id(i, n, lineno)
                if parts[2] == "s":
                    if source is not None:
                        raise DimacsError("source declared twice", lineno)
                    source = i
                else:
                    if sink is not None:
                        raise DimacsError("sink declared twice", lineno)
                    sink = i
                if source is not None and source == sink:
                    raise DimacsError("source and sink are the same node", lineno)
            elif kind == "a":
                if len(parts) != 4:
                    raise DimacsError("expected 'a <tail> <head> <cap>'", lineno)
                u, v, c = _ints(parts[1:], lineno)
                _check_id(u, n, lineno)
                _check_id(v, n, lineno)
                if c < 0:
                    raise DimacsError(f"negative capacity {c}", lineno)
                if u == v:
                    raise DimacsError(f"self-loop on node {u}", lineno)
                arcs.append((u, v, c))
            else:
                raise DimacsError(f"unknown line type '{kind}'", lineno)
        if header is None:
            raise DimacsError("missing problem line")
        if source is None:
            raise MissingSource("no 'n <id> s' line")
        if sink is None:
            raise MissingSink("no 'n <id> t' line")
        if len(arcs) != declared_arcs:
            raise DimacsError(f"problem line declares {declared_arcs} arcs, found {len(arcs)}")
        return cls(header[0], source, sink, arcs, comments)

    def to_text(self) -> str:
        lines = [f"c {c}" if c else "c" for c in self.comments]
        lines.append(f"p max {self.node_count} {len(self.arcs)}")
        lines.append(f"n {self.source} s")
        lines.append(f"n {self.sink} t")
        lines += [f"a {u} {v} {c}" for u, v, c in self.arcs]
        return "\n".join(lines) + "\n"

    def terminal_and_arc_lists(self) -> tuple[int, list[tuple[int, int, int]], list[tuple[int, int, int]], int]:
        """(node count, terminal triples, neighbor triples, constant) in 0-based ids."""
        ids = self.inner_ids
        if not ids:
            raise DimacsError("graph has no nodes besides source and sink")
        local = {v: k for k, v in enumerate(ids)}
        s, t = self.source, self.sink
        terms: list[tuple[int, int, int]] = []
        arcs: list[tuple[int, int, int]] = []
        constant = 0
        for u, v, c in self.arcs:
            if u == s and v == t:
                constant += c
            elif u == s:
                terms.append((local[v], c, 0))
            elif v == t:
                terms.append((local[u], 0, c))
            elif v == s or u == t:
                continue
            else:
                arcs.append((local[u], local[v], c))
        return len(ids), terms, arcs, constant

    def builder(self) -> GraphBuilder:
        n, terms, arcs, constant = self.terminal_and_arc_lists()
        return builder_from_lists(n, terms, arcs, constant)


def builder_from_lists(n, terms, arcs, constant=0) -> GraphBuilder:
    b = GraphBuilder(n, len(arcs))
    for i, cs, ct in terms:
        b.add_terminal(i, cs, ct)
    for u, v, c in arcs:
        b.add_edge(u, v, c, merge=True)
    if constant:
        b.add_constant(constant)
    return b


def _ints(parts: list[str], lineno: int) -> list[int]:
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise DimacsError(f"expected integers, got {' '.join(parts)!r}", lineno) from None


def _check_id(i: int, n: int, lineno: int) -> None:
    if not 1 <= i <= n:
        raise DimacsError(f"node id {i} out of range [1, {n}]", lineno)


def parse_dimacs(text: str) -> GraphBuilder:
    return ProblemFile.parse(text).builder()


def write_dimacs(g: Graph | GraphBuilder) -> str:
    """DIMACS text with graph nodes 1..n, source n + 1 and sink n + 2.

    One `a` line per non-zero directed capacity; a flow constant becomes a
    direct source-to-sink arc.
    """
    if isinstance(g, GraphBuilder):
        n = g.node_count
        src, snk = g.src, g.snk
        arcs = []
        for u, v, c, r in zip(g.tails, g.heads, g.caps, g.rev_caps):
            if c:
                arcs.append((u, v, c))
            if r:
                arcs.append((v, u, r))
        constant = g.constant
    else:
        n = g.n
        src = [t if t > 0 else 0 for t in g.tr_orig]
        snk = [-t if t < 0 else 0 for t in g.tr_orig]
        tail = g.tail
        arcs = [(tail[a], g.head[a], c) for a, c in enumerate(g.cap) if c]
        constant = g.flow_constant
    s, t = n + 1, n + 2
    out = []
    if constant:
        out.append((s, t, constant))
    for i in range(n):
        if src[i]:
            out.append((s, i + 1, src[i]))
        if snk[i]:
            out.append((i + 1, t, snk[i]))
    out += [(u + 1, v + 1, c) for u, v, c in arcs]
    return ProblemFile(n + 2, s, t, out).to_text()


# -- block partition files ---------------------------------------------------


def read_blocks(text: str, n: int) -> BlockPartition:
    """One block id per line; ids are compacted to 0..k-1 in sorted order."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("c")]
    if len(lines) != n:
        raise ValueError(f"block file has {len(lines)} entries, graph has {n} nodes")
    try:
        raw = [int(x) for x in lines]
    except ValueError as e:
        raise ValueError(f"block file: {e}") from None
    compact = {b: k for k, b in enumerate(sorted(set(raw)))}
    return BlockPartition([compact[b] for b in raw], len(compact))


def write_blocks(p: BlockPartition) -> str:
    return "".join(f"{b}\n" for b in p.block_of)
