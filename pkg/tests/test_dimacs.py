from pathlib import Path

import networkx as nx
import pytest

from cutflow.bk import bk_solve
from cutflow.dimacs import (
    DimacsError,
    MissingSink,
    MissingSource,
    ProblemFile,
    parse_dimacs,
    read_blocks,
    write_blocks,
    write_dimacs,
)
from cutflow.hpf import hpf_solve
from cutflow.parallel import split_grid

CORPUS = sorted((Path(__file__).parent / "data").glob("*.max"))


def nx_maxflow(text: str) -> int:
    """Reference value computed on the raw file, without folding or merging."""
    p = ProblemFile.parse(text)
    G = nx.DiGraph()
    for u, v, c in p.arcs:
        if G.has_edge(u, v):
            G[u][v]["capacity"] += c
        else:
            G.add_edge(u, v, capacity=c)
    if p.source not in G or p.sink not in G:
        return 0
    return int(nx.maximum_flow_value(G, p.source, p.sink))


def solve_text(text: str, solver=bk_solve) -> int:
    return solver(parse_dimacs(text).build()).flow_value


CHAIN = "p max 3 2\nn 1 s\nn 3 t\na 1 2 5\na 2 3 3\n"


def test_chain_example():
    assert solve_text(CHAIN) == 3


def test_duplicate_arcs_merge():
    b = parse_dimacs("p max 4 3\nn 1 s\nn 4 t\na 2 3 3\na 2 3 3\na 1 2 1\n")
    assert b.pair_count == 1 and b.caps == [6]


def test_missing_sink_and_source():
    with pytest.raises(MissingSink):
        parse_dimacs("p max 3 1\nn 1 s\na 1 2 4\n")
    with pytest.raises(MissingSource):
        parse_dimacs("p max 3 1\nn 3 t\na 1 2 4\n")


@pytest.mark.parametrize(
    "text, line",
    [
        ("p max x 2\n", 1),
        ("p min 3 2\n", 1),
        ("c hi\np max 3 1\nn 1 s\nn 3 t\na 1 4 2\n", 5),
        ("p max 3 1\nn 1 s\nn 3 t\na 1 2 -4\n", 4),
        ("p max 3 1\nn 1 s\nn 3 t\na 2 2 4\n", 4),
        ("a 1 2 3\np max 3 1\n", 1),
        ("p max 3 0\np max 3 0\n", 2),
        ("p max 3 0\nn 1 s\nn 1 t\n", 3),
        ("p max 3 0\nn 1 q\n", 2),
        ("p max 3 0\nx 1\n", 2),
    ],
)
def test_errors_report_line_numbers(text, line):
    with pytest.raises(DimacsError) as info:
        ProblemFile.parse(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_arc_count_mismatch():
    with pytest.raises(DimacsError):
        ProblemFile.parse("p max 3 2\nn 1 s\nn 3 t\na 1 2 5\n")


def test_no_inner_nodes():
    with pytest.raises(DimacsError):
        parse_dimacs("p max 2 1\nn 1 s\nn 2 t\na 1 2 5\n")


def test_problem_file_round_trip_is_exact():
    for path in CORPUS:
        p = ProblemFile.parse(path.read_text())
        assert ProblemFile.parse(p.to_text()) == p


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_values_and_round_trip(path):
    text = path.read_text()
    expected = nx_maxflow(text)
    assert solve_text(text) == expected
    assert solve_text(text, hpf_solve) == expected
    # builder and graph writers both preserve the value
    b = parse_dimacs(text)
    assert solve_text(write_dimacs(b)) == expected
    assert solve_text(write_dimacs(b.build())) == expected
    assert nx_maxflow(write_dimacs(b)) == expected


def test_write_empty_graph_is_header_only():
    b = parse_dimacs("p max 4 0\nn 1 s\nn 4 t\n")
    text = write_dimacs(b)
    assert [ln.split()[0] for ln in text.splitlines()] == ["p", "n", "n"]


def test_write_merged_graph_one_line_per_pair():
    b = parse_dimacs("p max 4 3\nn 1 s\nn 4 t\na 2 3 3\na 2 3 4\na 3 2 1\n")
    arcs = [ln for ln in write_dimacs(b).splitlines() if ln.startswith("a")]
    assert sorted(arcs) == ["a 1 2 7", "a 2 1 1"]


def test_read_blocks():
    assert read_blocks("0\n0\n0\n", 3).block_count == 1
    p = read_blocks("0\n1\n0\n1\n", 4)
    assert p.block_count == 2 and p.block_of == [0, 1, 0, 1]
    # ids are compacted
    assert read_blocks("5\n9\n5\n", 3).block_of == [0, 1, 0]
    with pytest.raises(ValueError):
        read_blocks("0\n1\n", 3)
    with pytest.raises(ValueError):
        read_blocks("0\nx\n", 2)


def test_blocks_round_trip():
    p = split_grid((4, 4), 4)
    assert read_blocks(write_blocks(p), 16) == p
