import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutflow.bk import bk_solve
from cutflow.graph import (
    INF_CAP,
    CapacityOverflowError,
    GraphBuilder,
    IndexRangeError,
    Side,
    cut_capacity,
    mem_footprint,
)
from oracle import RawProblem, brute_cut_value, brute_min_cut, random_problem


def test_new_builder_empty():
    b = GraphBuilder(3, 4)
    assert b.node_count == 3 and b.pair_count == 0
    assert b.src == [0, 0, 0] and b.snk == [0, 0, 0]


def test_builder_rejects_32bit_overflow():
    with pytest.raises(IndexRangeError):
        GraphBuilder(2**32, 0)


def test_builder_rejects_zero_nodes():
    with pytest.raises(ValueError):
        GraphBuilder(0)


def test_single_node_no_arcs_has_zero_flow():
    assert bk_solve(GraphBuilder(1, 0).build()).flow_value == 0


def test_fold_single_call():
    b = GraphBuilder(1)
    b.add_terminal(0, 5, 3)
    g = b.build()
    assert g.tr_cap == [2] and g.flow_constant == 3


def test_fold_repeated_calls_match_brute_force():
    b = GraphBuilder(1)
    b.add_terminal(0, 5, 3)
    b.add_terminal(0, 0, 4)
    g = b.build()
    assert g.tr_cap == [-2] and g.flow_constant == 5
    # unfolded: explicit s->x arcs 5 and 0, x->t arcs 3 and 4
    raw = RawProblem(1, [(0, 5, 3), (0, 0, 4)])
    assert bk_solve(g).flow_value == brute_min_cut(raw) == 5


def test_fold_zero_is_noop():
    b = GraphBuilder(2)
    b.add_terminal(1, 0, 0)
    g = b.build()
    assert g.tr_cap == [0, 0] and g.flow_constant == 0


def test_negative_capacities_rejected():
    b = GraphBuilder(2)
    with pytest.raises(ValueError):
        b.add_terminal(0, -1, 0)
    with pytest.raises(ValueError):
        b.add_edge(0, 1, -1)


def test_self_loop_rejected():
    with pytest.raises(ValueError):
        GraphBuilder(2).add_edge(1, 1, 3)


def test_node_range_checked():
    with pytest.raises(IndexError):
        GraphBuilder(2).add_edge(0, 2, 3)


def test_capacity_bound():
    b = GraphBuilder(2)
    b.add_edge(0, 1, INF_CAP)
    with pytest.raises(CapacityOverflowError):
        b.add_edge(0, 1, INF_CAP + 1)
    b2 = GraphBuilder(2)
    b2.add_terminal(0, INF_CAP, 0)
    with pytest.raises(CapacityOverflowError):
        b2.add_terminal(1, INF_CAP, 0)


def test_merge_sums_capacity():
    b = GraphBuilder(2)
    b.add_edge(0, 1, 3, 0, merge=True)
    b.add_edge(0, 1, 4, 0, merge=True)
    assert b.pair_count == 1 and b.caps == [7]


def test_merge_reverse_direction_joins_pair():
    b = GraphBuilder(2)
    b.add_edge(0, 1, 3, 1, merge=True)
    b.add_edge(1, 0, 2, 5, merge=True)
    assert b.pair_count == 1 and b.caps == [8] and b.rev_caps == [3]


def test_no_merge_keeps_pairs_and_value():
    p = RawProblem(3, [(0, 9, 0), (2, 0, 9)], [(0, 1, 3, 0), (0, 1, 3, 0), (1, 2, 10, 0)])
    unmerged = p.graph()
    merged = p.graph(merge=True)
    assert unmerged.arc_count == 6 and merged.arc_count == 4
    assert bk_solve(unmerged).flow_value == bk_solve(merged).flow_value == brute_min_cut(p) == 6


def test_zero_edge_is_legal():
    p = RawProblem(2, [(0, 4, 0), (1, 0, 4)], [(0, 1, 0, 0)])
    assert bk_solve(p.graph()).flow_value == 0


def test_packing_groups_outgoing_arcs():
    b = GraphBuilder(5)
    b.add_edge(0, 1, 1)
    b.add_edge(2, 3, 1)
    b.add_edge(0, 4, 1)
    g = b.build(pack=True)
    tails = g.tail
    for u in range(5):
        pos = [a for a in range(g.arc_count) if tails[a] == u]
        assert pos == list(range(pos[0], pos[0] + len(pos))) if pos else True
    # stable: node 0's arcs keep insertion order
    assert [g.head[a] for a in g.out_arcs()[0]] == [1, 4]


def test_empty_arc_list_value_is_flow_constant():
    b = GraphBuilder(3)
    b.add_terminal(0, 4, 7)
    b.add_terminal(2, 2, 1)
    g = b.build()
    assert bk_solve(g).flow_value == g.flow_constant == 5


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.booleans())
def test_topology_invariants(seed, pack):
    p = random_problem(random.Random(seed))
    g = p.graph(pack=pack)
    out = g.out_arcs()
    seen = sorted(a for arcs in out for a in arcs)
    assert seen == list(range(g.arc_count))
    for u, arcs in enumerate(out):
        for a in arcs:
            assert g.tail[a] == u
            assert g.rev(g.rev(a)) == a
            assert g.head[g.rev(a)] == u
        if pack and arcs:
            assert arcs == list(range(arcs[0], arcs[0] + len(arcs)))
    if not pack:
        assert all(g.sister[a] == a ^ 1 for a in range(g.arc_count))


def test_residual_arithmetic():
    b = GraphBuilder(2)
    b.add_edge(0, 1, 10, 2)
    g = b.build()
    assert g.residual_cap(0) == 10 and g.residual_cap(1) == 2
    # push 4 units forward
    g.r_cap[0] -= 4
    g.r_cap[1] += 4
    assert g.residual_cap(0) == 6 and g.residual_cap(g.rev(0)) == 4 + 2
    g.r_cap[0] -= 6
    g.r_cap[1] += 6
    assert g.residual_cap(0) == 0


def test_cut_capacity_single_node():
    b = GraphBuilder(1)
    b.add_terminal(0, 5, 3)
    g = b.build()
    assert cut_capacity(g, [Side.SOURCE]) == 3
    assert cut_capacity(g, [Side.SINK]) == 5


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_cut_capacity_matches_brute_force_cut(seed):
    rng = random.Random(seed)
    p = random_problem(rng)
    g = p.graph()
    side = [rng.choice([Side.SOURCE, Side.SINK]) for _ in range(p.n)]
    assert cut_capacity(g, side) == brute_cut_value(p, [s == Side.SINK for s in side])
    all_sink = [Side.SINK] * p.n
    assert cut_capacity(g, all_sink) == sum(cs for _, cs, _ in p.terminals)


def test_cut_capacity_wrong_length():
    with pytest.raises(ValueError):
        cut_capacity(GraphBuilder(2).build(), [Side.SINK])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_pair_conservation_after_solve(seed):
    p = random_problem(random.Random(seed))
    g = p.graph()
    before = [g.r_cap[a] + g.r_cap[g.rev(a)] for a in range(g.arc_count)]
    bk_solve(g)
    after = [g.r_cap[a] + g.r_cap[g.rev(a)] for a in range(g.arc_count)]
    assert before == after
    assert all(r >= 0 for r in g.r_cap)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 5))
def test_monotone_in_capacity(seed, bump):
    rng = random.Random(seed)
    p = random_problem(rng, n_min=2)
    base = bk_solve(p.graph()).flow_value
    if p.arcs and rng.random() < 0.5:
        k = rng.randrange(len(p.arcs))
        u, v, c, r = p.arcs[k]
        p.arcs[k] = (u, v, c + bump, r)
    else:
        p.terminals.append((rng.randrange(p.n), bump * rng.randint(0, 1), bump))
    assert bk_solve(p.graph()).flow_value >= base


def test_copy_and_reset_restore_capacities():
    p = random_problem(random.Random(3), n_min=4)
    g = p.graph()
    v = bk_solve(g).flow_value
    h = g.copy()
    assert h.r_cap == g.cap and h.tr_cap == g.tr_orig
    g.reset()
    assert bk_solve(g).flow_value == bk_solve(h).flow_value == v


def test_accounted_bytes_formula():
    b = GraphBuilder(4)
    b.add_edge(0, 1, 1)
    b.add_edge(2, 3, 1)
    assert b.build().accounted_bytes() == 20 * 4 + 24 * 4


def test_mem_footprint_examples():
    assert mem_footprint("MBK", 1000, 1000, 5000) == 143_000
    assert mem_footprint("HPF", 1000, 1000, 5000) == 392_000
    for model in ("HI-PR", "BK", "P-ARD"):
        assert mem_footprint(model, 0, 0, 0) == 0
    with pytest.raises(ValueError):
        mem_footprint("nope", 1, 1, 1)
