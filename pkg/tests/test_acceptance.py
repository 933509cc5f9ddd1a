"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v` to see the summary lines.
"""

import random
import time
from pathlib import Path

import pytest

from cutflow import bench as bench_mod
from cutflow.bk import bk_solve
from cutflow.dimacs import ProblemFile, parse_dimacs, write_dimacs
from cutflow.energy import EnergyProblem, QpboLabel, build_submodular, energy_of, labeling_from_cut, solve_qpbo
from cutflow.graph import CutResult, cut_capacity, mem_footprint
from cutflow.hpf import HPF_CONFIGS, hpf_solve
from cutflow.parallel import (
    ArdStats,
    BlockPartition,
    LiuSunStats,
    NonConvergence,
    ard_solve,
    boundary_sets,
    dd_solve,
    liu_sun_solve,
    make_overlapping,
    split_grid,
)
from cutflow.ppr import ppr_solve
from cutflow.bench import ValueMismatch, run_bench
from cutflow.selector import RpSample, extract_features, mean_rp, predict, rp_score, train_tree
from cutflow.solvers import SOLVERS, SolverSpec
from oracle import brute_energy, brute_min_cut, random_problem
from test_energy import random_energy

DATA = Path(__file__).parent / "data"

SERIAL = {
    "bk": bk_solve,
    "ppr-fifo": lambda g: ppr_solve(g, "fifo"),
    "ppr-hi": lambda g: ppr_solve(g, "hi"),
    **{name: (lambda c: lambda g: hpf_solve(g, c))(cfg) for name, cfg in HPF_CONFIGS.items()},
}


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def random_partition(rng, n, k):
    ids = list(range(k)) + [rng.randrange(k) for _ in range(n - k)]
    rng.shuffle(ids)
    return BlockPartition(ids, k)


def grid_energy(w, seed, umax, pmax):
    """w^3 6-connected grid with random unaries and Potts-like pairwise terms."""
    rng = random.Random(seed)
    n = w**3
    unary = [(rng.randint(0, umax), rng.randint(0, umax)) for _ in range(n)]
    pairwise = []
    for z in range(w):
        for y in range(w):
            for x in range(w):
                i = x + w * (y + w * z)
                if x + 1 < w:
                    pairwise.append((i, i + 1, 0, b := rng.randint(1, pmax), b, 0))
                if y + 1 < w:
                    pairwise.append((i, i + w, 0, b := rng.randint(1, pmax), b, 0))
                if z + 1 < w:
                    pairwise.append((i, i + w * w, 0, b := rng.randint(1, pmax), b, 0))
    return EnergyProblem(n, unary, pairwise)


def test_criterion_1_oracle_equivalence(report):
    rng = random.Random(2024)
    t0 = time.perf_counter()
    bad = []
    for k in range(500):
        p = random_problem(rng, n_max=10, m_max=30, cap_max=10)
        want = brute_min_cut(p)
        for name, solve in SERIAL.items():
            got = solve(p.graph()).flow_value
            if got != want:
                bad.append((k, name, got, want))
    elapsed = time.perf_counter() - t0
    report(1, not bad and elapsed < 30, f"500 graphs x {len(SERIAL)} solvers, {len(bad)} mismatches, {elapsed:.1f}s")


def test_criterion_2_duality(report):
    rng = random.Random(7)
    checked = bad = 0
    instances = [random_problem(rng, n_min=2, n_max=20, m_max=60) for _ in range(200)]
    corpus = [ProblemFile.parse(f.read_text()) for f in sorted(DATA.glob("*.max"))]
    graphs = [lambda p=p: p.graph() for p in instances]
    graphs += [lambda f=f: f.builder().build() for f in corpus]
    for make in graphs:
        n = make().n
        part = random_partition(rng, n, min(n, rng.randint(1, 4)))
        for name, spec in SOLVERS.items():
            g = make()
            res = spec.run(g, part, 2)
            if isinstance(res, NonConvergence):
                continue
            checked += 1
            bad += cut_capacity(g, res.side) != res.flow_value
    report(2, bad == 0, f"{checked} solver runs, {bad} with cut capacity != flow value")


def test_criterion_3_parallel_equals_serial(report):
    rng = random.Random(33)
    t0 = time.perf_counter()
    bad = []
    dd_conv = 0
    for k in range(200):
        p = random_problem(rng, n_min=2, n_max=40, m_max=120)
        want = bk_solve(p.graph()).flow_value
        part = random_partition(rng, p.n, rng.randint(2, min(8, p.n)))
        threads = rng.randint(1, 8)
        got = {
            "liusun": liu_sun_solve(p.graph(), part, threads).flow_value,
            "ard": ard_solve(p.graph(), part, threads).flow_value,
        }
        g = p.graph()
        res = dd_solve(g, make_overlapping(g, part), threads, max_iters=300)
        if not isinstance(res, NonConvergence):
            dd_conv += 1
            got["dd"] = res.flow_value
        bad += [(k, a, v, want) for a, v in got.items() if v != want]

    e = grid_energy(32, seed=1, umax=1000, pmax=300)
    want = bk_solve(build_submodular(e)[0]).flow_value
    grid_got = {
        "liusun": liu_sun_solve(build_submodular(e)[0], split_grid((32, 32, 32), 64), 8).flow_value,
        "ard": ard_solve(build_submodular(e)[0], split_grid((32, 32, 32), 64), 8).flow_value,
    }
    g, _ = build_submodular(e)
    res = dd_solve(g, make_overlapping(g, split_grid((32, 32, 32), 8)), 8)
    grid_dd = "did not converge"
    if not isinstance(res, NonConvergence):
        grid_got["dd"] = res.flow_value
        grid_dd = "converged"
    bad += [("grid", a, v, want) for a, v in grid_got.items() if v != want]
    elapsed = time.perf_counter() - t0
    report(
        3,
        not bad and elapsed < 120,
        f"200 random + 32^3 grid; {len(bad)} mismatches; dd converged on {dd_conv}/200 random, "
        f"grid dd {grid_dd}; {elapsed:.1f}s",
    )


def test_criterion_4_energy_oracle(report):
    rng = random.Random(44)
    bad_value = bad_qpbo = 0
    for _ in range(200):
        e = random_energy(rng, n_max=12)
        best, _ = brute_energy(e.unary, e.pairwise)
        g, offset = build_submodular(e)
        res = bk_solve(g)
        bad_value += res.flow_value + offset != best
        bad_value += energy_of(e, labeling_from_cut(res)) != best
        labels = solve_qpbo(e)
        bad_qpbo += any(lab == QpboLabel.UNLABELED for lab in labels)
    bad_persist = 0
    for _ in range(100):
        e = random_energy(rng, n_max=10, submodular=False, p_pair=0.5)
        labels = solve_qpbo(e)
        _, opts = brute_energy(e.unary, e.pairwise)
        ok = any(all(lab == QpboLabel.UNLABELED or x[i] == lab for i, lab in enumerate(labels)) for x in opts)
        bad_persist += not ok
    report(
        4,
        bad_value == bad_qpbo == bad_persist == 0,
        f"value errors {bad_value}/200, qpbo unlabeled {bad_qpbo}/200, persistency failures {bad_persist}/100",
    )


# hand-computed: per-node*1000 + per-terminal*1000 + per-arc*5000
FOOTPRINTS = {
    "HI-PR": 40_000 + 40_000 + 200_000,
    "HPF": 104_000 + 48_000 + 240_000,
    "EIBFS": 72_000 + 360_000,
    "EIBFS-I": 29_000 + 250_000,
    "EIBFS-I-NR": 49_000 + 120_000,
    "BK": 48_000 + 320_000,
    "MBK": 23_000 + 120_000,
    "MBK-R": 23_000 + 240_000,
    "P-PPR": 48_000 + 68_000 + 340_000,
    "Liu-Sun": 25_000 + 120_000,
    "Strandmark-Kahl": 29_000 + 120_000,
    "P-ARD": 40_000 + 160_000,
}


def test_criterion_5_memory_formulas(report):
    bad = [m for m, want in FOOTPRINTS.items() if mem_footprint(m, 1000, 1000, 5000) != want]
    ok = not bad and FOOTPRINTS["MBK"] == 143_000
    report(5, ok, f"{len(FOOTPRINTS)} models checked, mismatches: {bad or 'none'}")


def test_criterion_6_determinism_and_neutrality(report):
    rng = random.Random(66)
    bad = []
    for k in range(100):
        p = random_problem(rng, n_min=2, n_max=12, m_max=40)
        # duplicate a few pairs so merging has something to do
        p.arcs += p.arcs[: rng.randint(0, 3)]
        scale = rng.randint(2, 9)
        part = random_partition(rng, p.n, rng.randint(1, min(4, p.n)))
        for name, spec in SOLVERS.items():
            base = spec.run(p.graph(), part, 1)
            if isinstance(base, NonConvergence):
                continue
            v = base.flow_value
            variants = {
                "pack": spec.run(p.graph(pack=True), part, 1),
                "merge": spec.run(p.graph(merge=True), part, 1),
                "threads": spec.run(p.graph(), part, rng.randint(2, 8)),
            }
            for label, res in variants.items():
                if not isinstance(res, NonConvergence) and res.flow_value != v:
                    bad.append((k, name, label))
            res = spec.run(p.scaled(scale).graph(), part, 1)
            if not isinstance(res, NonConvergence) and res.flow_value != scale * v:
                bad.append((k, name, "scale"))
    report(6, not bad, f"100 instances x {len(SOLVERS)} solvers, violations: {bad[:5] or 'none'}")


def test_criterion_7_harness_protocol(report, monkeypatch):
    grid = ProblemFile.parse((DATA / "grid6x6.max").read_text())
    problems = []

    ticks = iter([0, 50, 80, 100, 120, 200, 1000, 1010, 1100])
    with monkeypatch.context() as m:
        m.setattr(bench_mod.time, "perf_counter_ns", lambda: next(ticks))
        (rec,) = run_bench(grid, ["bk"], repeats=3)
    if (rec.build_ns, rec.solve_ns) != (10, 30):
        problems.append("min-over-repeats")

    (rec,) = run_bench(grid, ["bk"], repeats=1)
    if rec.build_ns <= 0 or rec.solve_ns <= 0:
        problems.append("build/solve split")

    def broken(g, p, k):
        res = SOLVERS["bk"].run(g, p, k)
        return CutResult(res.flow_value + 1, res.side)

    reg = dict(SOLVERS, broken=SolverSpec("broken", broken, False, "BK"))
    try:
        run_bench(grid, ["bk", "broken"], repeats=1, solvers=reg)
        problems.append("fault injection not detected")
    except ValueMismatch:
        pass

    for f in sorted(DATA.glob("*.max")):
        g = parse_dimacs(f.read_text()).build()
        v = bk_solve(g).flow_value
        again = parse_dimacs(write_dimacs(parse_dimacs(f.read_text()))).build()
        if bk_solve(again).flow_value != v:
            problems.append(f"round trip {f.name}")
    report(7, not problems, f"harness and DIMACS corpus checks, failures: {problems or 'none'}")


def test_criterion_8_selector(report):
    problems = []
    s = RpSample("d", "f", {"A": 10.0, "B": 5.0})
    if (rp_score(s, "A"), rp_score(s, "B")) != (0.5, 1.0):
        problems.append("rp two-algorithm example")
    if rp_score(RpSample("d", "f", {"x": 4.0, "y": 8.0, "z": 16.0}), "z") != 0.25:
        problems.append("rp 0.25 example")
    fam = [RpSample("a", "F1", {"A": 2.0, "B": 1.0})] + [RpSample(c, "F2", {"A": 1.0, "B": 3.0}) for c in "bcd"]
    if mean_rp(fam, lambda x: "A") != 0.75:
        problems.append("family balanced mean")

    rng = random.Random(88)
    samples, raws = [], []
    for i in range(30):
        p = random_problem(rng, n_min=2, n_max=10)
        fast = "bk" if p.n <= 5 else "hpf-hf"
        times = {"bk": 1.0 if fast == "bk" else 4.0, "hpf-hf": 1.0 if fast == "hpf-hf" else 2.0}
        samples.append(RpSample(f"g{i}", f"F{i % 5}", times, extract_features(p.graph())))
        raws.append(p)
    tree = train_tree([x.features for x in samples], [x.fastest for x in samples], [x.family for x in samples], samples=samples)
    train_rp = mean_rp(samples, lambda x: predict(tree, x.features))
    if train_rp != 1.0:
        problems.append(f"training RP {train_rp}")
    for p in raws:
        k = rng.randint(2, 50)
        if predict(tree, extract_features(p.graph())) != predict(tree, extract_features(p.scaled(k).graph())):
            problems.append("scaled prediction differs")
            break
    report(8, not problems, f"selector checks, failures: {problems or 'none'}")


def test_criterion_9_region_discharge_bound(report):
    rng = random.Random(99)
    worst = 0.0
    bad = 0
    for _ in range(200):
        p = random_problem(rng, n_min=2, n_max=40, m_max=120)
        part = random_partition(rng, p.n, rng.randint(1, min(8, p.n)))
        g = p.graph()
        n_b = len(set().union(*boundary_sets(g, part)))
        stats = ArdStats()
        ard_solve(g, part, rng.randint(1, 8), stats)
        bound = 2 * n_b**2 + 1
        bad += stats.sweeps > bound
        if n_b:
            worst = max(worst, stats.sweeps / bound)
    report(9, bad == 0, f"200 instances, {bad} over the bound, worst sweeps/bound with boundary nodes {worst:.3f}")
