"""Command-line entry point: solve, bench, features, select, split, convert."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import records_csv, records_jsonl, run_bench
from .dimacs import ProblemFile, read_blocks, write_blocks, write_dimacs
from .graph import Side
from .parallel import NonConvergence, contiguous_partition, split_grid
from .selector import extract_features, features_csv, load_tree, predict
from .solvers import SOLVERS, get_solver


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH or WxHxD, got {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"bad grid dimensions {text!r}")
    return dims


def _load(path: str) -> ProblemFile:
    return ProblemFile.parse(Path(path).read_text())


def _partition(args, n: int):
    if args.blocks:
        return read_blocks(Path(args.blocks).read_text(), n)
    return contiguous_partition(n, 2 * args.threads)


def cmd_solve(args) -> int:
    prob = _load(args.input)
    spec = get_solver(args.alg)
    g = prob.builder().build(pack=args.pack)
    part = _partition(args, g.n) if spec.parallel else None
    res = spec.run(g, part, args.threads)
    if isinstance(res, NonConvergence):
        raise RuntimeError(
            f"dual decomposition did not converge after {res.iterations} iterations "
            f"({res.disagreeing} disagreeing nodes)"
        )
    print(res.flow_value)
    if args.cut:
        ids = prob.inner_ids
        print(" ".join(str(ids[i]) for i, s in enumerate(res.side) if s == Side.SOURCE))
    return 0


def cmd_bench(args) -> int:
    algs = args.alg or ["bk"]
    first = True
    for path in args.input:
        prob = _load(path)
        part = None
        if args.blocks:
            part = read_blocks(Path(args.blocks).read_text(), len(prob.inner_ids))
        recs = run_bench(prob, algs, args.threads, args.repeats, Path(path).name, part, args.pack)
        if args.format == "csv":
            sys.stdout.write(records_csv(recs, header=first))
        else:
            sys.stdout.write(records_jsonl(recs))
        first = False
    return 0


def cmd_features(args) -> int:
    rows = []
    for path in args.input:
        g = _load(path).builder().build()
        rows.append((Path(path).name, extract_features(g, args.grid)))
    sys.stdout.write(features_csv(rows))
    return 0


def cmd_select(args) -> int:
    tree = load_tree(Path(args.tree).read_text())
    if args.input:
        f = extract_features(_load(args.input).builder().build(), args.grid)
        print(predict(tree, f))
    else:
        if not tree.root.is_leaf:
            raise ValueError("--input is required unless the tree is a single leaf")
        print(tree.root.label)
    return 0


def cmd_split(args) -> int:
    sys.stdout.write(write_blocks(split_grid(args.grid, args.blocks)))
    return 0


def cmd_convert(args) -> int:
    text = write_dimacs(_load(args.input).builder())
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cutflow", description="Min-cut/max-flow solvers and benchmark tools.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="print the max-flow value of a DIMACS file")
    p.add_argument("--alg", required=True, choices=list(SOLVERS))
    p.add_argument("--input", required=True)
    p.add_argument("--blocks", help="block partition file (one block id per node line)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--pack", action="store_true", help="use the packed arc layout")
    p.add_argument("--cut", action="store_true", help="also print source-side node ids")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("bench", help="time solvers and emit records")
    p.add_argument("--input", required=True, nargs="+")
    p.add_argument("--alg", action="append", choices=list(SOLVERS))
    p.add_argument("--threads", type=int, nargs="+", default=[1])
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--blocks")
    p.add_argument("--pack", action="store_true")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("features", help="emit the 31-column feature CSV")
    p.add_argument("--input", required=True, nargs="+")
    p.add_argument("--grid", action="store_true", help="mark the graphs as grid graphs")
    p.set_defaults(fn=cmd_features)

    p = sub.add_parser("select", help="predict the best algorithm with a tree file")
    p.add_argument("--tree", required=True)
    p.add_argument("--input")
    p.add_argument("--grid", action="store_true")
    p.set_defaults(fn=cmd_select)

    p = sub.add_parser("split", help="emit a grid block partition file")
    p.add_argument("--grid", required=True, type=_dims, help="WxH or WxHxD, first axis fastest")
    p.add_argument("--blocks", required=True, type=int)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("convert", help="rewrite a DIMACS file in canonical merged form")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_convert)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as e:  # one-line diagnostic, nonzero exit
        msg = " ".join(str(e).split()) or type(e).__name__
        print(f"cutflow {args.command}: {type(e).__name__}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
