"""sol-bench: generate benchmark data, sweep lambdas, compare algorithms."""

import argparse
import sys

from .compare import compare_algorithms
from .plots import plot_compare, plot_sweep
from .sweep import sweep_sparsity
from .synth import write_separable, write_sparse_informative

DEFAULT_SPARSE_ALGOS = ["fobos-l1", "rda-l1", "erda-l1", "stg",
                        "ada-fobos-l1", "ada-rda-l1"]
DEFAULT_COMPARE_ALGOS = ["perceptron", "ogd", "pa1", "pa2", "alma", "rda",
                         "sop", "cw", "eccw", "arow", "ada-fobos", "ada-rda"]


def _parse_refs(items):
    refs = {}
    for item in items or ():
        name, _, value = item.partition("=")
        refs[name] = float(value)
    return refs


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="sol-bench",
        description="Benchmark harness driving the sol_train/sol_test CLI.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="write synthetic benchmark files")
    g.add_argument("--kind", choices=["separable", "sparse"],
                   default="separable")
    g.add_argument("--train", default="bench_train.libsvm")
    g.add_argument("--test", default="bench_test.libsvm")
    g.add_argument("-n", type=int, default=10_000)
    g.add_argument("--test-n", type=int, default=2_000)
    g.add_argument("-d", type=int, default=None)
    g.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("sweep", help="lambda sweep: sparsity vs accuracy")
    s.add_argument("train_file")
    s.add_argument("test_file")
    s.add_argument("--algos", nargs="+", default=DEFAULT_SPARSE_ALGOS)
    s.add_argument("--lambdas", nargs="+", type=float,
                   default=[0.0, 0.001, 0.01, 0.1, 1.0])
    s.add_argument("--out", default="sweep.csv")
    s.add_argument("--plot", default="sweep.png")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--reference", action="append", metavar="label=accuracy",
                   help="draw a labeled horizontal reference line")

    c = sub.add_parser("compare", help="train time/accuracy over repeats")
    c.add_argument("train_file")
    c.add_argument("test_file")
    c.add_argument("--algos", nargs="+", default=DEFAULT_COMPARE_ALGOS)
    c.add_argument("--repeats", type=int, default=3)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="compare.csv")
    c.add_argument("--plot", default="compare.png")

    p = sub.add_parser("plot", help="re-render plots from existing csv")
    p.add_argument("csv_file")
    p.add_argument("--kind", choices=["sweep", "compare"], default="sweep")
    p.add_argument("--out", default=None)
    p.add_argument("--reference", action="append", metavar="label=accuracy")

    args = parser.parse_args(argv)

    if args.command == "gen-data":
        if args.kind == "separable":
            d = args.d or 100
            write_separable(args.train, args.n, d=d, seed=args.seed,
                            concept_seed=args.seed + 1000)
            write_separable(args.test, args.test_n, d=d, seed=args.seed + 1,
                            concept_seed=args.seed + 1000)
        else:
            d = args.d or 1000
            write_sparse_informative(args.train, args.n, d=d, seed=args.seed)
            write_sparse_informative(args.test, args.test_n, d=d,
                                     seed=args.seed + 1)
        print(f"wrote {args.train} and {args.test}")
        return 0

    if args.command == "sweep":
        out = sweep_sparsity(args.train_file, args.test_file, args.algos,
                             args.lambdas, args.out, jobs=args.jobs)
        print(f"wrote {out}")
        png = plot_sweep(out, args.plot, _parse_refs(args.reference))
        print(f"wrote {png}")
        return 0

    if args.command == "compare":
        out = compare_algorithms(args.train_file, args.test_file, args.algos,
                                 repeats=args.repeats, seed0=args.seed,
                                 out_csv=args.out)
        print(f"wrote {out}")
        png = plot_compare(out, args.plot)
        print(f"wrote {png}")
        return 0

    if args.command == "plot":
        if args.kind == "sweep":
            out = args.out or "sweep.png"
            plot_sweep(args.csv_file, out, _parse_refs(args.reference))
        else:
            out = args.out or "compare.png"
            plot_compare(args.csv_file, out)
        print(f"wrote {out}")
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
