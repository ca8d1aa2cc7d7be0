"""Command-line tools: sol_train, sol_test, sol_convert.

Timing goes to stderr so stdout stays machine-parseable. Exit codes:
0 success, 1 file/parse errors, 2 configuration errors.
"""

import argparse
import sys
import time

from .algorithms import ALGORITHMS, get_algorithm
from .errors import ConfigError, SolError
from .evaluation import (
    cross_validate,
    evaluate,
    format_accuracy,
    format_cv_params,
    parse_grid,
    train_online,
)
from .model import create_model, load_model, save_model
from .pario import DataSource, pipeline_load, write_binary_chunks


def _algo_help():
    lines = ["algorithms:"]
    for name, algo in ALGORITHMS.items():
        params = ", ".join(f"{k}={v:g}" for k, v in sorted(algo.defaults.items()))
        lines.append(f"  {name:<14} params: {params or '-'}")
    return "\n".join(lines)


def _parse_params(items):
    params = {}
    for item in items or ():
        for piece in item.split(","):
            piece = piece.strip()
            if not piece:
                continue
            key, sep, value = piece.partition("=")
            if not sep:
                raise ConfigError(f"bad --params entry {piece!r}, expected name=value")
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise ConfigError(f"bad --params value in {piece!r}")
    return params


def _source(path, fmt, classes):
    fmt = {"bin": "binary"}.get(fmt, fmt)
    return DataSource(path, fmt, classes)


def _train_parser():
    p = argparse.ArgumentParser(
        prog="sol_train",
        description="Train an online linear classifier.",
        epilog=_algo_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("train_file")
    p.add_argument("model_file")
    p.add_argument("-a", "--algo", default="ogd")
    p.add_argument("--params", action="append", metavar="k=v[,k=v...]")
    p.add_argument("--loss", default=None,
                   help="hinge | logistic | square | bool (default: per algorithm)")
    p.add_argument("-f", "--format", choices=["libsvm", "csv", "bin"])
    p.add_argument("-c", "--classes", type=int, default=2)
    p.add_argument("--passes", type=int, default=1)
    p.add_argument("--bias", action="store_true",
                   help="add an implicit bias feature (id 0, value 1)")
    p.add_argument("--cv", action="append", metavar="name=start:factor:end",
                   help="cross-validate a geometric grid (repeatable)")
    p.add_argument("--fold", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache", metavar="PATH.bin",
                   help="binary cache: reuse if present, else write then train from it")
    p.add_argument("--chunk-size", type=int, default=1024)
    p.add_argument("--buffer-chunks", type=int, default=16)
    p.add_argument("--parse-workers", type=int, default=None)
    return p


def _cmd_train(argv):
    args = _train_parser().parse_args(argv)
    get_algorithm(args.algo)  # rejects unknown names early
    params = _parse_params(args.params)
    loss = args.loss

    source = _source(args.train_file, args.format, args.classes)
    if args.cache:
        import os

        if not os.path.exists(args.cache):
            chunks = pipeline_load(source, args.chunk_size, args.buffer_chunks,
                                   args.parse_workers)
            n = write_binary_chunks(chunks, args.cache)
            print(f"cached {n} examples to {args.cache}", file=sys.stderr)
        source = DataSource(args.cache, "binary", args.classes)

    if args.cv:
        grids = []
        for item in args.cv:
            name, sep, spec = item.partition("=")
            if not sep:
                raise ConfigError(f"bad --cv entry {item!r}, expected name=start:factor:end")
            grids.append(parse_grid(spec, name.strip()))
        best, _ = cross_validate(
            args.algo, grids, source, folds=args.fold, seed=args.seed,
            class_count=args.classes, loss=loss, bias=args.bias,
            base_params=params, passes=args.passes, chunk_size=args.chunk_size,
        )
        print(format_cv_params(best))
        params.update(best)

    model = create_model(args.algo, args.classes, params, loss, args.bias)
    report = train_online(
        model, source, passes=args.passes, chunk_size=args.chunk_size,
        buffer_chunks=args.buffer_chunks, parse_workers=args.parse_workers,
    )
    save_model(model, args.model_file)
    for line in report.summary_lines():
        print(line)
    print(f"elapsed: {report.elapsed_seconds:.3f}s", file=sys.stderr)
    return 0


def _cmd_test(argv):
    p = argparse.ArgumentParser(prog="sol_test",
                                description="Evaluate a saved model.")
    p.add_argument("model_file")
    p.add_argument("test_file")
    p.add_argument("predict_file", nargs="?")
    p.add_argument("-f", "--format", choices=["libsvm", "csv", "bin"])
    p.add_argument("--chunk-size", type=int, default=1024)
    args = p.parse_args(argv)

    model = load_model(args.model_file)
    source = _source(args.test_file, args.format, model.class_count)
    start = time.perf_counter()
    accuracy, predictions = evaluate(model, source, chunk_size=args.chunk_size)
    if args.predict_file:
        with open(args.predict_file, "w", encoding="ascii") as fh:
            for label in predictions:
                if model.class_count == 2:
                    fh.write("+1\n" if label == 1 else "-1\n")
                else:
                    fh.write(f"{label}\n")
    print(format_accuracy(accuracy))
    print(f"elapsed: {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return 0


def _cmd_convert(argv):
    p = argparse.ArgumentParser(prog="sol_convert",
                                description="Convert a data file to the binary cache format.")
    p.add_argument("input_file")
    p.add_argument("output_file")
    p.add_argument("-f", "--format", choices=["libsvm", "csv", "bin"])
    p.add_argument("-c", "--classes", type=int, default=2)
    p.add_argument("--chunk-size", type=int, default=1024)
    args = p.parse_args(argv)

    source = _source(args.input_file, args.format, args.classes)
    chunks = pipeline_load(source, args.chunk_size)
    n = write_binary_chunks(chunks, args.output_file)
    if n == 0:
        print("error: empty source", file=sys.stderr)
        return 1
    print(f"examples: {n}")
    return 0


def _run(cmd, argv):
    try:
        return cmd(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_train(argv=None):
    return _run(_cmd_train, sys.argv[1:] if argv is None else argv)


def main_test(argv=None):
    return _run(_cmd_test, sys.argv[1:] if argv is None else argv)


def main_convert(argv=None):
    return _run(_cmd_convert, sys.argv[1:] if argv is None else argv)


def main(argv=None):
    """Dispatcher for `python -m sol.cli {train,test,convert} ...`."""
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] not in ("train", "test", "convert"):
        print("usage: python -m sol.cli {train,test,convert} ...", file=sys.stderr)
        return 2
    return {"train": main_train, "test": main_test,
            "convert": main_convert}[argv[0]](argv[1:])


if __name__ == "__main__":
    sys.exit(main())
