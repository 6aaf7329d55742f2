"""Command-line entry point: ``dyckcount <command> ...`` (or ``python -m dyckcount``).

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import io as dio
from .encoding import reduce_dyck_n_to_2
from .harness import (LAST_CLOSING, NEXT_SYMBOL, TrainConfig, encode_corpus, evaluate_samples,
                      run_experiment, train)
from .languages import SPLITS, TASKS, CorpusExhausted, GrammarParams, build_task_splits, task_language
from .nets import ARCHITECTURES, NumericalError, gradient_check
from .oracles import corpus_stats, membership
from .svg import bar_chart
from .traces import trace_csv, trace_svg

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4


class DataError(Exception):
    pass


def _sizes_windows(args):
    sizes = {k: v for k, v in (("train", args.train), ("short_test", args.short), ("long_test", args.long))
             if v is not None}
    windows = {}
    if args.train_window:
        windows["train"] = windows["short_test"] = tuple(args.train_window)
    if args.long_window:
        windows["long_test"] = tuple(args.long_window)
    return sizes, windows


def cmd_generate(args):
    sizes, windows = _sizes_windows(args)
    splits = build_task_splits(args.task, args.seed, sizes=sizes, windows=windows,
                               params=GrammarParams(args.p, args.q))
    encoding = dio.ASCII if args.ascii else dio.UNICODE
    for corpus in splits.values():
        data, _ = dio.write_corpus(corpus, args.out, encoding)
        print(f"{corpus.split}: {len(corpus)} strings -> {data}")


def _load_corpus_for(args, task: str | None):
    splits = dio.read_splits(args.corpus)
    specs = {c.spec for c in splits.values()}
    if len(specs) != 1:
        raise DataError(f"corpus directory {args.corpus} mixes languages")
    spec = specs.pop()
    if task is not None and task_language(task) != spec:
        raise DataError(f"corpus holds {spec.name} but task {task} needs {task_language(task).name}")
    return splits, spec


def _config(args) -> TrainConfig:
    return TrainConfig(task=args.task, architecture=args.arch, hidden=args.hidden, epochs_max=args.epochs,
                       seed=args.seed, early_stop=not args.no_early_stop, trial_count=args.trials,
                       lr=args.lr, readout_bias=args.readout_bias,
                       objective=LAST_CLOSING if args.last_closing else NEXT_SYMBOL)


def cmd_train(args):
    config = _config(args)
    splits, _ = _load_corpus_for(args, args.task)
    print("epoch,loss,train_acc")
    params, report = train(config, splits,
                           progress=lambda e, loss, acc: print(f"{e},{loss:.6f},{acc:.2f}", flush=True))
    if report.failed:
        raise NumericalError(report.error)
    dio.save_checkpoint(params, args.checkpoint, task=args.task, seed=args.seed, epoch=report.best_epoch,
                        objective=config.objective)
    if args.report:
        dio.write_json({"config": asdict(config), "report": report.to_dict()}, args.report)
    print(json.dumps(report.accuracy))


def cmd_experiment(args):
    config = _config(args)
    sizes, windows = _sizes_windows(args)
    summary = run_experiment(config, sizes=sizes, windows=windows, workers=args.workers)
    dio.write_json(summary.to_dict(), args.report)
    if args.table:
        dio.write_table(dio.table_rows(args.task, args.arch.upper(), summary.stats), args.table)
    for split, s in summary.stats.items():
        print(f"{split}: min {s['min']:.2f} max {s['max']:.2f} median {s['median']:.2f}")
    if summary.failed_trials:
        print(f"warning: {len(summary.failed_trials)} failed trial(s) excluded", file=sys.stderr)


def cmd_eval(args):
    params, meta = dio.load_checkpoint(args.checkpoint)
    splits, spec = _load_corpus_for(args, meta.get("task"))
    if params.D != len(spec.alphabet):
        raise DataError(f"checkpoint has D={params.D} but {spec.name} has {len(spec.alphabet)} symbols")
    objective = meta.get("objective", NEXT_SYMBOL)
    accuracy = {name: round(evaluate_samples(params, encode_corpus(c, objective), objective), 2)
                for name, c in splits.items()}
    if args.report:
        dio.write_json({"checkpoint": str(args.checkpoint), "accuracy": accuracy}, args.report)
    print(json.dumps(accuracy))


def cmd_trace(args):
    params, meta = dio.load_checkpoint(args.checkpoint)
    if args.string is not None:
        spec = task_language(args.task or meta["task"])
        s = dio.from_ascii(args.string) if args.ascii else args.string
    else:
        corpus = dio.read_corpus(args.corpus, args.split)
        spec, s = corpus.spec, corpus.strings[args.index]
    if params.D != len(spec.alphabet):
        raise DataError(f"checkpoint has D={params.D} but {spec.name} has {len(spec.alphabet)} symbols")
    if not membership(spec, s):
        raise DataError(f"{s!r} is not a member of {spec.name}")
    text = trace_csv(params, spec, s)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.svg:
        Path(args.svg).write_text(trace_svg(params, spec, s), encoding="utf-8")


def cmd_reduce(args):
    src = open(args.input, encoding="utf-8") if args.input else sys.stdin
    with src:
        for lineno, line in enumerate(src, start=1):
            try:
                print(reduce_dyck_n_to_2(line.rstrip("\n"), args.n))
            except ValueError as e:
                raise DataError(f"line {lineno}: {e}") from None


def cmd_stats(args):
    splits = dio.read_splits(args.corpus)
    out = Path(args.out or args.corpus)
    out.mkdir(parents=True, exist_ok=True)
    for name, corpus in splits.items():
        stats = corpus_stats(corpus)
        for kind, hist in stats.items():
            dio.write_histogram(hist, out / f"{name}_{kind}.csv")
            if args.svg:
                (out / f"{name}_{kind}.svg").write_text(
                    bar_chart(hist, title=f"{corpus.spec.name} {name}", x_label=kind.replace("_", " ")),
                    encoding="utf-8")
        print(f"{name}: {len(corpus)} strings, lengths {min(stats['length'])}-{max(stats['length'])}, "
              f"max depth up to {max(stats['max_depth'])}")


def cmd_gradcheck(args):
    worst_ok = True
    for arch in args.arch:
        r = gradient_check(arch, args.D, args.hidden, trials=args.trials, seed=args.seed)
        print(f"{arch},D={args.D},H={args.hidden},max_rel_error={r.max_rel_error:.3e},{'pass' if r.passed else 'FAIL'}")
        worst_ok &= r.passed
    if not worst_ok:
        raise NumericalError("gradient check failed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dyckcount", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def size_flags(p):
        p.add_argument("--train", type=int, help="training-set size")
        p.add_argument("--short", type=int, help="short test-set size")
        p.add_argument("--long", type=int, help="long test-set size")
        p.add_argument("--train-window", type=int, nargs=2, metavar=("MIN", "MAX"))
        p.add_argument("--long-window", type=int, nargs=2, metavar=("MIN", "MAX"))

    def train_flags(p):
        p.add_argument("--task", choices=sorted(TASKS), required=True)
        p.add_argument("--arch", choices=ARCHITECTURES, default="lstm")
        p.add_argument("--hidden", type=int)
        p.add_argument("--epochs", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--lr", type=float, default=1e-3)
        p.add_argument("--trials", type=int, default=10)
        p.add_argument("--no-early-stop", action="store_true")
        p.add_argument("--readout-bias", action="store_true")
        p.add_argument("--last-closing", action="store_true", help="last-closing-parenthesis objective")

    p = sub.add_parser("generate", help="sample train/short/long corpora")
    p.add_argument("--task", choices=sorted(TASKS), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--q", type=float, default=0.25)
    p.add_argument("--ascii", action="store_true", help="ASCII aliases for the Shuffle-6 symbols")
    p.add_argument("--out", required=True)
    size_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train one network on a corpus directory")
    train_flags(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("experiment", help="repeated trials with min/max/median summary")
    train_flags(p)
    size_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", required=True)
    p.add_argument("--table", help="results table CSV")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("eval", help="accuracy of a checkpoint on every split of a corpus")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("trace", help="per-timestep CSV (and SVG) of a network on one word")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--task", choices=sorted(TASKS))
    p.add_argument("--string")
    p.add_argument("--ascii", action="store_true")
    p.add_argument("--corpus")
    p.add_argument("--split", choices=SPLITS, default="short_test")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("reduce", help="map Dyck-n lines to Dyck-2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("input", nargs="?")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("stats", help="length and max-depth histograms of a corpus directory")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gradcheck", help="BPTT vs central finite differences")
    p.add_argument("--arch", choices=ARCHITECTURES, nargs="+", default=list(ARCHITECTURES))
    p.add_argument("--D", type=int, default=2)
    p.add_argument("--hidden", type=int, default=3)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "trace" and args.string is None and args.corpus is None:
        parser.error("trace needs --string or --corpus")
    try:
        args.func(args)
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, CorpusExhausted, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
