"""Command-line interface.

Subcommands: split, train, evaluate, predict, benchmark, gradcheck.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import corpus as corpus_mod
from . import evaluation, neural, pipeline
from .config import RunConfig
from .corpus import SplitSpec
from .errors import ConfigError, DataError, NumericError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

GRADCHECK_BAR = 1e-4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits 2 by default; the contract reserves 2 for data errors
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _build_parser():
    parser = _Parser(prog="depscreen",
                     description="Depression-screening text classification "
                                 "for Romanized Sinhala social media posts")
    sub = parser.add_subparsers(dest="command", required=True)

    p_split = sub.add_parser("split", help="partition a CSV into train/test")
    p_split.add_argument("--input", required=True, help="corpus CSV")
    p_split.add_argument("--out", required=True,
                         help="output directory for train.csv/test.csv")
    p_split.add_argument("--ratio", type=float, default=0.8)
    p_split.add_argument("--seed", type=int, default=0)
    p_split.add_argument("--no-stratify", action="store_true")

    p_train = sub.add_parser("train", help="fit one model end to end")
    p_train.add_argument("--input", required=True, help="training CSV")
    p_train.add_argument("--model", required=True,
                         choices=pipeline.MODEL_KINDS)
    p_train.add_argument("--out", required=True, help="artifact JSON path")
    p_train.add_argument("--config", help="run-config JSON file")
    p_train.add_argument("--seed", type=int, help="override config seed")

    p_eval = sub.add_parser("evaluate", help="score an artifact on a CSV")
    p_eval.add_argument("artifact", help="artifact JSON path")
    p_eval.add_argument("--input", required=True, help="test CSV")
    p_eval.add_argument("--format", choices=("table", "json"),
                        default="table")
    p_eval.add_argument("--out", help="also write the report here")

    p_pred = sub.add_parser("predict", help="classify raw text")
    p_pred.add_argument("artifact", help="artifact JSON path")
    src = p_pred.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="one text to classify")
    src.add_argument("--stdin", action="store_true",
                     help="read one text per line from standard input")
    p_pred.add_argument("--format", choices=("table", "json"),
                        default="table")

    p_bench = sub.add_parser("benchmark",
                             help="train and compare all models on one split")
    p_bench.add_argument("--input", required=True, help="corpus CSV")
    p_bench.add_argument("--config", help="run-config JSON file")
    p_bench.add_argument("--models",
                         help="comma-separated subset of "
                              + ",".join(pipeline.MODEL_KINDS))
    p_bench.add_argument("--ratio", type=float, help="override train ratio")
    p_bench.add_argument("--seed", type=int, help="override config seed")
    p_bench.add_argument("--format", choices=("table", "json"),
                         default="table")
    p_bench.add_argument("--out", help="also write the JSON reports here")

    p_grad = sub.add_parser("gradcheck",
                            help="finite-difference check of the net's "
                                 "backward pass")
    p_grad.add_argument("artifact", nargs="?",
                        help="optional artifact; sizes the net like its "
                             "feature chain")
    p_grad.add_argument("--input-dim", type=int, default=100)
    p_grad.add_argument("--seed", type=int, default=0)
    p_grad.add_argument("--delta", type=float, default=1e-5)
    return parser


def _load_config(args):
    config = (RunConfig.from_json_file(args.config) if args.config
              else RunConfig())
    if getattr(args, "seed", None) is not None:
        config = RunConfig.from_dict({**config.to_dict(), "seed": args.seed})
    if getattr(args, "ratio", None) is not None:
        config = RunConfig.from_dict({**config.to_dict(),
                                      "train_ratio": args.ratio})
    return config


def _cmd_split(args):
    corpus = corpus_mod.load_csv(args.input)
    spec = SplitSpec(train_ratio=args.ratio, seed=args.seed,
                     stratified=not args.no_stratify)
    parts = corpus_mod.split(corpus, spec)
    os.makedirs(args.out, exist_ok=True)
    train_path = os.path.join(args.out, "train.csv")
    test_path = os.path.join(args.out, "test.csv")
    corpus_mod.save_csv(parts.train, train_path)
    corpus_mod.save_csv(parts.test, test_path)
    print(f"train: {len(parts.train)} docs -> {train_path}")
    print(f"test:  {len(parts.test)} docs -> {test_path}")
    return EXIT_OK


def _cmd_train(args):
    config = _load_config(args)
    corpus = corpus_mod.load_csv(args.input)
    artifact = pipeline.fit_pipeline(corpus, config, args.model)
    pipeline.save(artifact, args.out)
    chain = artifact.chain
    print(f"trained {args.model} on {len(corpus)} docs "
          f"(vocabulary {len(chain.vocab)}, "
          f"selected {len(chain.selector.selected)}) -> {args.out}")
    return EXIT_OK


def _cmd_evaluate(args):
    artifact = pipeline.load(args.artifact)
    corpus = corpus_mod.load_csv(args.input)
    report = evaluation.evaluate(artifact, corpus)
    rendered = (evaluation.reports_to_json([report])
                if args.format == "json"
                else evaluation.format_report_table([report]))
    print(rendered)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(evaluation.reports_to_json([report]))
    return EXIT_OK


def _cmd_predict(args):
    artifact = pipeline.load(args.artifact)
    if args.text is not None:
        texts = [args.text]
    else:
        texts = [line.rstrip("\n") for line in sys.stdin if line.strip()]
    for text in texts:
        result = pipeline.predict_one(artifact, text)
        if args.format == "json":
            print(json.dumps(result, ensure_ascii=False))
        else:
            flag = " [oov]" if result["oov"] else ""
            print(f"{result['label']} ({result['label_name']}) "
                  f"score={result['score']:.6f}{flag}")
    return EXIT_OK


def _cmd_benchmark(args):
    config = _load_config(args)
    corpus = corpus_mod.load_csv(args.input)
    kinds = pipeline.MODEL_KINDS
    if args.models:
        kinds = tuple(k.strip() for k in args.models.split(",") if k.strip())
        for kind in kinds:
            if kind not in pipeline.MODEL_KINDS:
                raise ConfigError(f"unknown model kind {kind!r}")
    spec = SplitSpec(train_ratio=config.train_ratio, seed=config.seed,
                     stratified=config.stratified)
    result = evaluation.benchmark(corpus, spec, config, kinds)
    payload = evaluation.reports_to_json(result.reports)
    if args.format == "json":
        print(payload)
    else:
        print(f"split: {result.split_sizes[0]} train / "
              f"{result.split_sizes[1]} test")
        print(evaluation.format_report_table(result.reports,
                                             result.failures))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    if result.failures and args.format == "table":
        for kind, message in result.failures.items():
            print(f"failed: {kind}: {message}", file=sys.stderr)
    return EXIT_OK


def _cmd_gradcheck(args):
    k = args.input_dim
    hidden = neural.DEFAULT_HIDDEN
    if args.artifact:
        artifact = pipeline.load(args.artifact)
        k = len(artifact.chain.selector.selected)
        if artifact.model_kind == "nn":
            hidden = artifact.model.params.hidden
    rng = np.random.default_rng(args.seed)
    params = neural.init_params(k, args.seed, hidden=hidden)
    X = rng.standard_normal((32, k))
    y = rng.integers(0, 2, size=32)
    error = neural.gradient_check(params, X, y, delta=args.delta,
                                  seed=args.seed)
    passed = error < GRADCHECK_BAR
    print(f"max relative error {error:.3e} "
          f"({'PASS' if passed else 'FAIL'}, bar {GRADCHECK_BAR:.0e}) "
          f"for a {hidden}x{k} net")
    if not passed:
        raise NumericError(f"gradient check failed: {error:.3e} >= "
                           f"{GRADCHECK_BAR:.0e}")
    return EXIT_OK


_COMMANDS = {
    "split": _cmd_split,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "predict": _cmd_predict,
    "benchmark": _cmd_benchmark,
    "gradcheck": _cmd_gradcheck,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
