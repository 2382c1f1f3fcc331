from __future__ import annotations

import argparse

from ctxparse.core.config import config
from ctxparse.core.utils import parse_depths

LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


def depth_arg(value: str) -> int:
    try:
        depth = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid depth {value!r}")
    if depth < 2:
        raise argparse.ArgumentTypeError(f"depth must be at least 2, got {depth}")
    return depth


def positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {number}")
    return number


def depths_arg(value: str) -> list[int]:
    try:
        return parse_depths(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level",
        type=str.upper,
        choices=LOG_LEVELS,
        default=config.get("LOG_LEVEL", "WARNING"),
        help="Log level of the stderr sink.",
    )

    parser = argparse.ArgumentParser(
        prog="ctxparse",
        description="ctxparse: context-aware probabilistic parsing of informalized formal statements",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    train = subparsers.add_parser("train", parents=[common], help="Train a deep-subtree grammar on a treebank.")
    train.add_argument("--treebank", required=True, help="Treebank file, one tree per line.")
    train.add_argument(
        "--max-depth",
        type=depth_arg,
        default=config.get("MAX_DEPTH", 3),
        help="Deepest rule class to extract (at least 2).",
    )
    train.add_argument("--out", required=True, help="Grammar file to write.")
    train.add_argument("--start", default=None, help="Start nonterminal. Defaults to the root of the first tree.")
    train.add_argument("--jobs", type=positive_int, default=1, help="Worker threads used for rule counting.")

    parse = subparsers.add_parser("parse", parents=[common], help="Parse sentences with a trained grammar.")
    parse.add_argument("--grammar", required=True, help="Grammar file written by `train`.")
    source = parse.add_mutually_exclusive_group(required=True)
    source.add_argument("--sentence", help="Whitespace separated tokens to parse.")
    source.add_argument("--stdin", action="store_true", help="Parse one sentence per line from stdin.")
    parse.add_argument("--top-k", type=positive_int, default=config.get("TOP_K", 20), help="Number of parses to print.")
    parse.add_argument(
        "--beam-width",
        type=positive_int,
        default=None,
        help="Candidates kept per chart cell and label. Defaults to max(top-k, BEAM_WIDTH).",
    )
    parse.add_argument(
        "--max-depth",
        type=depth_arg,
        default=None,
        help="Cap on the rule depths used. Defaults to the grammar's depth.",
    )
    parse.add_argument(
        "--no-semantic-filter",
        action="store_false",
        dest="semantic_filter",
        help="Disable the variable-type consistency filter.",
    )

    evaluate = subparsers.add_parser("eval", parents=[common], help="Cross-validate grammar depths on a treebank.")
    evaluate.add_argument("--treebank", required=True, help="Treebank file, one tree per line.")
    evaluate.add_argument("--folds", type=positive_int, default=config.get("EVAL_FOLDS", 100), help="Number of folds.")
    evaluate.add_argument("--depths", type=depths_arg, default=[2, 3, 4, 5, 6, 7], help="Depths such as 2-7 or 2,3.")
    evaluate.add_argument("--seed", type=int, default=config.get("EVAL_SEED", 42), help="Permutation seed.")
    evaluate.add_argument("--top-k", type=positive_int, default=config.get("TOP_K", 20), help="Parses kept per sentence.")
    evaluate.add_argument("--beam-width", type=positive_int, default=None, help="Candidates kept per chart cell and label.")
    evaluate.add_argument(
        "--max-sentence-len",
        type=positive_int,
        default=None,
        help="Drop sentences with more tokens before splitting.",
    )
    evaluate.add_argument(
        "--jobs",
        type=positive_int,
        default=config.get("EVAL_JOBS", 1),
        help="Folds evaluated in parallel.",
    )
    evaluate.add_argument("--out", required=True, help="Directory for summary.csv, details.csv and timings.csv.")

    ambiguate = subparsers.add_parser(
        "ambiguate",
        parents=[common],
        help="Informalize raw HOL trees into ambiguous sentences.",
    )
    ambiguate.add_argument("--treebank", required=True, help="File of raw HOL trees, one per line.")
    ambiguate.add_argument("--config", default=None, help="Ambiguation config. Defaults to the HOL infix table only.")
    ambiguate.add_argument("--out", required=True, help="File to write the sentences to, one per line.")
    ambiguate.add_argument("--trees-out", default=None, help="Also write the wrapped training trees to this file.")

    transform = subparsers.add_parser("transform", parents=[common], help="Apply one tree transformation to a file.")
    transform.add_argument("--mode", required=True, choices=("compress", "wrap", "strip"), help="Transformation.")
    transform.add_argument("--treebank", required=True, help="Input trees, one per line.")
    transform.add_argument("--config", default=None, help="Ambiguation config. Defaults to the HOL infix table only.")
    transform.add_argument("--out", required=True, help="Output file.")

    stats = subparsers.add_parser("stats", parents=[common], help="Print rule pattern statistics of a treebank.")
    stats.add_argument("--treebank", required=True, help="Treebank file, one tree per line.")
    stats.add_argument("--depths", type=depths_arg, default=[2, 3], help="Depths such as 2-7 or 2,3.")

    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
