from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

from loguru import logger

from ctxparse.app.args import parse_args
from ctxparse.app.utils import EXIT_NO_PARSE
from ctxparse.app.utils import EXIT_OK
from ctxparse.app.utils import EXIT_USAGE
from ctxparse.app.utils import configure_logging
from ctxparse.app.utils import format_result
from ctxparse.app.utils import format_table
from ctxparse.core.config import config
from ctxparse.core.corpus import Sentence
from ctxparse.core.corpus import load_treebank
from ctxparse.core.corpus import read_trees
from ctxparse.core.corpus import write_trees
from ctxparse.core.evaluation import EvalConfig
from ctxparse.core.evaluation import cross_validate
from ctxparse.core.evaluation import emit_report
from ctxparse.core.evaluation import summary_frame
from ctxparse.core.grammar import extract_rules
from ctxparse.core.grammar import load_grammar
from ctxparse.core.grammar import save_grammar
from ctxparse.core.grammar import train
from ctxparse.core.index import build_index
from ctxparse.core.parser import Parser
from ctxparse.core.parser import ParserConfig
from ctxparse.core.transforms import AmbiguationConfig
from ctxparse.core.transforms import Ambiguator
from ctxparse.core.transforms import ConceptWrapper
from ctxparse.core.transforms import TreeTransform
from ctxparse.core.transforms import TypeCompressor
from ctxparse.core.transforms import WrapperStripper


def _ambiguation_config(path: str | None) -> AmbiguationConfig:
    return AmbiguationConfig.from_file(path) if path else AmbiguationConfig.hol_default()


def cmd_train(args: argparse.Namespace) -> int:
    treebank = load_treebank(args.treebank, start=args.start)
    grammar = train(treebank, args.max_depth, jobs=args.jobs)
    save_grammar(grammar, args.out)
    counts = grammar.depth_counts()
    print(format_table(((depth, *counts[depth]) for depth in sorted(counts)), ["depth", "distinct", "total"]))
    return EXIT_OK


def cmd_parse(args: argparse.Namespace) -> int:
    grammar = load_grammar(args.grammar)
    max_depth = grammar.max_depth if args.max_depth is None else min(args.max_depth, grammar.max_depth)
    beam_width = args.beam_width if args.beam_width is not None else max(args.top_k, config.get("BEAM_WIDTH", 20))
    cfg = ParserConfig.from_config(
        top_k=args.top_k,
        beam_width=beam_width,
        max_depth=max(max_depth, 2),
        semantic_filter_enabled=args.semantic_filter,
    )
    grammar = grammar.restricted(cfg.max_depth)
    parser = Parser(grammar, build_index(grammar), cfg)

    if args.stdin:
        lines = [line.strip() for line in sys.stdin]
        sentences = [Sentence.from_text(line) for line in lines if line]
    else:
        sentences = [Sentence.from_text(args.sentence)]

    status = EXIT_OK
    for i, sentence in enumerate(sentences):
        results = parser.parse(sentence)
        if not results:
            logger.warning(f"No parse for sentence {i + 1}: {sentence}")
            status = EXIT_NO_PARSE
        if i > 0:
            print()
        for rank, result in enumerate(results, start=1):
            print(format_result(rank, result))
    return status


def cmd_eval(args: argparse.Namespace) -> int:
    treebank = load_treebank(args.treebank)
    cfg = EvalConfig(
        folds=args.folds,
        top_k=args.top_k,
        depths=tuple(args.depths),
        seed=args.seed,
        beam_width=args.beam_width,
        max_sentence_len=args.max_sentence_len,
        jobs=args.jobs,
    )
    report = cross_validate(treebank, cfg)
    emit_report(report, args.out)
    frame = summary_frame(report)
    print(format_table(frame.itertuples(index=False), list(frame.columns)))
    if report.has_unparsed:
        logger.warning("Some held-out sentences had no parse")
        return EXIT_NO_PARSE
    return EXIT_OK


def cmd_ambiguate(args: argparse.Namespace) -> int:
    ambiguator = Ambiguator(_ambiguation_config(args.config))
    wrapped = ambiguator.apply_all(read_trees(args.treebank))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        for tree in wrapped:
            f.write(" ".join(tree.leaves()) + "\n")
    if args.trees_out:
        write_trees(wrapped, args.trees_out)
    logger.info(f"Ambiguated {len(wrapped)} trees into {out}")
    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    cfg = _ambiguation_config(args.config)
    transforms: dict[str, TreeTransform] = {
        "compress": TypeCompressor(cfg),
        "wrap": ConceptWrapper(cfg),
        "strip": WrapperStripper(),
    }
    trees = transforms[args.mode].apply_all(read_trees(args.treebank))
    write_trees(trees, args.out)
    logger.info(f"Applied {args.mode} to {len(trees)} trees")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    treebank = load_treebank(args.treebank)
    rows = []
    for depth in args.depths:
        counts: Counter = Counter()
        for tree in treebank:
            counts.update(extract_rules(tree, depth))
        rows.append((depth, len(counts), sum(counts.values())))
    print(format_table(rows, ["depth", "distinct", "total"]))

    heights = Counter(tree.height() for tree in treebank)
    print()
    print(format_table(sorted(heights.items()), ["height", "trees"]))
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "parse": cmd_parse,
    "eval": cmd_eval,
    "ambiguate": cmd_ambiguate,
    "transform": cmd_transform,
    "stats": cmd_stats,
}


def run(argv: list[str] | None = None) -> int:
    """
    Run one CLI command.

    Returns:
        int: 0 on success, 1 if a sentence had no parse, 2 on usage, format
        or missing-file errors
    """
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError) as e:
        print(f"ctxparse {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
