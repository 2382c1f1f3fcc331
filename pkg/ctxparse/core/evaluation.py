"""
Cross-validation of grammar depths on a treebank.

The corpus is permuted with a seeded xorshift64* generator, split into
near-equal chunks, and every chunk is parsed with grammars trained on the
remaining chunks. Results are reported per depth as counts of parsed
sentences, sentences whose gold tree is among the top-k parses, and the
average rank of the gold tree over the found cases.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path
from typing import List
from typing import Union

import numpy as np
import pandas as pd
from loguru import logger

from ctxparse.core.config import config
from ctxparse.core.corpus import Treebank
from ctxparse.core.corpus import tree_yield
from ctxparse.core.grammar import train
from ctxparse.core.index import build_index
from ctxparse.core.parser import Parser
from ctxparse.core.parser import ParserConfig
from ctxparse.core.parser import rank_of

_MASK64 = (1 << 64) - 1
_XORSHIFT_MULTIPLIER = 0x2545F4914F6CDD1D
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15

SUMMARY_COLUMNS = ["depth", "parsed", "correct_found", "correct_found_pct", "avg_rank"]
DETAIL_COLUMNS = ["depth", "sentence_id", "fold", "parsed", "rank"]
TIMING_COLUMNS = ["depth", "sentence_id", "seconds"]


class CorpusTooSmall(ValueError):
    pass


class LeakageError(AssertionError):
    pass


class XorShift64Star:
    """
    xorshift64* generator (shifts 12, 25, 27; multiplier 0x2545F4914F6CDD1D).

    The seed is scrambled with one splitmix64 step so that small seeds,
    zero included, give a non-zero, well-mixed state.
    """

    def __init__(self, seed: int):
        z = (seed + _SPLITMIX_GAMMA) & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
        self.state = z or _SPLITMIX_GAMMA

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * _XORSHIFT_MULTIPLIER) & _MASK64

    def below(self, bound: int) -> int:
        return self.next() % bound

    def permutation(self, n: int) -> List[int]:
        """Fisher-Yates shuffle of range(n)."""
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            order[i], order[j] = order[j], order[i]
        return order


@dataclass(frozen=True)
class EvalConfig:
    folds: int = 100
    top_k: int = 20
    depths: tuple[int, ...] = (2, 3, 4, 5, 6, 7)
    seed: int = 42
    beam_width: int | None = None
    max_sentence_len: int | None = None
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "depths", tuple(sorted(set(self.depths))))
        if self.folds < 2:
            raise ValueError(f"folds must be at least 2, got {self.folds}")
        if not self.depths or min(self.depths) < 2:
            raise ValueError(f"Every depth must be at least 2, got {self.depths}")
        if self.top_k < 1:
            raise ValueError("top_k must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")

    @classmethod
    def from_config(cls, **overrides) -> EvalConfig:
        settings = {
            "folds": config.get("EVAL_FOLDS", 100),
            "top_k": config.get("TOP_K", 20),
            "seed": config.get("EVAL_SEED", 42),
            "jobs": config.get("EVAL_JOBS", 1),
        }
        settings.update(overrides)
        return cls(**settings)

    def parser_config(self, depth: int) -> ParserConfig:
        beam = self.beam_width if self.beam_width is not None else max(self.top_k, config.get("BEAM_WIDTH", 20))
        return ParserConfig(top_k=self.top_k, beam_width=max(beam, self.top_k), max_depth=depth)


@dataclass(frozen=True)
class SentenceRecord:
    depth: int
    sentence_id: int
    fold: int
    parsed: bool
    rank: int | None
    seconds: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class DepthSummary:
    depth: int
    sentences: int
    parsed_count: int
    correct_found_count: int
    avg_rank_of_correct: float | None

    @property
    def correct_found_rate(self) -> float:
        return self.correct_found_count / self.sentences if self.sentences else 0.0


@dataclass
class EvalReport:
    depths: tuple[int, ...] = ()
    records: List[SentenceRecord] = field(default_factory=list)

    def for_depth(self, depth: int) -> List[SentenceRecord]:
        return [record for record in self.records if record.depth == depth]

    def summary(self, depth: int) -> DepthSummary:
        records = self.for_depth(depth)
        ranks = [record.rank for record in records if record.rank is not None]
        return DepthSummary(
            depth=depth,
            sentences=len(records),
            parsed_count=sum(record.parsed for record in records),
            correct_found_count=len(ranks),
            avg_rank_of_correct=sum(ranks) / len(ranks) if ranks else None,
        )

    def summaries(self) -> List[DepthSummary]:
        return [self.summary(depth) for depth in self.depths]

    @property
    def has_unparsed(self) -> bool:
        return any(not record.parsed for record in self.records)


def split_chunks(n: int, folds: int, seed: int) -> List[List[int]]:
    """Permute range(n) and split it into `folds` chunks whose sizes differ by at most one."""
    order = XorShift64Star(seed).permutation(n)
    return [chunk.tolist() for chunk in np.array_split(np.asarray(order, dtype=np.int64), folds)]


def _evaluate_fold(treebank: Treebank, chunks: List[List[int]], fold: int, cfg: EvalConfig) -> List[SentenceRecord]:
    test_ids = chunks[fold]
    train_ids = [i for other, chunk in enumerate(chunks) if other != fold for i in chunk]
    if set(test_ids) & set(train_ids):
        raise LeakageError(f"Fold {fold}: test trees appear in the training set")

    training = Treebank(tuple(treebank.trees[i] for i in train_ids), treebank.start)
    full = train(training, max(cfg.depths))
    records = []
    for depth in cfg.depths:
        grammar = full.restricted(depth)
        parser = Parser(grammar, build_index(grammar), cfg.parser_config(depth))
        for sentence_id in test_ids:
            gold = treebank.trees[sentence_id]
            started = time.perf_counter()
            results = parser.parse(tree_yield(gold))
            elapsed = time.perf_counter() - started
            records.append(
                SentenceRecord(depth, sentence_id, fold, bool(results), rank_of(gold, results), elapsed),
            )
    logger.info(f"Fold {fold + 1}/{len(chunks)} done: {len(test_ids)} sentences, {len(train_ids)} training trees")
    return records


def cross_validate(treebank: Treebank, cfg: EvalConfig) -> EvalReport:
    """
    Run k-fold cross-validation for every configured depth.

    Args:
        treebank: Gold trees; held-out yields are parsed
        cfg: Folds, depths, seed and parsing limits

    Returns:
        EvalReport: Per-sentence records ordered by depth and sentence id

    Raises:
        CorpusTooSmall: If fewer trees than folds remain after length filtering
    """
    # sentence ids stay positions in the input corpus after length filtering
    kept = list(range(len(treebank)))
    if cfg.max_sentence_len is not None:
        kept = [i for i in kept if len(treebank.trees[i].leaves()) <= cfg.max_sentence_len]
        logger.info(f"Dropped {len(treebank) - len(kept)} sentences longer than {cfg.max_sentence_len} tokens")
    if len(kept) < cfg.folds:
        raise CorpusTooSmall(f"Corpus of {len(kept)} trees cannot be split into {cfg.folds} folds")

    chunks = [[kept[i] for i in chunk] for chunk in split_chunks(len(kept), cfg.folds, cfg.seed)]
    logger.info(f"Cross-validating {len(kept)} trees in {cfg.folds} folds at depths {list(cfg.depths)}")

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as executor:
            per_fold = list(executor.map(lambda fold: _evaluate_fold(treebank, chunks, fold, cfg), range(cfg.folds)))
    else:
        per_fold = [_evaluate_fold(treebank, chunks, fold, cfg) for fold in range(cfg.folds)]

    records = sorted(
        (record for records in per_fold for record in records),
        key=lambda record: (record.depth, record.sentence_id),
    )
    report = EvalReport(cfg.depths, records)
    for summary in report.summaries():
        logger.info(
            f"Depth {summary.depth}: parsed {summary.parsed_count}/{summary.sentences}, "
            f"correct found {summary.correct_found_count}, avg rank {summary.avg_rank_of_correct}",
        )
    return report


def _format_rank(rank: float | None) -> str:
    return "" if rank is None else f"{rank:.2f}"


def summary_frame(report: EvalReport) -> pd.DataFrame:
    rows = [
        {
            "depth": summary.depth,
            "parsed": summary.parsed_count,
            "correct_found": summary.correct_found_count,
            "correct_found_pct": f"{100.0 * summary.correct_found_rate:.1f}",
            "avg_rank": _format_rank(summary.avg_rank_of_correct),
        }
        for summary in report.summaries()
    ]
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def details_frame(report: EvalReport) -> pd.DataFrame:
    rows = [
        {
            "depth": record.depth,
            "sentence_id": record.sentence_id,
            "fold": record.fold,
            "parsed": int(record.parsed),
            "rank": "" if record.rank is None else str(record.rank),
        }
        for record in report.records
    ]
    return pd.DataFrame(rows, columns=DETAIL_COLUMNS)


def emit_report(report: EvalReport, path: Union[str, Path]) -> List[Path]:
    """
    Write summary.csv, details.csv and timings.csv into a directory.

    Wall times live only in timings.csv, so the other two files are
    byte-identical across reruns with the same seed.
    """
    out_dir = Path(path)
    out_dir.mkdir(parents=True, exist_ok=True)
    timings = pd.DataFrame(
        [
            {"depth": r.depth, "sentence_id": r.sentence_id, "seconds": f"{r.seconds:.6f}"}
            for r in report.records
        ],
        columns=TIMING_COLUMNS,
    )
    written = []
    for name, frame in (
        ("summary.csv", summary_frame(report)),
        ("details.csv", details_frame(report)),
        ("timings.csv", timings),
    ):
        target = out_dir / name
        frame.to_csv(target, index=False, lineterminator="\n")
        written.append(target)
    logger.info(f"Wrote evaluation report to {out_dir}")
    return written
