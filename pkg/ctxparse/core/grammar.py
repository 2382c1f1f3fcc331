"""
Deep-subtree grammars.

This module provides:
- Extraction of depth-d rule patterns from trees
- Relative-frequency training, normalized per (depth, left-hand side) class
- Grammar files: `<depth> TAB <probability> TAB <pattern>` per line, with
  frontier nonterminals written as childless lists such as `(Num)`
"""

from __future__ import annotations

import math
from collections import Counter
from collections import defaultdict
from collections.abc import Iterable
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Union

from loguru import logger
from nltk.grammar import Nonterminal
from nltk.grammar import Production

from ctxparse.core.config import config
from ctxparse.core.corpus import Node
from ctxparse.core.corpus import ParseTree
from ctxparse.core.corpus import Treebank
from ctxparse.core.corpus import truncate_tree
from ctxparse.core.sexpr import SexprError
from ctxparse.core.sexpr import format_atom
from ctxparse.core.utils import validate_input_path

PROBABILITY_TOLERANCE = 1e-9


class GrammarError(ValueError):
    pass


class EmptyTreebank(GrammarError):
    pass


class EmptyGrammar(GrammarError):
    pass


class GrammarFormatError(GrammarError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message)


class InvalidProbability(GrammarFormatError):
    pass


@dataclass(frozen=True)
class RulePattern:
    """A truncated subtree of height exactly `depth` used as a grammar rule."""

    depth: int
    body: ParseTree

    def __post_init__(self):
        if self.depth < 2:
            raise GrammarError(f"Rule depth must be at least 2, got {self.depth}")
        height = self.body.height()
        if height != self.depth:
            raise GrammarError(f"Pattern {self.body} has height {height}, expected {self.depth}")
        if _misplaced_frontier(self.body, self.depth):
            raise GrammarError(f"Pattern {self.body} has a frontier node above level {self.depth}")

    @property
    def lhs(self) -> str:
        return self.body.label()

    @cached_property
    def text(self) -> str:
        return str(self.body)

    def display(self) -> str:
        """Rule form `LHS -> child child ...` with frontier nodes printed as bare labels."""
        return f"{format_atom(self.lhs)} -> " + " ".join(_display(child) for child in self.body)

    def __str__(self) -> str:
        return self.text


def _misplaced_frontier(node: ParseTree, levels_left: int) -> bool:
    if not len(node):
        return levels_left != 1
    return any(_misplaced_frontier(child, levels_left - 1) for child in node if isinstance(child, ParseTree))


def _display(node: Node) -> str:
    if isinstance(node, str) or not len(node):
        return format_atom(node if isinstance(node, str) else node.label())
    return "(" + " ".join([format_atom(node.label()), *(_display(child) for child in node)]) + ")"


@dataclass(frozen=True)
class GrammarRule:
    pattern: RulePattern
    probability: float
    count: int = 0

    @property
    def depth(self) -> int:
        return self.pattern.depth

    @property
    def lhs(self) -> str:
        return self.pattern.lhs

    @cached_property
    def log_prob(self) -> float:
        return math.log(self.probability)


def extract_rules(tree: ParseTree, depth: int) -> Counter[RulePattern]:
    """
    Extract the multiset of depth-`depth` rule patterns of a tree.

    Every internal node whose subtree is at least `depth` high contributes
    its truncation; shallower nodes contribute nothing at this depth.
    """
    if depth < 2:
        raise GrammarError(f"Rule depth must be at least 2, got {depth}")
    if depth == 2:
        return Counter(production_pattern(production) for production in tree.productions() if production.rhs())
    return Counter(
        RulePattern(depth, truncate_tree(node, depth))
        for node in tree.subtrees(lambda node: node.height() >= depth)
    )


def production_pattern(production: Production) -> RulePattern:
    """The depth-2 pattern of a context-free production."""
    children = (
        ParseTree(symbol.symbol()) if isinstance(symbol, Nonterminal) else symbol for symbol in production.rhs()
    )
    return RulePattern(2, ParseTree(production.lhs().symbol(), children))


def _count_tree(tree: ParseTree, max_depth: int) -> Counter[RulePattern]:
    counts: Counter[RulePattern] = Counter()
    for depth in range(2, min(max_depth, tree.height()) + 1):
        counts.update(extract_rules(tree, depth))
    return counts


class Grammar:
    """
    Rule sets G^2..G^m with per-(depth, lhs) probability tables.

    Treat instances as immutable once built.
    """

    def __init__(self, start: str, max_depth: int, rules: Iterable[GrammarRule]):
        self.start = start
        self.max_depth = max_depth
        self._classes: dict[tuple[int, str], dict[RulePattern, GrammarRule]] = defaultdict(dict)
        for rule in rules:
            self._classes[(rule.depth, rule.lhs)][rule.pattern] = rule
        self._classes = dict(self._classes)

    def __len__(self) -> int:
        return sum(len(rules) for rules in self._classes.values())

    @property
    def classes(self) -> list[tuple[int, str]]:
        return sorted(self._classes)

    @property
    def depths(self) -> list[int]:
        return sorted({depth for depth, _ in self._classes})

    @cached_property
    def nonterminals(self) -> frozenset[str]:
        return frozenset(lhs for _, lhs in self._classes)

    def rules(self, depth: int | None = None) -> Iterator[GrammarRule]:
        """Rules in file order: by depth, then lhs, then pattern text."""
        for key in self.classes:
            if depth is not None and key[0] != depth:
                continue
            yield from sorted(self._classes[key].values(), key=lambda rule: rule.pattern.text)

    def rules_of(self, depth: int, lhs: str) -> list[GrammarRule]:
        return sorted(self._classes.get((depth, lhs), {}).values(), key=lambda rule: rule.pattern.text)

    def get(self, pattern: RulePattern) -> GrammarRule | None:
        return self._classes.get((pattern.depth, pattern.lhs), {}).get(pattern)

    def probability(self, pattern: RulePattern) -> float | None:
        rule = self.get(pattern)
        return None if rule is None else rule.probability

    def depth_counts(self) -> dict[int, tuple[int, int]]:
        """Per depth: (distinct patterns, total occurrences)."""
        stats: dict[int, tuple[int, int]] = {}
        for depth in self.depths:
            rules = list(self.rules(depth))
            stats[depth] = (len(rules), sum(rule.count for rule in rules))
        return stats

    def restricted(self, max_depth: int) -> Grammar:
        """The sub-grammar G^{2..max_depth}; classes are normalized independently."""
        rules = [rule for rule in self.rules() if rule.depth <= max_depth]
        return Grammar(self.start, min(max_depth, self.max_depth), rules)

    def check_normalized(self, tolerance: float = PROBABILITY_TOLERANCE) -> None:
        for key, rules in self._classes.items():
            total = math.fsum(rule.probability for rule in rules.values())
            if abs(total - 1.0) > tolerance:
                raise GrammarError(f"Probabilities of class {key} sum to {total}")


def train(treebank: Treebank, max_depth: int, jobs: int = 1) -> Grammar:
    """
    Train a grammar with rules of depth 2..max_depth.

    Args:
        treebank: Training trees
        max_depth: Deepest rule class m
        jobs: Number of worker threads used for counting

    Returns:
        Grammar: Relative-frequency estimates per (depth, lhs) class

    Raises:
        EmptyTreebank: If the treebank holds no trees
        GrammarError: If max_depth is below 2
    """
    if max_depth < 2:
        raise GrammarError(f"max_depth must be at least 2, got {max_depth}")
    if len(treebank) == 0:
        raise EmptyTreebank("Cannot train a grammar on an empty treebank")

    counts: Counter[RulePattern] = Counter()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            for tree_counts in executor.map(lambda tree: _count_tree(tree, max_depth), treebank.trees):
                counts.update(tree_counts)
    else:
        for tree in treebank.trees:
            counts.update(_count_tree(tree, max_depth))

    totals: Counter[tuple[int, str]] = Counter()
    for pattern, count in counts.items():
        totals[(pattern.depth, pattern.lhs)] += count

    rules = [
        GrammarRule(pattern, count / totals[(pattern.depth, pattern.lhs)], count)
        for pattern, count in counts.items()
    ]
    grammar = Grammar(treebank.start, max_depth, rules)
    logger.info(
        f"Trained grammar on {len(treebank)} trees: {len(grammar)} rules in {len(grammar.classes)} classes",
    )
    return grammar


def save_grammar(grammar: Grammar, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# start: {grammar.start}\n")
        f.write(f"# max_depth: {grammar.max_depth}\n")
        for rule in grammar.rules():
            f.write(f"{rule.depth}\t{rule.probability:.12g}\t{rule.pattern.text}\n")
    logger.info(f"Saved {len(grammar)} rules to {path}")


def load_grammar(path: Union[str, Path]) -> Grammar:
    """
    Load a grammar file written by `save_grammar`.

    Raises:
        FileNotFoundError: If the file does not exist
        EmptyGrammar: If the file holds no rules
        InvalidProbability: If a probability is outside (0, 1]
        GrammarFormatError: On any other malformed line
    """
    path = validate_input_path(path)
    header: dict[str, str] = {}
    raw: list[tuple[int, int, float, ParseTree]] = []

    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].partition(":")
                if sep:
                    header[key.strip()] = value.strip()
                continue

            fields = line.split("\t")
            if len(fields) != 3:
                raise GrammarFormatError(f"{path}:{lineno}: expected 3 tab-separated fields", line=lineno)
            try:
                depth = int(fields[0])
                probability = float(fields[1])
                body = ParseTree.parse(fields[2])
            except (ValueError, SexprError) as e:
                logger.error(f"Malformed grammar line {lineno} in {path}: {e}")
                raise GrammarFormatError(f"{path}:{lineno}: {e}", line=lineno) from e
            if not 0.0 < probability <= 1.0 or math.isnan(probability):
                raise InvalidProbability(f"{path}:{lineno}: probability {fields[1]} outside (0, 1]", line=lineno)
            raw.append((lineno, depth, probability, body))

    if not raw:
        raise EmptyGrammar(f"{path}: no grammar rules found")

    rules = []
    for lineno, depth, probability, body in raw:
        try:
            pattern = RulePattern(depth, body)
        except GrammarError as e:
            raise GrammarFormatError(f"{path}:{lineno}: {e}", line=lineno) from e
        rules.append(GrammarRule(pattern, probability))

    start = header.get("start") or config.get("START_SYMBOL", "S")
    max_depth = int(header.get("max_depth", max(depth for _, depth, _, _ in raw)))
    grammar = Grammar(start, max_depth, rules)
    logger.info(f"Loaded grammar {path}: {len(grammar)} rules, start symbol {start!r}")
    return grammar
