"""
Context-aware probabilistic CYK parsing.

Each chart cell is completed in two phases:
(i)  candidates are built from depth-2 rules only. N-ary rules advance as
     dotted items over smaller, already completed cells; the rule
     probability is charged when the last position is filled.
(ii) every candidate is truncated at depths 3..m and each truncation found
     in the subtree index competes with the context-free probability; the
     maximum wins. The beam cut runs afterwards.

Unary nonterminal rules are closed over the completed cell with bounded,
non-repeating chains. All probabilities live in natural-log space.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Mapping
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import groupby
from typing import NamedTuple
from typing import Union

from loguru import logger

from ctxparse.core.config import config
from ctxparse.core.corpus import VAR_LABEL
from ctxparse.core.corpus import ParseTree
from ctxparse.core.corpus import Sentence
from ctxparse.core.corpus import is_type_label
from ctxparse.core.corpus import label_of
from ctxparse.core.corpus import truncate_tree
from ctxparse.core.grammar import Grammar
from ctxparse.core.grammar import RulePattern
from ctxparse.core.index import CLOSE
from ctxparse.core.index import OPEN
from ctxparse.core.index import Kind
from ctxparse.core.index import SubtreeIndex
from ctxparse.core.index import Symbol

Bindings = Mapping[str, str]
_NO_BINDINGS: Bindings = {}


@dataclass(frozen=True)
class ParserConfig:
    """
    Parser settings. `None` for top_k or beam_width means unlimited.

    recompute_all_candidates: run phase (ii) on every phase-(i) candidate
    before the beam cut (True) or only on the survivors of the cut (False).
    """

    top_k: int | None = 20
    beam_width: int | None = 20
    max_depth: int = 3
    unary_chain_limit: int = 3
    semantic_filter_enabled: bool = True
    recompute_all_candidates: bool = True

    def __post_init__(self):
        if self.max_depth < 2:
            raise ValueError(f"max_depth must be at least 2, got {self.max_depth}")
        if self.unary_chain_limit < 0:
            raise ValueError("unary_chain_limit must not be negative")
        if self.top_k is not None and self.top_k < 1:
            raise ValueError("top_k must be positive")
        if self.beam_width is not None:
            if self.beam_width < 1:
                raise ValueError("beam_width must be positive")
            if self.top_k is None or self.top_k > self.beam_width:
                raise ValueError(f"top_k ({self.top_k}) must not exceed beam_width ({self.beam_width})")

    @classmethod
    def from_config(cls, **overrides) -> ParserConfig:
        settings = {
            "top_k": config.get("TOP_K", 20),
            "beam_width": config.get("BEAM_WIDTH", 20),
            "max_depth": config.get("MAX_DEPTH", 3),
            "unary_chain_limit": config.get("UNARY_CHAIN_LIMIT", 3),
        }
        settings.update(overrides)
        return cls(**settings)


class ChartEntry:
    """
    A candidate analysis of a span.

    Children are chart entries or terminal tokens. `chain` lists the labels
    of the unary chain ending in this entry, itself included.
    """

    __slots__ = ("start", "end", "label", "children", "log_prob", "bindings", "height", "chain", "_tree", "_text")

    def __init__(
        self,
        start: int,
        end: int,
        label: str,
        children: tuple[Union[ChartEntry, str], ...],
        log_prob: float,
        bindings: Bindings = _NO_BINDINGS,
        chain: tuple[str, ...] | None = None,
    ):
        self.start = start
        self.end = end
        self.label = label
        self.children = children
        self.log_prob = log_prob
        self.bindings = bindings
        self.height = 1 + max(child.height if isinstance(child, ChartEntry) else 1 for child in children)
        self.chain = chain if chain is not None else (label,)
        self._tree: ParseTree | None = None
        self._text: str | None = None

    @property
    def span(self) -> tuple[int, int]:
        return self.start, self.end

    @property
    def probability(self) -> float:
        return math.exp(self.log_prob)

    @property
    def tree(self) -> ParseTree:
        if self._tree is None:
            self._tree = ParseTree(
                self.label,
                (child.tree if isinstance(child, ChartEntry) else child for child in self.children),
            )
        return self._tree

    @property
    def text(self) -> str:
        if self._text is None:
            self._text = str(self.tree)
        return self._text

    def __repr__(self) -> str:
        return f"ChartEntry({self.start}, {self.end}, {self.label!r}, log_prob={self.log_prob:.6g})"


class ParseResult(NamedTuple):
    tree: ParseTree
    probability: float
    log_prob: float


class _Production(NamedTuple):
    ident: int
    lhs: str
    rhs: tuple[tuple[str, bool], ...]  # (label, is_terminal)
    log_prob: float


class _Partial(NamedTuple):
    production: _Production
    children: tuple[Union[ChartEntry, str], ...]
    bindings: Bindings


def merge_bindings(left: Bindings, right: Bindings) -> Bindings | None:
    """Union of two variable->type maps, or None if a variable gets two types."""
    if not left:
        return right
    if not right:
        return left
    small, large = (left, right) if len(left) <= len(right) else (right, left)
    for name, ty in small.items():
        if large.get(name, ty) != ty:
            return None
    merged = dict(large)
    merged.update(small)
    return merged


def semantic_filter(left: ChartEntry, right: ChartEntry) -> Bindings | None:
    """
    Free-variable type compatibility of two adjacent entries.

    Returns:
        The merged bindings, or None to reject the combination
    """
    return merge_bindings(left.bindings, right.bindings)


def variable_binding(label: str, children: Sequence[Union[ChartEntry, str]]) -> tuple[str, str] | None:
    """The (variable, type) pair of a `(Type τ)` node over a single `(Var name)` child."""
    if not is_type_label(label) or len(children) != 1:
        return None
    var = children[0]
    if not isinstance(var, ChartEntry) or var.label != VAR_LABEL or len(var.children) != 1:
        return None
    name = var.children[0]
    return (name, label) if isinstance(name, str) else None


def _ranked(entries: list[ChartEntry]) -> list[ChartEntry]:
    # descending probability; equal probabilities by canonical tree text
    entries = sorted(entries, key=lambda entry: -entry.log_prob)
    ranked: list[ChartEntry] = []
    for _, run in groupby(entries, key=lambda entry: entry.log_prob):
        run = list(run)
        if len(run) > 1:
            run.sort(key=lambda entry: entry.text)
        ranked.extend(run)
    return ranked


class Parser:
    """Chart parser bound to a trained grammar, its subtree index and a config."""

    def __init__(self, grammar: Grammar, index: SubtreeIndex | None = None, cfg: ParserConfig | None = None):
        self.grammar = grammar
        self.index = index if index is not None else SubtreeIndex()
        self.cfg = cfg if cfg is not None else ParserConfig.from_config()
        self._deep_depths = range(3, min(self.cfg.max_depth, max(self.index.max_depth, 2)) + 1)
        self._compile()

    def _compile(self) -> None:
        self._lexical: dict[str, list[_Production]] = defaultdict(list)
        self._unary: dict[str, list[_Production]] = defaultdict(list)
        self._first_terminal: dict[str, list[_Production]] = defaultdict(list)
        self._first_nonterminal: dict[str, list[_Production]] = defaultdict(list)

        for ident, rule in enumerate(self.grammar.rules(2)):
            rhs = tuple((label_of(child), isinstance(child, str)) for child in rule.pattern.body)
            production = _Production(ident, rule.lhs, rhs, rule.log_prob)
            label, is_terminal = rhs[0]
            if len(rhs) == 1:
                (self._lexical if is_terminal else self._unary)[label].append(production)
            else:
                (self._first_terminal if is_terminal else self._first_nonterminal)[label].append(production)

        logger.debug(
            f"Compiled {sum(map(len, self._lexical.values()))} lexical, "
            f"{sum(map(len, self._unary.values()))} unary and "
            f"{sum(map(len, self._first_terminal.values())) + sum(map(len, self._first_nonterminal.values()))} "
            f"n-ary productions",
        )

    def parse(self, sentence: Union[Sentence, Sequence[str]]) -> list[ParseResult]:
        """
        Parse a sentence into its top-k trees rooted at the start symbol.

        Args:
            sentence: Tokens to parse

        Returns:
            list[ParseResult]: Parses by descending probability, ties by
            ascending canonical tree text; empty when there is no parse

        Raises:
            ValueError: If the sentence is empty
        """
        tokens = tuple(sentence.tokens if isinstance(sentence, Sentence) else sentence)
        if not tokens:
            raise ValueError("Cannot parse an empty sentence")

        n = len(tokens)
        cells: dict[tuple[int, int], dict[str, list[ChartEntry]]] = {}
        partials: dict[tuple[int, int], list[_Partial]] = {}
        for length in range(1, n + 1):
            for start in range(n - length + 1):
                self._fill_cell(tokens, start, start + length, cells, partials)

        entries = _ranked(cells[(0, n)].get(self.grammar.start, []))
        if self.cfg.top_k is not None:
            entries = entries[: self.cfg.top_k]
        logger.debug(f"Parsed {n} tokens: {len(entries)} parses")
        return [ParseResult(entry.tree, entry.probability, entry.log_prob) for entry in entries]

    def _fill_cell(self, tokens, start, end, cells, partials) -> None:
        filtering = self.cfg.semantic_filter_enabled
        candidates: list[ChartEntry] = []
        extended: list[_Partial] = []

        if end - start == 1:
            for production in self._lexical.get(tokens[start], ()):
                entry = self._complete(production, (tokens[start],), _NO_BINDINGS, start, end)
                if entry is not None:
                    candidates.append(entry)

        for split in range(start + 1, end):
            for item in partials.get((start, split), ()):
                label, is_terminal = item.production.rhs[len(item.children)]
                if is_terminal:
                    if end - split != 1 or tokens[split] != label:
                        continue
                    options: Sequence[Union[ChartEntry, str]] = (label,)
                else:
                    options = cells[(split, end)].get(label, ())

                for child in options:
                    bindings = item.bindings
                    if filtering and isinstance(child, ChartEntry):
                        bindings = merge_bindings(bindings, child.bindings)
                        if bindings is None:
                            continue
                    children = item.children + (child,)
                    if len(children) < len(item.production.rhs):
                        extended.append(_Partial(item.production, children, bindings))
                        continue
                    entry = self._complete(item.production, children, bindings, start, end)
                    if entry is not None:
                        candidates.append(entry)

        cell = self._select(candidates)
        self._close_unary(cell, start, end)
        cells[(start, end)] = cell
        # partials are never cut: a deep rule may still promote any completion
        partials[(start, end)] = extended + self._start_partials(tokens, cell, start, end)

    def _complete(self, production, children, bindings, start, end, chain=None) -> ChartEntry | None:
        if self.cfg.semantic_filter_enabled:
            binding = variable_binding(production.lhs, children)
            if binding is not None:
                bindings = merge_bindings(bindings, {binding[0]: binding[1]})
                if bindings is None:
                    return None
        else:
            bindings = _NO_BINDINGS

        log_prob = math.fsum([production.log_prob, *(c.log_prob for c in children if isinstance(c, ChartEntry))])
        return ChartEntry(start, end, production.lhs, children, log_prob, bindings, chain)

    def _recompute(self, entry: ChartEntry) -> None:
        """Phase (ii): let matching deep subtrees compete with the context-free probability."""
        best = entry.log_prob
        for depth in self._deep_depths:
            if entry.height < depth:
                break
            symbols, frontier = _truncated_path(entry, depth)
            hit = self.index.lookup_path(symbols)
            if hit is None:
                continue
            deep = math.fsum([hit.log_prob, *(node.log_prob for node in frontier)])
            if deep > best:
                best = deep
        entry.log_prob = best

    def _select(self, candidates: list[ChartEntry]) -> dict[str, list[ChartEntry]]:
        beam = self.cfg.beam_width
        recompute_first = self.cfg.recompute_all_candidates
        if recompute_first:
            for entry in candidates:
                self._recompute(entry)

        grouped: dict[str, list[ChartEntry]] = defaultdict(list)
        for entry in candidates:
            grouped[entry.label].append(entry)

        cell = {}
        for label, entries in grouped.items():
            entries = _ranked(entries)
            if beam is not None:
                entries = entries[:beam]
            if not recompute_first:
                for entry in entries:
                    self._recompute(entry)
                entries = _ranked(entries)
            cell[label] = entries
        return cell

    def _close_unary(self, cell: dict[str, list[ChartEntry]], start: int, end: int) -> None:
        beam = self.cfg.beam_width
        agenda = [entry for entries in cell.values() for entry in entries]
        for _ in range(self.cfg.unary_chain_limit):
            produced = []
            for child in agenda:
                for production in self._unary.get(child.label, ()):
                    if production.lhs in child.chain:
                        continue
                    entry = self._complete(
                        production, (child,), child.bindings, start, end, chain=child.chain + (production.lhs,),
                    )
                    if entry is not None:
                        produced.append(entry)
            if not produced:
                break

            agenda = []
            for label, entries in self._select(produced).items():
                merged = _ranked(cell.get(label, []) + entries)
                if beam is not None:
                    merged = merged[:beam]
                kept = {id(entry) for entry in merged}
                agenda.extend(entry for entry in entries if id(entry) in kept)
                cell[label] = merged

    def _start_partials(self, tokens, cell, start, end) -> list[_Partial]:
        started = []
        if end - start == 1:
            for production in self._first_terminal.get(tokens[start], ()):
                started.append(_Partial(production, (tokens[start],), _NO_BINDINGS))
        for label, entries in cell.items():
            for production in self._first_nonterminal.get(label, ()):
                for entry in entries:
                    started.append(_Partial(production, (entry,), entry.bindings))
        return started


def _truncated_path(entry: ChartEntry, depth: int) -> tuple[list[Symbol], list[ChartEntry]]:
    """Path string of the entry's truncation at `depth` plus its frontier entries."""
    symbols: list[Symbol] = []
    frontier: list[ChartEntry] = []
    stack: list[tuple[Union[ChartEntry, str, Symbol], int]] = [(entry, depth)]
    while stack:
        item, levels = stack.pop()
        if isinstance(item, Symbol):
            symbols.append(item)
        elif isinstance(item, str):
            symbols.append(Symbol(Kind.TERM, item))
        elif levels == 1:
            symbols.append(Symbol(Kind.NT, item.label))
            frontier.append(item)
        else:
            symbols.append(OPEN)
            symbols.append(Symbol(Kind.NT, item.label))
            stack.append((CLOSE, 0))
            stack.extend((child, levels - 1) for child in reversed(item.children))
    return symbols, frontier


def parse(
    grammar: Grammar,
    index: SubtreeIndex | None,
    sentence: Union[Sentence, Sequence[str]],
    cfg: ParserConfig | None = None,
) -> list[ParseResult]:
    return Parser(grammar, index, cfg).parse(sentence)


def truncate(tree: ParseTree, depth: int) -> RulePattern:
    """Top-level subtree of height min(depth, height(tree)) as a rule pattern."""
    body = truncate_tree(tree, depth)
    return RulePattern(body.height(), body)


def rank_of(target: ParseTree, results: Sequence[ParseResult]) -> int | None:
    """1-based rank of the result structurally equal to target, or None."""
    for rank, result in enumerate(results, start=1):
        if result.tree == target:
            return rank
    return None
