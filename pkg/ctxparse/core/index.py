"""
Discrimination-tree index over truncated rule patterns.

Patterns are stored as preorder path strings in a trie. Internal pattern
nodes serialize as OPEN NT(label) ... CLOSE, frontier nonterminals as a
bare NT(label) and terminals as TERM(token), so every path string maps
back to exactly one pattern. Retrieval is exact match only.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from collections.abc import Iterator
from enum import IntEnum
from typing import NamedTuple

from loguru import logger

from ctxparse.core.corpus import Node
from ctxparse.core.corpus import ParseTree
from ctxparse.core.grammar import Grammar
from ctxparse.core.grammar import RulePattern


class Kind(IntEnum):
    OPEN = 0
    CLOSE = 1
    NT = 2
    TERM = 3


class Symbol(NamedTuple):
    kind: Kind
    value: str = ""

    def __str__(self) -> str:
        if self.kind is Kind.OPEN:
            return "("
        if self.kind is Kind.CLOSE:
            return ")"
        return f"{self.kind.name}:{self.value}"


OPEN = Symbol(Kind.OPEN)
CLOSE = Symbol(Kind.CLOSE)


class IndexEntry(NamedTuple):
    depth: int
    probability: float
    log_prob: float


def path_string(body: ParseTree) -> Iterator[Symbol]:
    """Preorder serialization of a pattern body."""
    stack: list[Node | Symbol] = [body]
    while stack:
        item = stack.pop()
        if isinstance(item, Symbol):
            yield item
        elif isinstance(item, str):
            yield Symbol(Kind.TERM, item)
        elif len(item):
            yield OPEN
            yield Symbol(Kind.NT, item.label())
            stack.append(CLOSE)
            stack.extend(reversed(item))
        else:
            yield Symbol(Kind.NT, item.label())


class _Node:
    __slots__ = ("children", "entry")

    def __init__(self):
        self.children: dict[Symbol, _Node] = {}
        self.entry: IndexEntry | None = None


class SubtreeIndex:
    """
    Trie over path strings mapping patterns to (depth, probability).

    Nodes use hash maps keyed by symbol; `dump` walks them in sorted order.
    """

    def __init__(self):
        self._root = _Node()
        self._size = 0
        self._node_count = 1
        self.max_depth = 0

    def __len__(self) -> int:
        return self._size

    @property
    def node_count(self) -> int:
        return self._node_count

    def insert(self, pattern: RulePattern, probability: float) -> None:
        self.insert_path(path_string(pattern.body), pattern.depth, probability)

    def insert_path(self, symbols: Iterable[Symbol], depth: int, probability: float) -> None:
        node = self._root
        for symbol in symbols:
            child = node.children.get(symbol)
            if child is None:
                child = node.children[symbol] = _Node()
                self._node_count += 1
            node = child
        if node.entry is None:
            self._size += 1
        node.entry = IndexEntry(depth, probability, math.log(probability))
        self.max_depth = max(self.max_depth, depth)

    def lookup_path(self, symbols: Iterable[Symbol]) -> IndexEntry | None:
        node = self._root
        for symbol in symbols:
            node = node.children.get(symbol)
            if node is None:
                return None
        return node.entry

    def lookup(self, pattern: RulePattern) -> float | None:
        """Exact-match probability of a pattern, or None if it was never inserted."""
        entry = self.lookup_path(path_string(pattern.body))
        return None if entry is None else entry.probability

    def __contains__(self, pattern: RulePattern) -> bool:
        return self.lookup(pattern) is not None

    def dump(self) -> str:
        """Indented text rendering of the trie, children in sorted order."""
        lines: list[str] = []
        stack: list[tuple[int, Symbol, _Node]] = [
            (0, symbol, child) for symbol, child in sorted(self._root.children.items(), reverse=True)
        ]
        while stack:
            level, symbol, node = stack.pop()
            suffix = "" if node.entry is None else f"  => depth {node.entry.depth} p={node.entry.probability:.12g}"
            lines.append("  " * level + str(symbol) + suffix)
            stack.extend((level + 1, s, c) for s, c in sorted(node.children.items(), reverse=True))
        return "\n".join(lines)


def build_index(grammar: Grammar, min_depth: int = 3) -> SubtreeIndex:
    """Index every rule of depth >= min_depth; a depth-2-only grammar gives an empty index."""
    index = SubtreeIndex()
    for rule in grammar.rules():
        if rule.depth >= min_depth:
            index.insert(rule.pattern, rule.probability)
    logger.info(f"Built subtree index: {len(index)} patterns, {index.node_count} nodes")
    return index
