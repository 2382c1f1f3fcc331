from __future__ import annotations

import random
import time

import pytest

from ctxparse.core.corpus import Node
from ctxparse.core.corpus import ParseTree
from ctxparse.core.grammar import RulePattern
from ctxparse.core.grammar import train
from ctxparse.core.index import CLOSE
from ctxparse.core.index import OPEN
from ctxparse.core.index import Kind
from ctxparse.core.index import SubtreeIndex
from ctxparse.core.index import Symbol
from ctxparse.core.index import build_index
from ctxparse.core.index import path_string
from tests.oracle import random_treebank

LABELS = ("A", "B", "C", "D", "E")
TOKENS = ("a", "b", "c", "d", "+", "*")


def _random_child(rng: random.Random, levels: int) -> Node:
    """A subtree whose frontier nodes sit exactly `levels` below its root."""
    if levels == 1:
        if rng.random() < 0.5:
            return ParseTree(rng.choice(LABELS))
        return rng.choice(TOKENS)
    if rng.random() < 0.3:
        return rng.choice(TOKENS)
    children = [_random_child(rng, levels - 1) for _ in range(rng.randint(1, 3))]
    return ParseTree(rng.choice(LABELS), children)


def random_pattern(rng: random.Random, depth: int = 3) -> RulePattern:
    """A pattern of height exactly `depth`: the first child always reaches the bottom level."""
    first = ParseTree.node(rng.choice(LABELS), ParseTree(rng.choice(LABELS)))
    for _ in range(depth - 3):
        first = ParseTree.node(rng.choice(LABELS), first)
    rest = [_random_child(rng, depth - 1) for _ in range(rng.randint(0, 2))]
    return RulePattern(depth, ParseTree(rng.choice(LABELS), (first, *rest)))


def numbered_body(n: int) -> ParseTree:
    """The n-th of a family of distinct depth-3 bodies `(L0 (L1 (L2) +) (L3 tN))`."""
    labels = []
    for _ in range(4):
        n, digit = divmod(n, len(LABELS))
        labels.append(LABELS[digit])
    return ParseTree.node(
        labels[0],
        ParseTree.node(labels[1], ParseTree(labels[2]), "+"),
        ParseTree.node(labels[3], f"t{n}"),
    )


class TestPathString:
    def test_deep_rule(self, grammar3):
        pattern = next(r.pattern for r in grammar3.rules(3) if r.pattern.text == "(S (Num (Num) + (Num)) .)")
        assert list(path_string(pattern.body)) == [
            OPEN, Symbol(Kind.NT, "S"),
            OPEN, Symbol(Kind.NT, "Num"),
            Symbol(Kind.NT, "Num"), Symbol(Kind.TERM, "+"), Symbol(Kind.NT, "Num"),
            CLOSE,
            Symbol(Kind.TERM, "."),
            CLOSE,
        ]

    def test_frontier_differs_from_terminal(self):
        frontier = ParseTree.node("X", ParseTree.node("Y", ParseTree("Z")))
        terminal = ParseTree.node("X", ParseTree.node("Y", "Z"))
        assert list(path_string(frontier)) != list(path_string(terminal))

    def test_numbered_bodies_are_patterns(self):
        for n in (0, 1, 624, 625, 499_999, 999_999):
            assert RulePattern(3, numbered_body(n)).depth == 3
        assert numbered_body(3) != numbered_body(3 + 625)


class TestBuildIndex:
    def test_contains_deep_rule(self, grammar3, index3):
        pattern = next(
            r.pattern
            for r in grammar3.rules(3)
            if r.pattern.text == "(Num (Num (Num) * (Num)) + (Num (Num) * (Num)))"
        )
        assert index3.lookup(pattern) == grammar3.probability(pattern)
        assert pattern in index3

    def test_only_deep_rules(self, grammar3, index3):
        assert len(index3) == len(list(grammar3.rules(3)))
        assert all(rule.pattern not in index3 for rule in grammar3.rules(2))

    def test_depth_two_grammar_gives_empty_index(self, grammar2):
        index = build_index(grammar2)
        assert len(index) == 0
        assert index.max_depth == 0

    def test_unseen_pattern(self, index3):
        pattern = RulePattern(3, ParseTree.parse("(Num (Num 7) * (Num x))"))
        assert index3.lookup(pattern) is None

    def test_size_matches_distinct_deep_rules(self):
        rng = random.Random(23)
        for _ in range(100):
            grammar = train(random_treebank(rng), 4)
            index = build_index(grammar)
            assert len(index) == sum(1 for rule in grammar.rules() if rule.depth >= 3)

    def test_dump_is_sorted_text(self, index3):
        dump = index3.dump()
        assert dump.splitlines()[0] == "("
        assert "=> depth 3 p=1" in dump


class TestSubtreeIndex:
    def test_matches_hash_map(self):
        rng = random.Random(99)
        oracle: dict[RulePattern, float] = {}
        index = SubtreeIndex()
        symbols = 0
        while len(oracle) < 20000:
            pattern = random_pattern(rng, rng.choice((3, 4)))
            probability = rng.uniform(0.01, 1.0)
            if pattern not in oracle:
                symbols += len(list(path_string(pattern.body)))
            oracle[pattern] = probability
            index.insert(pattern, probability)

        assert len(index) == len(oracle)
        assert index.node_count <= symbols + 1

        stored = list(oracle)
        for i in range(50000):
            pattern = stored[rng.randrange(len(stored))] if i % 2 else random_pattern(rng, 3)
            expected = oracle.get(pattern)
            found = index.lookup(pattern)
            if expected is None:
                assert found is None
            else:
                assert found == expected

    def test_reinsert_overwrites(self):
        index = SubtreeIndex()
        pattern = RulePattern(3, ParseTree.parse("(A (B b) c)"))
        index.insert(pattern, 0.5)
        index.insert(pattern, 0.25)
        assert len(index) == 1
        assert index.lookup(pattern) == 0.25

    @pytest.mark.slow
    def test_full_scale_against_hash_map(self):
        stored_count, lookup_count = 500_000, 1_000_000
        symbols: dict[Symbol, Symbol] = {}

        def path(n: int) -> tuple[Symbol, ...]:
            return tuple(symbols.setdefault(symbol, symbol) for symbol in path_string(numbered_body(n)))

        rng = random.Random(7)
        stored = [path(n) for n in range(stored_count)]
        oracle = {key: rng.uniform(0.01, 1.0) for key in stored}
        lookups = [
            stored[rng.randrange(stored_count)] if i % 2 else path(stored_count + i // 2)
            for i in range(lookup_count)
        ]

        index = SubtreeIndex()
        started = time.perf_counter()
        for key, probability in oracle.items():
            index.insert_path(key, 3, probability)
        found = [index.lookup_path(key) for key in lookups]
        elapsed = time.perf_counter() - started

        assert len(index) == stored_count
        for key, entry in zip(lookups, found):
            expected = oracle.get(key)
            if expected is None:
                assert entry is None
            else:
                assert entry.probability == expected
        assert elapsed < 60
