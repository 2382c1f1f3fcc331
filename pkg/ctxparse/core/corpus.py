"""
Parse trees, sentences and treebank files.

Trees are `nltk` immutable trees: terminal tokens are plain `str` leaves and
a childless node is a frontier nonterminal left behind by truncation. A
treebank file holds one canonical s-expression per line; blank lines and
lines starting with `#` are skipped.
"""

from __future__ import annotations

from collections.abc import Iterable
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from loguru import logger
from nltk.tree import ImmutableTree

from ctxparse.core.config import config
from ctxparse.core.sexpr import Atom
from ctxparse.core.sexpr import SExpr
from ctxparse.core.sexpr import SexprError
from ctxparse.core.sexpr import SList
from ctxparse.core.sexpr import format_atom
from ctxparse.core.sexpr import print_sexpr
from ctxparse.core.sexpr import read_sexpr
from ctxparse.core.utils import validate_input_path

TYPE_PREFIX = "(Type "
CONCEPT_PREFIX = "$#"
VAR_LABEL = "Var"


class TreeFormatError(ValueError):
    pass


class TreebankFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message)


class ParseTree(ImmutableTree):
    """
    Rooted ordered tree of labeled nodes.

    Children are ParseTree nodes or terminal tokens. A ParseTree without
    children is a frontier nonterminal and only occurs in rule patterns;
    it prints as a childless list such as `(Num)`.
    """

    def __init__(self, node: str, children: Iterable[Node] = ()):
        super().__init__(node, list(children))

    @classmethod
    def node(cls, label: str, *children: Node) -> ParseTree:
        return cls(label, children)

    @property
    def is_frontier(self) -> bool:
        return len(self) == 0

    def nonterminals(self) -> set[str]:
        return {tree.label() for tree in self.subtrees() if len(tree)}

    def to_sexpr(self) -> SExpr:
        return SList(
            (Atom(self.label()), *(child.to_sexpr() if isinstance(child, ParseTree) else Atom(child) for child in self)),
        )

    @classmethod
    def from_sexpr(cls, expr: SExpr) -> ParseTree:
        """
        Convert an s-expression into a tree.

        `(label child ...)` becomes a node and a bare atom a terminal token.
        A list holding only its label, such as `(Num)`, is a frontier node.

        Raises:
            TreeFormatError: If the expression is an atom, a list is empty or
                its head is not an atom
        """
        if isinstance(expr, Atom):
            raise TreeFormatError(f"Expected a parenthesized tree, got atom {format_atom(expr.token)}")
        return cls._from_list(expr)

    @classmethod
    def _from_list(cls, expr: SList) -> ParseTree:
        if not expr.children:
            raise TreeFormatError("Empty list where a tree node was expected")
        head, *rest = expr.children
        if not isinstance(head, Atom):
            raise TreeFormatError(f"Node label must be an atom, got {print_sexpr(head)}")
        return cls(head.token, (child.token if isinstance(child, Atom) else cls._from_list(child) for child in rest))

    @classmethod
    def parse(cls, text: str) -> ParseTree:
        return cls.from_sexpr(read_sexpr(text))

    def __str__(self) -> str:
        return print_sexpr(self.to_sexpr())


Node = Union[ParseTree, str]


def label_of(node: Node) -> str:
    return node.label() if isinstance(node, ParseTree) else node


def node_text(node: Node) -> str:
    """Canonical text of a subtree or a (possibly quoted) token."""
    return str(node) if isinstance(node, ParseTree) else format_atom(node)


def is_type_label(label: str) -> bool:
    return label.startswith(TYPE_PREFIX) and label.endswith(")")


def is_concept_label(label: str) -> bool:
    return label.startswith(CONCEPT_PREFIX) and len(label) > len(CONCEPT_PREFIX)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[str, ...]

    def __post_init__(self):
        if any(not token for token in self.tokens):
            raise ValueError("Sentence tokens must be non-empty strings")

    @classmethod
    def from_text(cls, text: str) -> Sentence:
        return cls(tuple(text.split()))

    def __len__(self) -> int:
        return len(self.tokens)

    def __str__(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class Treebank:
    """A set of gold trees that all share the start nonterminal."""

    trees: tuple[ParseTree, ...]
    start: str = "S"

    def __post_init__(self):
        for i, tree in enumerate(self.trees):
            if tree.label() != self.start:
                raise TreebankFormatError(
                    f"Tree {i} has root {tree.label()!r}, expected start symbol {self.start!r}",
                )

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self) -> Iterator[ParseTree]:
        return iter(self.trees)


def tree_yield(tree: Node) -> Sentence:
    """The yield of a tree: its leaf tokens from left to right."""
    return Sentence((tree,) if isinstance(tree, str) else tuple(tree.leaves()))


def truncate_tree(tree: ParseTree, depth: int) -> ParseTree:
    """
    Cut a tree down to height at most `depth`.

    Nodes at level `depth` lose their children and become frontier leaves;
    terminals are kept verbatim at every level.
    """
    if depth < 1:
        raise ValueError("Truncation depth must be at least 1")
    if not len(tree):
        return tree
    if depth == 1:
        return ParseTree(tree.label())
    return ParseTree(
        tree.label(),
        (child if isinstance(child, str) else truncate_tree(child, depth - 1) for child in tree),
    )


def strip_wrappers(tree: Node) -> Node:
    """Replace `(Var x)` and `($#c tok)` nodes by their single token."""
    if isinstance(tree, str):
        return tree
    label = tree.label()
    if (label == VAR_LABEL or is_concept_label(label)) and len(tree) == 1 and isinstance(tree[0], str):
        return tree[0]
    return ParseTree(label, (strip_wrappers(child) for child in tree))


def read_trees(path: Union[str, Path]) -> list[ParseTree]:
    """
    Read one tree per line from a file.

    Args:
        path: Treebank file path

    Returns:
        list[ParseTree]: Trees in file order

    Raises:
        FileNotFoundError: If the file does not exist
        TreebankFormatError: If a line is not a well-formed tree
    """
    path = validate_input_path(path)
    trees = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                trees.append(ParseTree.parse(stripped))
            except (SexprError, TreeFormatError) as e:
                logger.error(f"Malformed tree in {path} line {lineno}: {e}")
                raise TreebankFormatError(f"{path}:{lineno}: {e}", line=lineno) from e
    logger.debug(f"Read {len(trees)} trees from {path}")
    return trees


def write_trees(trees: Iterable[ParseTree], path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for tree in trees:
            f.write(f"{node_text(tree)}\n")


def load_treebank(path: Union[str, Path], start: str | None = None) -> Treebank:
    """
    Load a treebank file.

    The start symbol defaults to the root of the first tree, or to the
    configured START_SYMBOL for an empty file.
    """
    trees = read_trees(path)
    if start is None:
        start = trees[0].label() if trees else config.get("START_SYMBOL", "S")
    treebank = Treebank(tuple(trees), start)
    logger.info(f"Loaded treebank {path}: {len(treebank)} trees, start symbol {start!r}")
    return treebank


def store_treebank(treebank: Treebank, path: Union[str, Path]) -> None:
    write_trees(treebank.trees, path)
    logger.info(f"Stored {len(treebank)} trees to {path}")
