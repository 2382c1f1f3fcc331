from __future__ import annotations

from loguru import logger

from ctxparse.core.corpus import Node
from ctxparse.core.corpus import ParseTree
from ctxparse.core.corpus import Sentence
from ctxparse.core.corpus import tree_yield
from ctxparse.core.transforms.ambiguation_config import AmbiguationConfig
from ctxparse.core.transforms.concept_wrapper import ConceptWrapper
from ctxparse.core.transforms.tree_transform import TreeTransform
from ctxparse.core.transforms.type_compressor import TypeCompressor


class Ambiguator(TreeTransform):
    """
    Informalizes a raw HOL tree: overloaded and prefix-stripped renderings,
    deleted casting functors, infix placement. Types and brackets vanish
    when the yield is taken.
    """

    def __init__(self, cfg: AmbiguationConfig):
        self.cfg = cfg
        self._compressor = TypeCompressor(cfg)
        self._wrapper = ConceptWrapper(cfg)

    def apply(self, tree: ParseTree) -> ParseTree:
        typed = self._compressor.apply(tree)
        return self._wrapper.apply(self._delete_functors(typed))

    def _delete_functors(self, tree: Node) -> Node:
        if isinstance(tree, str):
            return tree
        children = tuple(self._delete_functors(child) for child in tree)
        if len(children) == 2 and isinstance(children[0], str) and children[0] in self.cfg.delete_functors:
            logger.trace(f"Deleting casting functor {children[0]}")
            return children[1]
        return ParseTree(tree.label(), children)

    def sentence(self, tree: ParseTree) -> Sentence:
        return tree_yield(self.apply(tree))


def ambiguate(formal_tree: ParseTree, cfg: AmbiguationConfig) -> Sentence:
    """
    Informalize a raw HOL tree into an ambiguous token sequence.

    Raises:
        MalformedHolTree: If the input is not a well-formed HOL term
    """
    return Ambiguator(cfg).sentence(formal_tree)
