from __future__ import annotations

from ctxparse.core.corpus import CONCEPT_PREFIX
from ctxparse.core.corpus import VAR_LABEL
from ctxparse.core.corpus import Node
from ctxparse.core.corpus import ParseTree
from ctxparse.core.corpus import is_concept_label
from ctxparse.core.corpus import strip_wrappers
from ctxparse.core.transforms.ambiguation_config import AmbiguationConfig
from ctxparse.core.transforms.tree_transform import TreeTransform


class ConceptWrapper(TreeTransform):
    """
    Wraps every terminal constant that has an ambiguous rendering into a
    `($#constant token)` concept node.

    Variable names and already wrapped tokens are left alone, so the
    transform is idempotent.
    """

    def __init__(self, cfg: AmbiguationConfig):
        self.cfg = cfg

    def apply(self, tree: ParseTree) -> ParseTree:
        return self._wrap(tree)

    def _wrap(self, node: Node) -> Node:
        if isinstance(node, str):
            rendered = self.cfg.render(node)
            if rendered is None:
                return node
            return ParseTree.node(CONCEPT_PREFIX + node, rendered)
        if node.label() == VAR_LABEL or is_concept_label(node.label()):
            return node
        return ParseTree(node.label(), (self._wrap(child) for child in node))


def wrap_concepts(typed_tree: ParseTree, cfg: AmbiguationConfig) -> ParseTree:
    return ConceptWrapper(cfg).apply(typed_tree)


class WrapperStripper(TreeTransform):
    """Inverse of the wrapping step: `(Var x)` and `($#c tok)` collapse to their token."""

    def apply(self, tree: ParseTree) -> ParseTree:
        return strip_wrappers(tree)
