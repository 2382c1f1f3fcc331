from __future__ import annotations

from abc import ABC
from abc import abstractmethod

from ctxparse.core.corpus import ParseTree


class TreeTransform(ABC):
    @abstractmethod
    def apply(self, tree: ParseTree) -> ParseTree:
        pass

    def apply_all(self, trees):
        return [self.apply(tree) for tree in trees]
