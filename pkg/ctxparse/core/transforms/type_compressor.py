from __future__ import annotations

from dataclasses import dataclass

from loguru import logger

from ctxparse.core.corpus import VAR_LABEL
from ctxparse.core.corpus import Node
from ctxparse.core.corpus import ParseTree
from ctxparse.core.corpus import label_of
from ctxparse.core.transforms.ambiguation_config import AmbiguationConfig
from ctxparse.core.transforms.tree_transform import TreeTransform

TERM_ARITY = {"Comb": 2, "Abs": 3, "Const": 2, "Var": 2}


class MalformedHolTree(ValueError):
    def __init__(self, message: str, path: tuple[int, ...] = ()):
        self.path = path
        location = "/" + "/".join(str(i) for i in path)
        super().__init__(f"{message} at {location}")


@dataclass(frozen=True)
class HolType:
    name: str
    args: tuple[HolType, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return "(" + " ".join([self.name, *(str(arg) for arg in self.args)]) + ")"

    @property
    def is_function(self) -> bool:
        return self.name == "fun" and len(self.args) == 2

    def label(self) -> str:
        return f"(Type {self})"


def _name_of(node: Node, path: tuple[int, ...]) -> str:
    if not isinstance(node, str):
        raise MalformedHolTree(f"Expected a name, got node {node.label()!r}", path)
    return node


def read_type(tree: Node, path: tuple[int, ...] = ()) -> HolType:
    if isinstance(tree, ParseTree):
        if tree.label() == "Tyapp" and len(tree):
            name = _name_of(tree[0], path + (0,))
            args = tuple(read_type(arg, path + (i,)) for i, arg in enumerate(tree[1:], start=1))
            return HolType(name, args)
        if tree.label() == "Tyvar" and len(tree) == 1:
            return HolType(_name_of(tree[0], path + (0,)))
    raise MalformedHolTree(f"Malformed type {label_of(tree)!r}", path)


class TypeCompressor(TreeTransform):
    """
    Turns raw HOL terms (Comb/Abs/Const/Var over Tyapp/Tyvar types) into
    trees whose nonterminals are opaque `(Type τ)` labels.

    Application spines are flattened, constants become terminal tokens and
    binary applications of infix constants are printed between their
    operands.
    """

    def __init__(self, cfg: AmbiguationConfig | None = None):
        self.cfg = cfg if cfg is not None else AmbiguationConfig.hol_default()

    def apply(self, tree: ParseTree) -> ParseTree:
        compressed, _ = self._term(tree, ())
        return compressed

    def _check_arity(self, tree: Node, path: tuple[int, ...]) -> ParseTree:
        if isinstance(tree, str):
            raise MalformedHolTree(f"Expected a term, got token {tree!r}", path)
        expected = TERM_ARITY.get(tree.label())
        if expected is None:
            raise MalformedHolTree(f"Unknown term constructor {tree.label()!r}", path)
        if len(tree) != expected:
            raise MalformedHolTree(f"{tree.label()} expects {expected} children, got {len(tree)}", path)
        return tree

    def _term(self, tree: Node, path: tuple[int, ...]) -> tuple[ParseTree, HolType]:
        tree = self._check_arity(tree, path)
        kind = tree.label()

        if kind == "Var":
            name = _name_of(tree[0], path + (0,))
            ty = read_type(tree[1], path + (1,))
            return ParseTree.node(ty.label(), ParseTree.node(VAR_LABEL, name)), ty

        if kind == "Const":
            name = _name_of(tree[0], path + (0,))
            ty = read_type(tree[1], path + (1,))
            return ParseTree.node(ty.label(), name), ty

        if kind == "Abs":
            name = _name_of(tree[0], path + (0,))
            var_ty = read_type(tree[1], path + (1,))
            body, body_ty = self._term(tree[2], path + (2,))
            ty = HolType("fun", (var_ty, body_ty))
            bound = ParseTree.node(var_ty.label(), ParseTree.node(VAR_LABEL, name))
            return ParseTree.node(ty.label(), ParseTree.node("Abs", bound, body)), ty

        return self._application(tree, path)

    def _application(self, tree: ParseTree, path: tuple[int, ...]) -> tuple[ParseTree, HolType]:
        # unwind the curried spine f a1 ... an
        args: list[tuple[Node, tuple[int, ...]]] = []
        head, head_path = tree, path
        while label_of(head) == "Comb":
            head = self._check_arity(head, head_path)
            args.append((head[1], head_path + (1,)))
            head, head_path = head[0], head_path + (0,)
        args.reverse()

        head = self._check_arity(head, head_path)
        head_tree: Node
        if head.label() == "Const":
            token = _name_of(head[0], head_path + (0,))
            ty = read_type(head[1], head_path + (1,))
            head_tree = token
        else:
            token = None
            head_tree, ty = self._term(head, head_path)

        operands = []
        for arg, arg_path in args:
            if not ty.is_function:
                raise MalformedHolTree(f"Applying a term of non-function type {ty}", arg_path)
            operand, operand_ty = self._term(arg, arg_path)
            if operand_ty != ty.args[0]:
                raise MalformedHolTree(f"Argument of type {operand_ty} where {ty.args[0]} expected", arg_path)
            operands.append(operand)
            ty = ty.args[1]

        if token is not None and len(operands) == 2 and self.cfg.is_infix(token):
            children = (operands[0], head_tree, operands[1])
        else:
            children = (head_tree, *operands)
        logger.trace(f"Compressed application of {head.label()} with {len(operands)} arguments")
        return ParseTree(ty.label(), children), ty


def compress_types(hol_tree: ParseTree, cfg: AmbiguationConfig | None = None) -> ParseTree:
    """
    Compress the types of a raw HOL tree into opaque nonterminals.

    Raises:
        MalformedHolTree: On a wrong constructor arity, a missing type or an
            ill-typed application
    """
    return TypeCompressor(cfg).apply(hol_tree)
