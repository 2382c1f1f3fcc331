"""
S-expression reading and printing for ctxparse.

This module provides the concrete tree notation shared by treebanks,
grammar files and parser output:
- Position-annotated reading of a single s-expression
- Canonical single-line printing
- Quoting of atoms that contain whitespace, parentheses or quotes
"""

from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field
from typing import Union

_DELIMITERS = '()"'


class SexprError(ValueError):
    """Base class for s-expression syntax errors."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnbalancedParens(SexprError):
    pass


class EmptyInput(SexprError):
    pass


class UnterminatedQuote(SexprError):
    pass


class TrailingInput(SexprError):
    pass


class EmptyAtom(SexprError):
    pass


@dataclass(frozen=True)
class Atom:
    """A leaf token. `quoted` only records how the token was written."""

    token: str
    quoted: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class SList:
    """A parenthesized sequence of s-expressions."""

    children: tuple[SExpr, ...] = ()


SExpr = Union[Atom, SList]


def needs_quoting(token: str) -> bool:
    return not token or any(ch.isspace() or ch in _DELIMITERS for ch in token)


def quote(token: str) -> str:
    escaped = token.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def format_atom(token: str, quoted: bool = False) -> str:
    if quoted or needs_quoting(token):
        return quote(token)
    return token


def _skip_whitespace(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _read_quoted(text: str, start: int) -> tuple[Atom, int]:
    chars = []
    pos = start + 1
    while pos < len(text):
        ch = text[pos]
        if ch == "\\":
            if pos + 1 >= len(text):
                break
            chars.append(text[pos + 1])
            pos += 2
            continue
        if ch == '"':
            if not chars:
                raise EmptyAtom("Empty quoted atom", start)
            return Atom("".join(chars), quoted=True), pos + 1
        chars.append(ch)
        pos += 1
    raise UnterminatedQuote("Unterminated quoted atom", start)


def _read_bare(text: str, start: int) -> tuple[Atom, int]:
    pos = start
    while pos < len(text) and not text[pos].isspace() and text[pos] not in _DELIMITERS:
        pos += 1
    return Atom(text[start:pos]), pos


def _read(text: str, pos: int) -> tuple[SExpr, int]:
    # iterative so that deep formal trees do not hit the recursion limit
    stack: list[tuple[int, list[SExpr]]] = []
    while True:
        pos = _skip_whitespace(text, pos)
        if pos >= len(text):
            if stack:
                raise UnbalancedParens("Unclosed '('", stack[-1][0])
            raise EmptyInput("No s-expression found")

        ch = text[pos]
        if ch == "(":
            stack.append((pos, []))
            pos += 1
            continue
        if ch == ")":
            if not stack:
                raise UnbalancedParens("Unexpected ')'", pos)
            _, children = stack.pop()
            item: SExpr = SList(tuple(children))
            pos += 1
        elif ch == '"':
            item, pos = _read_quoted(text, pos)
        else:
            item, pos = _read_bare(text, pos)

        if not stack:
            return item, pos
        stack[-1][1].append(item)


def read_sexpr(text: str) -> SExpr:
    """
    Read exactly one s-expression from text.

    Args:
        text: Source text holding a single well-formed s-expression

    Returns:
        SExpr: The parsed expression

    Raises:
        EmptyInput: If text holds only whitespace
        UnbalancedParens: If parentheses do not match
        UnterminatedQuote: If a quoted atom is not closed
        TrailingInput: If anything follows the first expression
    """
    expr, pos = _read(text, 0)
    pos = _skip_whitespace(text, pos)
    if pos < len(text):
        if text[pos] == ")":
            raise UnbalancedParens("Unexpected ')'", pos)
        raise TrailingInput("Unexpected input after s-expression", pos)
    return expr


def print_sexpr(expr: SExpr) -> str:
    """Print the canonical single-line form of an s-expression."""
    if isinstance(expr, Atom):
        return format_atom(expr.token, expr.quoted)
    return "(" + " ".join(print_sexpr(child) for child in expr.children) + ")"


def normalize(text: str) -> str:
    return print_sexpr(read_sexpr(text))
