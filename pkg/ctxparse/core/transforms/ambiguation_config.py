"""
Ambiguation tables: overloaded renderings, stripped prefixes, deleted
casting functors and infix symbols.

The file format is INI-like with four sections and one entry per line:

    [overload]
    vector_add -> +
    [prefixes]
    real_
    [functors]
    Cx
    [infix]
    +
"""

from __future__ import annotations

import configparser
from collections.abc import Mapping
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path
from types import MappingProxyType
from typing import Union

from loguru import logger

from ctxparse.core.utils import validate_input_path

SECTIONS = ("overload", "prefixes", "functors", "infix")

# Binary infix constants of HOL Light used when no table is supplied.
HOL_INFIX = frozenset(
    {"=", "==>", "/\\", "\\/", "<=>", "+", "-", "*", "/", "<", "<=", ">", ">=", "IN", "SUBSET", "UNION", "INTER", "$", "%"},
)


class AmbiguationConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AmbiguationConfig:
    overload_map: Mapping[str, str] = field(default_factory=dict)
    strip_prefixes: tuple[str, ...] = ()
    delete_functors: frozenset[str] = frozenset()
    infix_symbols: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "overload_map", MappingProxyType(dict(self.overload_map)))
        # longest prefix wins
        object.__setattr__(
            self,
            "strip_prefixes",
            tuple(sorted(set(self.strip_prefixes), key=lambda p: (-len(p), p))),
        )
        object.__setattr__(self, "delete_functors", frozenset(self.delete_functors))
        object.__setattr__(self, "infix_symbols", frozenset(self.infix_symbols))
        for constant, token in self.overload_map.items():
            if not constant or not token:
                raise AmbiguationConfigError(f"Empty overload entry {constant!r} -> {token!r}")

    @classmethod
    def hol_default(cls) -> AmbiguationConfig:
        return cls(infix_symbols=HOL_INFIX)

    def render(self, constant: str) -> str | None:
        """
        The ambiguous rendering of a formal constant.

        Returns:
            str | None: The overloaded or prefix-stripped token, or None when
            the constant is printed unchanged
        """
        if constant in self.overload_map:
            return self.overload_map[constant]
        for prefix in self.strip_prefixes:
            if constant.startswith(prefix) and len(constant) > len(prefix):
                return constant[len(prefix):]
        return None

    def surface(self, constant: str) -> str:
        rendered = self.render(constant)
        return constant if rendered is None else rendered

    def is_infix(self, constant: str) -> bool:
        return constant in self.infix_symbols or self.surface(constant) in self.infix_symbols

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> AmbiguationConfig:
        """
        Load a config file.

        Raises:
            FileNotFoundError: If the file does not exist
            AmbiguationConfigError: On unknown sections or malformed entries
        """
        path = validate_input_path(path)
        parser = configparser.ConfigParser(
            allow_no_value=True,
            delimiters=("->",),
            comment_prefixes=("#",),
            inline_comment_prefixes=None,
            empty_lines_in_values=False,
            interpolation=None,
        )
        parser.optionxform = str
        try:
            with open(path, encoding="utf-8") as f:
                parser.read_file(f)
        except configparser.Error as e:
            logger.error(f"Failed to read ambiguation config {path}: {e}")
            raise AmbiguationConfigError(f"{path}: {e}") from e

        unknown = set(parser.sections()) - set(SECTIONS)
        if unknown:
            raise AmbiguationConfigError(f"{path}: unknown sections {sorted(unknown)}")

        def entries(section: str) -> dict[str, str | None]:
            return dict(parser.items(section)) if parser.has_section(section) else {}

        overload = entries("overload")
        missing = [constant for constant, token in overload.items() if not token]
        if missing:
            raise AmbiguationConfigError(f"{path}: overload entries without a token: {missing}")

        cfg = cls(
            overload_map=overload,
            strip_prefixes=tuple(entries("prefixes")),
            delete_functors=frozenset(entries("functors")),
            infix_symbols=frozenset(entries("infix")),
        )
        logger.info(
            f"Loaded ambiguation config {path}: {len(cfg.overload_map)} overloads, "
            f"{len(cfg.strip_prefixes)} prefixes, {len(cfg.delete_functors)} functors, "
            f"{len(cfg.infix_symbols)} infix symbols",
        )
        return cfg
