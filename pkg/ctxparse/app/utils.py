from __future__ import annotations

import sys
from collections.abc import Iterable

from loguru import logger
from tabulate import tabulate

from ctxparse.core.parser import ParseResult

EXIT_OK = 0
EXIT_NO_PARSE = 1
EXIT_USAGE = 2


def configure_logging(level: str) -> None:
    """Route all log output to a single stderr sink so stdout stays machine-readable."""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="{time:HH:mm:ss} | {level: <8} | {name} | {message}")


def format_result(rank: int, result: ParseResult) -> str:
    return f"{rank}\t{result.probability:.11e}\t{result.tree}"


def format_table(rows: Iterable[Iterable], headers: list[str]) -> str:
    return tabulate(list(rows), headers=headers, tablefmt="tsv", disable_numparse=True, stralign=None, numalign=None)
