"""
Utility functions for ctxparse core functionality.

This module provides common utilities including:
- Input path validation
- Depth list parsing shared by the CLI and the evaluation harness
"""

from __future__ import annotations

from pathlib import Path
from typing import List
from typing import Union

from loguru import logger


def validate_input_path(path: Union[str, Path]) -> Path:
    """
    Validate that an input path exists and is a regular file.

    Args:
        path: Path to validate

    Returns:
        Path: The validated path

    Raises:
        FileNotFoundError: If the file doesn't exist
        ValueError: If the path is not a file
    """
    path = Path(path)

    if not path.exists():
        raise FileNotFoundError(f"File does not exist: {path}")

    if not path.is_file():
        raise ValueError(f"Path is not a file: {path}")

    logger.debug(f"Validated input path {path}")
    return path


def parse_depths(text: str) -> List[int]:
    """
    Parse a depth list such as `2,3,5`, `2-7` or `2..7`.

    Args:
        text: Comma separated depths and inclusive ranges

    Returns:
        List[int]: Sorted distinct depths

    Raises:
        ValueError: If an item is malformed or a depth is below 2
    """
    depths = set()
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        for sep in ("..", "-"):
            if sep in item:
                low, high = (int(part) for part in item.split(sep, 1))
                depths.update(range(low, high + 1))
                break
        else:
            depths.add(int(item))

    if not depths:
        raise ValueError(f"No depths given in {text!r}")
    if min(depths) < 2:
        raise ValueError(f"Depths must be at least 2, got {sorted(depths)}")
    return sorted(depths)
