"""
Configuration management for ctxparse.

This module provides centralized configuration management including:
- Environment variable handling (after `.env` loading)
- Default settings for training, parsing and evaluation
- Configuration validation
"""

from __future__ import annotations

import os
from typing import Any
from typing import Callable
from typing import Dict

from loguru import logger

# key -> (default, converter)
_SETTINGS: Dict[str, tuple[Any, Callable[[str], Any]]] = {
    "LOG_LEVEL": ("WARNING", str.upper),
    "START_SYMBOL": ("S", str),
    "MAX_DEPTH": (3, int),
    "TOP_K": (20, int),
    "BEAM_WIDTH": (20, int),
    "UNARY_CHAIN_LIMIT": (3, int),
    "EVAL_FOLDS": (100, int),
    "EVAL_SEED": (42, int),
    "EVAL_JOBS": (1, int),
}


class ConfigManager:
    """Centralized configuration manager for ctxparse."""

    def __init__(self):
        """Initialize configuration manager with environment variables."""
        self._config: Dict[str, Any] = {}
        self._load_environment_variables()
        self._validate_settings()

    def _load_environment_variables(self):
        """Load and convert environment variables, falling back to defaults."""
        for key, (default, convert) in _SETTINGS.items():
            raw = os.getenv(f"CTXPARSE_{key}")
            if raw is None:
                self._config[key] = default
                continue
            try:
                self._config[key] = convert(raw)
            except ValueError:
                logger.warning(f"Ignoring invalid value {raw!r} for CTXPARSE_{key}, using {default!r}")
                self._config[key] = default

        logger.debug(f"Loaded configuration: {self._config}")

    def _validate_settings(self):
        if self._config["MAX_DEPTH"] < 2:
            logger.warning("CTXPARSE_MAX_DEPTH must be at least 2, using 2")
            self._config["MAX_DEPTH"] = 2
        if self._config["TOP_K"] > self._config["BEAM_WIDTH"]:
            logger.warning("CTXPARSE_TOP_K exceeds CTXPARSE_BEAM_WIDTH, raising the beam width")
            self._config["BEAM_WIDTH"] = self._config["TOP_K"]

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value."""
        return self._config.get(key, default)

    def set(self, key: str, value: Any):
        """Set configuration value."""
        self._config[key] = value

    def get_required(self, key: str) -> Any:
        """Get required configuration value, raise error if missing."""
        value = self._config.get(key)
        if value is None:
            raise ValueError(f"Required configuration '{key}' is not set")
        return value


# Global configuration instance
config = ConfigManager()
