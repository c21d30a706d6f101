"""
cli/error_handler.py
Maps exceptions raised by a command to a one-line message and an exit code.
"""

from typing import Tuple

import numpy as np

from core.exceptions import (
    ConfigError,
    DataFormatError,
    DegenerateChain,
    DimensionMismatch,
    InvalidRange,
    NonFiniteLogPost,
    NotPositiveDefinite,
    OutOfHull,
    Singular,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def handle_cli_error(error: Exception, command: str) -> Tuple[str, int]:
    """
    @brief Converts an exception into a user-facing message and exit code
    @param error: The exception that occurred
    @param command: Command being executed
    @return tuple: (message, exit code)
    """
    if isinstance(error, ConfigError):
        return f"❌ Invalid configuration for {command}: {error}", EXIT_CONFIG

    elif isinstance(error, DataFormatError):
        return f"❌ Data error in {command}: {error}", EXIT_CONFIG

    elif isinstance(error, OutOfHull):
        return f"❌ Observations outside the grid: {error}", EXIT_CONFIG

    elif isinstance(error, (FileNotFoundError, PermissionError, IsADirectoryError)):
        return f"❌ File error in {command}: {error}", EXIT_CONFIG

    elif isinstance(error, (NotPositiveDefinite, Singular, NonFiniteLogPost)):
        return f"❌ Numerical failure in {command}: {error}", EXIT_NUMERICAL

    elif isinstance(error, DegenerateChain):
        return f"❌ Chain too short or constant for diagnostics: {error}", EXIT_NUMERICAL

    elif isinstance(error, (DimensionMismatch, InvalidRange)):
        return f"❌ Inconsistent input in {command}: {error}", EXIT_CONFIG

    elif isinstance(error, (np.linalg.LinAlgError, FloatingPointError, OverflowError)):
        return f"❌ Numerical failure in {command}: {error}", EXIT_NUMERICAL

    elif isinstance(error, KeyboardInterrupt):
        return f"❌ {command} interrupted", EXIT_FAILURE

    else:
        # Generic error for unknown cases
        return f"❌ {command} failed: {type(error).__name__}: {error}", EXIT_FAILURE


__all__ = ["EXIT_OK", "EXIT_FAILURE", "EXIT_CONFIG", "EXIT_NUMERICAL", "handle_cli_error"]
