# Command-line interface

from .commands import build_parser, run_command
from .error_handler import EXIT_CONFIG, EXIT_FAILURE, EXIT_NUMERICAL, EXIT_OK, handle_cli_error

__all__ = [
    "build_parser",
    "run_command",
    "EXIT_OK",
    "EXIT_FAILURE",
    "EXIT_CONFIG",
    "EXIT_NUMERICAL",
    "handle_cli_error",
]
