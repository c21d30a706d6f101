"""
data package
File utilities shared by the command-line tool.
"""

from .file_operations import (
    CSV_FLOAT_FORMAT,
    safe_file_exists,
    atomic_write,
    OutputBundle,
    read_json,
)

__all__ = [
    "CSV_FLOAT_FORMAT",
    "safe_file_exists",
    "atomic_write",
    "OutputBundle",
    "read_json",
]
