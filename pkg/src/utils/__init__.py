"""
Utils package
Shared helpers organized by functionality in subpackages.
"""

from .data import CSV_FLOAT_FORMAT, OutputBundle, atomic_write, read_json, safe_file_exists

__all__ = [
    "CSV_FLOAT_FORMAT",
    "OutputBundle",
    "atomic_write",
    "read_json",
    "safe_file_exists",
]
