"""
data/file_operations.py
Atomic file writes and the all-or-nothing output bundle of a command.
"""

import json
import logging
import os
import threading
from typing import Any, Callable, List, Optional

import numpy as np
import pandas as pd

# File operation lock to prevent concurrent chains interleaving writes
_file_lock = threading.Lock()

# Full-precision decimal text for every float written to CSV
CSV_FLOAT_FORMAT = "%.17g"


def safe_file_exists(file_path):
    """Safely check if file exists"""
    try:
        return os.path.exists(file_path)
    except Exception as e:
        logging.error(f"Error checking if file exists {file_path}: {e}")
        return False


def _remove_quietly(path):
    if safe_file_exists(path):
        try:
            os.remove(path)
        except OSError as e:
            logging.warning(f"Could not remove {path}: {e}")


def atomic_write(file_path: str, writer: Callable[[str], None]) -> None:
    """
    @brief Write through a temporary file and move it into place
    @param file_path: Final path
    @param writer: Callable writing the content to the path it receives
    @raises OSError: If writing or the final move fails (the temporary file is removed)
    """
    temp_file = f"{file_path}.tmp"
    try:
        with _file_lock:
            writer(temp_file)
            os.replace(temp_file, file_path)
        logging.debug(f"Successfully wrote file atomically: {file_path}")
    except Exception:
        _remove_quietly(temp_file)
        raise


def _json_ready(value: Any) -> Any:
    """numpy scalars/arrays to plain Python, non-finite floats to None"""
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return _json_ready(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


class OutputBundle:
    """
    Files produced by one command.

    Used as a context manager: every file is written atomically, and if the
    block raises, all files written so far are removed again.
    """

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.written: List[str] = []
        self.logger = logging.getLogger(self.__class__.__name__)

    def __enter__(self) -> "OutputBundle":
        os.makedirs(self.out_dir, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc_type is not None:
            self.discard()
        return False

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def _record(self, path: str) -> str:
        if path not in self.written:
            self.written.append(path)
        return path

    def write_csv(self, name: str, frame: pd.DataFrame) -> str:
        """Write a DataFrame without index at full float precision."""
        path = self.path(name)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        atomic_write(
            path,
            lambda tmp: frame.to_csv(tmp, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"),
        )
        return self._record(path)

    def write_json(self, name: str, payload: Any) -> str:
        path = self.path(name)
        os.makedirs(os.path.dirname(path), exist_ok=True)

        def dump(tmp):
            with open(tmp, "w", encoding="utf-8") as f:
                json.dump(_json_ready(payload), f, indent=2, ensure_ascii=False)
                f.write("\n")

        atomic_write(path, dump)
        return self._record(path)

    def discard(self) -> None:
        """Remove every file written through this bundle."""
        for path in reversed(self.written):
            _remove_quietly(path)
        if self.written:
            self.logger.warning(f"Removed {len(self.written)} partial output file(s) from {self.out_dir}")
        self.written = []

    def sub_bundle(self, name: str) -> "OutputBundle":
        """Bundle for a subdirectory whose files are discarded together with this one."""
        child = OutputBundle(self.path(name))
        os.makedirs(child.out_dir, exist_ok=True)
        child.written = self.written
        return child


def read_json(file_path: str) -> Optional[dict]:
    if not safe_file_exists(file_path):
        return None
    with open(file_path, "r", encoding="utf-8") as f:
        return json.load(f)


__all__ = [
    "CSV_FLOAT_FORMAT",
    "safe_file_exists",
    "atomic_write",
    "OutputBundle",
    "read_json",
]
