"""
paths.py

Central definitions of the directories and files the command-line tool uses.

Usage:
    from core.paths import DEFAULT_CONFIG_FILE, LOGS_DIR, PROJECT_ROOT

Notes:
    - Nothing is created on import; the logger creates LOGS_DIR when file logging is on
    - Output directories of a run are chosen by the user, not defined here
"""

import os


def get_current_dir():
    """Directory of this module."""
    return os.path.dirname(os.path.abspath(__file__))


def get_src_dir():
    """Path of the src/ directory."""
    return os.path.abspath(os.path.join(get_current_dir(), ".."))


def get_project_root():
    """Path of the project root."""
    return os.path.abspath(os.path.join(get_src_dir(), ".."))


CURRENT_DIR = get_current_dir()
SRC_DIR = get_src_dir()
PROJECT_ROOT = get_project_root()

# ===== CONFIGURATION =====

SETTINGS_DIR = os.path.join(PROJECT_ROOT, "config")
DEFAULT_CONFIG_FILE = os.path.join(SETTINGS_DIR, "run_defaults.txt")

# ===== DATA =====

DATA_DIR = os.path.join(PROJECT_ROOT, "data")
LOGS_DIR = os.path.join(DATA_DIR, "logs")

# ===== OUTPUT FILE NAMES =====

DATA_FILE = "data.csv"
TRUTH_FILE = "truth.csv"
GRID_FILE = "grid.csv"
TRACE_Z_FILE = "trace_z.csv"
TRACE_ELL_FILE = "trace_ell.csv"
TRACE_SCALARS_FILE = "trace_scalars.csv"
REPORT_FILE = "report.json"
TIMING_FILE = "timing.json"


def trace_file(component: str) -> str:
    """Name of the wide trace CSV for a named component (z1, ell3, ...)."""
    return f"trace_{component}.csv"


def chain_dir(out_dir: str, chain_index: int) -> str:
    """Per-chain subdirectory used when several chains are run."""
    return os.path.join(out_dir, f"chain_{chain_index}")


__all__ = [
    "PROJECT_ROOT",
    "SRC_DIR",
    "SETTINGS_DIR",
    "DEFAULT_CONFIG_FILE",
    "DATA_DIR",
    "LOGS_DIR",
    "DATA_FILE",
    "TRUTH_FILE",
    "GRID_FILE",
    "TRACE_Z_FILE",
    "TRACE_ELL_FILE",
    "TRACE_SCALARS_FILE",
    "REPORT_FILE",
    "TIMING_FILE",
    "trace_file",
    "chain_dir",
]
