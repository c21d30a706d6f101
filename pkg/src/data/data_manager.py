"""
data_manager.py
Reading and writing the CSV files of the command-line tool: observations,
noiseless truth, the latent grid and wide MCMC traces.
"""

import logging
import os
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from core.exceptions import DataFormatError
from core.paths import DATA_FILE, GRID_FILE, TRACE_ELL_FILE, TRACE_SCALARS_FILE, TRACE_Z_FILE, TRUTH_FILE, trace_file
from data.experiments import Dataset
from data.grid import Grid1D
from utils.data.file_operations import OutputBundle, safe_file_exists

TRUTH_GRID_FILE = "truth_grid.csv"

COLUMNS_1D = ["x", "y"]
COLUMNS_2D = ["x1", "x2", "y", "missing"]


def _read_csv(path: str) -> pd.DataFrame:
    if not safe_file_exists(path):
        raise DataFormatError(f"File not found: {path}")
    try:
        return pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataFormatError(f"Malformed CSV {path}: {e}") from e


def _numeric(frame: pd.DataFrame, columns, path: str) -> np.ndarray:
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataFormatError(f"{path} lacks column(s) {', '.join(missing)}")
    try:
        values = frame[list(columns)].to_numpy(dtype=float)
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"{path} has non-numeric values: {e}") from e
    return values


def _columns(prefix: str, count: int):
    return [f"{prefix}_{i}" for i in range(count)]


class DataManager:
    """CSV contracts of data, truth, grid and trace files"""

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    # ===== OBSERVATIONS =====

    def write_dataset(self, bundle: OutputBundle, dataset: Dataset) -> None:
        """
        @brief Write data.csv and, for synthetic data, truth.csv (and truth_grid.csv in 1-D)
        @param bundle: Output bundle of the command
        @param dataset: Generated data set
        """
        if dataset.is_2d:
            frame = pd.DataFrame(
                {
                    "x1": dataset.x[:, 0],
                    "x2": dataset.x[:, 1],
                    "y": dataset.y,
                    "missing": dataset.missing.astype(int),
                }
            )
            bundle.write_csv(DATA_FILE, frame)
            if dataset.truth is not None:
                truth = pd.DataFrame({"x1": dataset.x[:, 0], "x2": dataset.x[:, 1], "truth": dataset.truth})
                bundle.write_csv(TRUTH_FILE, truth)
        else:
            bundle.write_csv(DATA_FILE, pd.DataFrame({"x": dataset.x, "y": dataset.y}))
            if dataset.truth is not None:
                bundle.write_csv(TRUTH_FILE, pd.DataFrame({"x": dataset.x, "truth": dataset.truth}))
            if dataset.truth_grid is not None:
                frame = pd.DataFrame({"x": dataset.grid.nodes, "truth": dataset.truth_grid})
                bundle.write_csv(TRUTH_GRID_FILE, frame)
        self.logger.info(f"Wrote {dataset.m} observations of {dataset.name} to {bundle.out_dir}")

    def read_data_1d(self, path: str) -> Tuple[np.ndarray, np.ndarray]:
        """Observation locations and responses from a ``x,y`` CSV."""
        values = _numeric(_read_csv(path), COLUMNS_1D, path)
        if values.shape[0] < 2:
            raise DataFormatError(f"{path} needs at least two rows")
        if not np.all(np.isfinite(values)):
            raise DataFormatError(f"{path} contains missing or non-finite values")
        return values[:, 0], values[:, 1]

    def read_data_2d(self, path: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(x1, x2) pairs, responses and missing flags from a ``x1,x2,y,missing`` CSV."""
        values = _numeric(_read_csv(path), COLUMNS_2D, path)
        x, y, flags = values[:, :2], values[:, 2], values[:, 3]
        if not np.all(np.isfinite(x)) or not np.all(np.isin(flags, (0.0, 1.0))):
            raise DataFormatError(f"{path} has invalid coordinates or missing flags")
        missing = flags == 1.0
        if not np.all(np.isfinite(y[~missing])):
            raise DataFormatError(f"{path} has non-finite responses in observed rows")
        return x, np.where(missing, 0.0, y), missing

    def read_truth(self, path: str, x: np.ndarray) -> np.ndarray:
        """Noiseless truth aligned with the observation rows of x."""
        frame = _read_csv(path)
        coords = ["x1", "x2"] if x.ndim == 2 else ["x"]
        values = _numeric(frame, coords + ["truth"], path)
        if values.shape[0] != x.shape[0] or not np.allclose(values[:, :-1].reshape(x.shape), x):
            raise DataFormatError(f"{path} does not match the observation locations")
        return values[:, -1]

    def read_truth_grid(self, path: str, nodes: np.ndarray) -> Optional[np.ndarray]:
        """Truth on the grid nodes, or None when the file is absent or on another grid."""
        if not safe_file_exists(path):
            return None
        values = _numeric(_read_csv(path), ["x", "truth"], path)
        if values.shape[0] != nodes.shape[0] or not np.allclose(values[:, 0], nodes):
            self.logger.warning(f"{path} is on a different grid, skipping grid coverage")
            return None
        return values[:, 1]

    # ===== GRID =====

    def write_grid(self, bundle: OutputBundle, grid: Grid1D, name: str = GRID_FILE) -> None:
        extension = np.ones(grid.n, dtype=int)
        extension[grid.interior] = 0
        bundle.write_csv(name, pd.DataFrame({"x": grid.nodes, "extension": extension}))

    def read_grid(self, path: str) -> Grid1D:
        values = _numeric(_read_csv(path), ["x", "extension"], path)
        nodes, extension = values[:, 0], values[:, 1].astype(bool)
        if nodes.size < 2:
            raise DataFormatError(f"{path} needs at least two nodes")
        h = (nodes[-1] - nodes[0]) / (nodes.size - 1)
        n_ext = int(np.argmax(~extension)) if np.any(~extension) else 0
        if not np.allclose(np.diff(nodes), h) or int(extension.sum()) != 2 * n_ext:
            raise DataFormatError(f"{path} is not a regular grid with symmetric extension")
        return Grid1D(float(nodes[0]), float(h), int(nodes.size), n_ext)

    # ===== TRACES =====

    def write_trace_1d(self, bundle: OutputBundle, z: np.ndarray, ell: np.ndarray, scalars: Dict[str, np.ndarray]) -> None:
        """Wide traces: one row per kept sample, one column per coordinate."""
        bundle.write_csv(TRACE_Z_FILE, pd.DataFrame(z, columns=_columns("z", z.shape[1])))
        bundle.write_csv(TRACE_ELL_FILE, pd.DataFrame(ell, columns=_columns("ell", ell.shape[1])))
        bundle.write_csv(TRACE_SCALARS_FILE, pd.DataFrame(scalars))

    def write_trace_component(self, bundle: OutputBundle, component: str, samples: np.ndarray) -> None:
        bundle.write_csv(trace_file(component), pd.DataFrame(samples, columns=_columns(component, samples.shape[1])))

    def read_trace(self, trace_dir: str, component: str) -> np.ndarray:
        path = os.path.join(trace_dir, trace_file(component))
        frame = _read_csv(path)
        values = _numeric(frame, list(frame.columns), path)
        if values.shape[0] == 0:
            raise DataFormatError(f"{path} has no samples")
        return values

    def read_scalars(self, trace_dir: str) -> Dict[str, np.ndarray]:
        path = os.path.join(trace_dir, TRACE_SCALARS_FILE)
        frame = _read_csv(path)
        values = _numeric(frame, list(frame.columns), path)
        return {name: values[:, i] for i, name in enumerate(frame.columns)}


# Global instance
data_manager = DataManager()
