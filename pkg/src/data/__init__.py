# Data sets, grids and the CSV contracts of the command-line tool

from .grid import (
    Grid1D,
    make_grid,
    extend_domain,
    default_extension,
    grid_for_observations,
    build_observation_operator,
    standardize,
    unstandardize,
)
from .experiments import Dataset, generate
from .data_manager import DataManager, data_manager

__all__ = [
    "Grid1D",
    "make_grid",
    "extend_domain",
    "default_extension",
    "grid_for_observations",
    "build_observation_operator",
    "standardize",
    "unstandardize",
    "Dataset",
    "generate",
    "DataManager",
    "data_manager",
]
