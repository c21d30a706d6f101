"""
settings_manager.py
Loading and caching of flat ``key = value`` run settings files.
Values are converted to the type of their key; unknown keys are rejected.
"""

import logging
import os
from typing import Any, Callable, Dict, Optional

from core.exceptions import ConfigError
from core.paths import DEFAULT_CONFIG_FILE


def _to_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value}")


SETTING_TYPES: Dict[str, Callable[[str], Any]] = {
    "experiment": str,
    "preset": str,
    "sampler": str,
    "hyperprior": str,
    "det_path": str,
    "iterations": int,
    "burnin_fraction": float,
    "thin": int,
    "batch_size": int,
    "target_accept": float,
    "initial_scale": float,
    "site_initial_scale": float,
    "seed": int,
    "chains": int,
    "mu_ell": float,
    "tau_ell": float,
    "log_lambda_mean": float,
    "log_lambda_var": float,
    "log_sigma2_mean": float,
    "log_sigma2_var": float,
    "elicit_prior": _to_bool,
    "interaction": _to_bool,
    "grid_n": int,
    "n_ext": int,
    "m": int,
    "noise_var": float,
    "missing_fraction": float,
    "surface_draws": int,
    "log_level": str,
}

# Module-level cache of parsed files
_CACHED_SETTINGS: Dict[str, Dict[str, Any]] = {}


def parse_settings(lines, source: str = "<settings>") -> Dict[str, Any]:
    """
    @brief Parse ``key = value`` lines (``#`` comments and blank lines ignored)
    @param lines: Iterable of text lines
    @param source: Name used in error messages
    @return dict: Typed values by key
    @raises ConfigError: On malformed lines, unknown keys or bad values
    """
    settings: Dict[str, Any] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTING_TYPES:
            raise ConfigError(f"{source}:{number}: unknown setting '{key}'")
        try:
            settings[key] = SETTING_TYPES[key](value)
        except ValueError as e:
            raise ConfigError(f"{source}:{number}: invalid value for {key}: {e}") from e
    return settings


def load_settings(path: Optional[str] = None) -> Dict[str, Any]:
    """
    @brief Settings file contents, cached per path
    @param path: Settings file (defaults to config/run_defaults.txt; a missing default file yields {})
    @return dict: Typed values by key (a copy)
    @raises ConfigError: If an explicitly given file is missing or malformed
    """
    target = os.path.abspath(path or DEFAULT_CONFIG_FILE)
    if target in _CACHED_SETTINGS:
        return dict(_CACHED_SETTINGS[target])

    if not os.path.exists(target):
        if path is not None:
            raise ConfigError(f"Config file not found: {path}")
        logging.debug(f"No default settings file at {target}")
        return {}

    with open(target, "r", encoding="utf-8") as file:
        settings = parse_settings(file, os.path.basename(target))
    _CACHED_SETTINGS[target] = settings
    logging.info(f"Settings cached from {target}: {len(settings)} key(s)")
    return dict(settings)


def reload_settings() -> None:
    """Clear the cache so the next load reads the files again."""
    _CACHED_SETTINGS.clear()
    logging.debug("Settings cache cleared")


__all__ = ["SETTING_TYPES", "parse_settings", "load_settings", "reload_settings"]
