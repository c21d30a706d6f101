"""
cli/commands.py
Command-line surface: argument parsing, settings resolution and the
simulate / fit / fit2d / diagnose commands.

Settings are resolved as defaults <- config file <- preset <- flags.
"""

import argparse
import dataclasses
import logging
import os
import time
from typing import Any, Dict, Optional, Set, Tuple

import numpy as np
import pandas as pd

from additive.block_sampler import AdditiveTrace, run_additive_chain
from additive.model import AdditiveData, Grid2D
from config.constants import defaults
from config.settings_manager import load_settings
from core.exceptions import ConfigError, DataFormatError
from core.paths import GRID_FILE, REPORT_FILE, TIMING_FILE, TRACE_SCALARS_FILE, TRACE_Z_FILE, chain_dir, trace_file
from data.data_manager import TRUTH_GRID_FILE, data_manager
from data.experiments import Dataset, generate
from data.grid import (
    Grid1D,
    build_observation_operator,
    default_extension,
    extend_domain,
    grid_for_observations,
    is_equispaced,
    make_grid,
    standardize,
)
from diagnostics.analytics_service import analytics_service
from field.likelihood import LinearObservations
from field.spde import SpdeConfig
from models.run_types import (
    DeterminantPath,
    GaussianPrior,
    HyperpriorKind,
    ModelConfig,
    RunConfig,
    SamplerKind,
    SamplerSettings,
)
from priors.elicitation import elicit_from_covariates
from samplers.chain import Trace, run_chain
from samplers.state import RegressionData
from utils.data.file_operations import OutputBundle, read_json

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS: Dict[str, Any] = {
    "sampler": SamplerKind.MELLSS.value,
    "hyperprior": HyperpriorKind.AR1.value,
    "det_path": DeterminantPath.BANDED.value,
    "iterations": defaults.ITERATIONS,
    "burnin_fraction": defaults.BURNIN_FRACTION,
    "thin": defaults.THIN,
    "batch_size": defaults.ADAPT_BATCH_SIZE,
    "target_accept": defaults.ADAPT_TARGET_ACCEPT,
    "initial_scale": defaults.INITIAL_SCALE,
    "site_initial_scale": defaults.SITE_INITIAL_SCALE,
    "seed": 0,
    "chains": 1,
    "mu_ell": defaults.MU_ELL,
    "tau_ell": defaults.TAU_ELL,
    "log_lambda_mean": defaults.LOG_LAMBDA_MEAN,
    "log_lambda_var": defaults.LOG_LAMBDA_VAR,
    "log_sigma2_mean": defaults.LOG_SIGMA2_MEAN,
    "log_sigma2_var": defaults.LOG_SIGMA2_VAR,
    "elicit_prior": False,
    "interaction": False,
    "missing_fraction": 0.0,
    "surface_draws": defaults.SURFACE_DRAWS,
    "log_level": "INFO",
}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

PRESETS: Dict[str, Dict[str, Any]] = {
    "stat": {
        "hyperprior": HyperpriorKind.CONST.value,
        "iterations": defaults.STAT_ITERATIONS,
        "burnin_fraction": defaults.STAT_BURNIN_FRACTION,
    },
}

# Experiment-specific defaults applied below the config file
EXPERIMENT_SETTINGS: Dict[str, Dict[str, Any]] = {
    "bumps": {"elicit_prior": True},
}


# ===== PARSER =====


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Settings file (key = value lines)")
    parser.add_argument("--out", dest="out_dir", help="Output directory")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--log-level", dest="log_level", choices=LOG_LEVELS, type=str.upper)
    parser.add_argument("--log-file", dest="log_file", action="store_true", help="Also log to a dated file")


def _add_model(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", dest="data_path", help="Data CSV")
    parser.add_argument("--truth", dest="truth_path", help="Noiseless truth CSV")
    parser.add_argument("--experiment", choices=defaults.EXPERIMENTS)
    parser.add_argument("--preset", choices=sorted(PRESETS))
    parser.add_argument("--hyperprior", choices=[k.value for k in HyperpriorKind])
    parser.add_argument("--iters", dest="iterations", type=int)
    parser.add_argument("--burnin-fraction", dest="burnin_fraction", type=float)
    parser.add_argument("--thin", type=int)
    parser.add_argument("--n-ext", dest="n_ext", type=int, help="Extension nodes per side")
    parser.add_argument("--mu-ell", dest="mu_ell", type=float)
    parser.add_argument("--tau-ell", dest="tau_ell", type=float)
    parser.add_argument("--elicit-prior", dest="elicit_prior", action="store_const", const=True)
    parser.add_argument("--log-lambda-mean", dest="log_lambda_mean", type=float)
    parser.add_argument("--log-lambda-var", dest="log_lambda_var", type=float)
    parser.add_argument("--log-sigma2-mean", dest="log_sigma2_mean", type=float)
    parser.add_argument("--log-sigma2-var", dest="log_sigma2_var", type=float)
    parser.add_argument("--chains", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmrf-nsgp",
        description="Sparse hierarchical non-stationary Gaussian process regression",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser("simulate", help="Generate a benchmark data set")
    _add_common(simulate)
    simulate.add_argument("--experiment", choices=defaults.EXPERIMENTS)
    simulate.add_argument("--m", type=int, help="Number of observations")
    simulate.add_argument("--noise-var", dest="noise_var", type=float)
    simulate.add_argument("--grid-n", dest="grid_n", type=int, help="Grid size (exp1) or cells per axis (additive2d)")
    simulate.add_argument("--missing-fraction", dest="missing_fraction", type=float)

    fit = subparsers.add_parser("fit", help="Fit the 1-D model")
    _add_common(fit)
    _add_model(fit)
    fit.add_argument("--sampler", choices=[k.value for k in SamplerKind])
    fit.add_argument("--grid-n", dest="grid_n", type=int, help="Total grid size including extension")
    fit.add_argument("--det-path", dest="det_path", choices=[d.value for d in DeterminantPath])

    fit2d = subparsers.add_parser("fit2d", help="Fit the additive 2-D model")
    _add_common(fit2d)
    _add_model(fit2d)
    fit2d.add_argument("--interaction", action="store_const", const=True)
    fit2d.add_argument("--surface-draws", dest="surface_draws", type=int, help="Full surfaces kept for bands and coverage")

    diagnose = subparsers.add_parser("diagnose", help="Report on stored 1-D traces")
    _add_common(diagnose)
    diagnose.add_argument("--trace-dir", dest="trace_dir", required=True)
    diagnose.add_argument("--data", dest="data_path", required=True)
    diagnose.add_argument("--truth", dest="truth_path")

    return parser


# ===== SETTINGS =====

_RUN_KEYS = {"experiment", "data_path", "truth_path", "trace_dir", "grid_n", "n_ext", "m", "noise_var"}


def resolve_settings(args: argparse.Namespace) -> Tuple[Dict[str, Any], Set[str]]:
    """
    @brief Merge defaults, config file, preset and flags
    @param args: Parsed command line
    @return tuple: (settings, keys given explicitly as flags)
    """
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("config", "command", "log_file")}
    settings = dict(DEFAULT_SETTINGS)
    file_settings = load_settings(args.config)
    experiment = flags.get("experiment", file_settings.get("experiment"))
    settings.update(EXPERIMENT_SETTINGS.get(experiment, {}))
    settings.update(file_settings)
    preset = flags.get("preset", settings.get("preset"))
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"Unknown preset: {preset}")
        settings.update(PRESETS[preset])
    settings.update(flags)
    return settings, set(flags)


def resolve_log_level(args: argparse.Namespace) -> int:
    """
    @brief Logging level from the --log-level flag, else the settings file
    @param args: Parsed command line
    @return int: A logging level (INFO when neither source names a valid one)
    """
    name = args.log_level
    if name is None:
        try:
            name = load_settings(args.config).get("log_level")
        except ConfigError:
            # reported when the command resolves its settings
            name = None
    name = str(name or DEFAULT_SETTINGS["log_level"]).upper()
    return getattr(logging, name) if name in LOG_LEVELS else logging.INFO


def _enum(kind, value, name: str):
    try:
        return kind(value)
    except ValueError as e:
        raise ConfigError(f"Invalid {name}: {value}") from e


def build_model(settings: Dict[str, Any]) -> ModelConfig:
    sampler = SamplerSettings(
        iterations=settings["iterations"],
        burnin_fraction=settings["burnin_fraction"],
        thin=settings["thin"],
        batch_size=settings["batch_size"],
        target_accept=settings["target_accept"],
        initial_scale=settings["initial_scale"],
        site_initial_scale=settings["site_initial_scale"],
    )
    return ModelConfig(
        hyperprior=_enum(HyperpriorKind, settings["hyperprior"], "hyperprior"),
        mu_ell=settings["mu_ell"],
        tau_ell=settings["tau_ell"],
        log_lambda_prior=GaussianPrior(settings["log_lambda_mean"], settings["log_lambda_var"]),
        log_sigma2_prior=GaussianPrior(settings["log_sigma2_mean"], settings["log_sigma2_var"]),
        sampler=sampler,
        det_path=_enum(DeterminantPath, settings["det_path"], "determinant path"),
    )


def build_run_config(command: str, settings: Dict[str, Any]) -> RunConfig:
    """
    @brief Validated run configuration
    @raises ConfigError: On any invalid value or missing input
    """
    out_dir = settings.get("out_dir") or (settings.get("trace_dir") if command == "diagnose" else None)
    if not out_dir:
        raise ConfigError(f"{command} needs an output directory (--out)")
    if command == "simulate" and not settings.get("experiment"):
        raise ConfigError("simulate needs --experiment")
    if command in ("fit", "fit2d") and not (settings.get("data_path") or settings.get("experiment")):
        raise ConfigError(f"{command} needs --data or --experiment")
    for key in ("data_path", "truth_path"):
        if settings.get(key) and not os.path.exists(settings[key]):
            raise ConfigError(f"File not found: {settings[key]}")
    if str(settings["log_level"]).upper() not in LOG_LEVELS:
        raise ConfigError(f"Invalid log level: {settings['log_level']}")
    if command == "diagnose" and not os.path.isdir(settings["trace_dir"]):
        raise ConfigError(f"Trace directory not found: {settings['trace_dir']}")

    model = build_model(settings) if command != "simulate" else ModelConfig()
    return RunConfig(
        command=command,
        out_dir=out_dir,
        seed=settings["seed"],
        sampler=_enum(SamplerKind, settings["sampler"], "sampler"),
        model=model,
        elicit_prior=bool(settings["elicit_prior"]),
        interaction=bool(settings["interaction"]),
        chains=settings["chains"],
        missing_fraction=settings["missing_fraction"],
        surface_draws=settings["surface_draws"],
        **{k: settings.get(k) for k in _RUN_KEYS},
    )


# ===== SIMULATE =====


def _generator_overrides(cfg: RunConfig) -> Dict[str, Any]:
    if cfg.experiment == "exp1":
        return {"m": cfg.m, "noise_var": cfg.noise_var, "n": cfg.grid_n}
    if cfg.experiment == "damped_sine":
        return {"m": cfg.m, "noise_var": cfg.noise_var}
    if cfg.experiment == "bumps":
        snr = None if cfg.noise_var is None else float(np.sqrt(1.0 / cfg.noise_var))
        return {"m": cfg.m, "snr": snr}
    return {"n1": cfg.grid_n, "noise_var": cfg.noise_var, "missing_fraction": cfg.missing_fraction}


def cmd_simulate(cfg: RunConfig) -> None:
    """data.csv and truth.csv (plus the suggested grid in 1-D) for a benchmark data set."""
    dataset = generate(cfg.experiment, seed=cfg.seed, **_generator_overrides(cfg))
    with OutputBundle(cfg.out_dir) as bundle:
        data_manager.write_dataset(bundle, dataset)
        if not dataset.is_2d and dataset.grid is not None:
            data_manager.write_grid(bundle, dataset.grid)


# ===== FIT (1-D) =====


def _load_1d(cfg: RunConfig) -> Dataset:
    if cfg.data_path is None:
        overrides = {"n": cfg.grid_n} if cfg.experiment == "exp1" else {}
        return generate(cfg.experiment, seed=cfg.seed, **overrides)
    x, y = data_manager.read_data_1d(cfg.data_path)
    truth = truth_grid = None
    if cfg.truth_path is not None:
        truth = data_manager.read_truth(cfg.truth_path, x)
    return Dataset(name=cfg.experiment or "data", x=x, y=y, truth=truth, truth_grid=truth_grid)


def _preset_grid(cfg: RunConfig, x: np.ndarray) -> Optional[Grid1D]:
    """Grid fixed by an experiment preset for the given locations."""
    if cfg.experiment == "exp1":
        n = cfg.grid_n or min(defaults.EXP1_GRIDS)
        n_ext = defaults.EXP1_GRIDS.get(n, min(defaults.EXP1_GRIDS.values()))
        lo, hi = defaults.EXP1_DOMAIN
        return extend_domain(make_grid(lo, hi, n - 2 * n_ext), n_ext)
    extension = {"damped_sine": defaults.DAMPED_SINE_EXTENSION, "bumps": defaults.BUMPS_EXTENSION}
    if cfg.experiment in extension and is_equispaced(np.unique(x)):
        return extend_domain(make_grid(float(x.min()), float(x.max()), np.unique(x).size), extension[cfg.experiment])
    return None


def _elicited_model(cfg: RunConfig, explicit: Set[str], x: np.ndarray) -> ModelConfig:
    model = cfg.model
    if not cfg.elicit_prior:
        return model
    mu_ell, tau_ell = elicit_from_covariates(x)
    if "mu_ell" in explicit:
        mu_ell = model.mu_ell
    if "tau_ell" in explicit:
        tau_ell = model.tau_ell
    logger.info(f"Elicited length-scale prior: mu_ell={mu_ell:.4f}, tau_ell={tau_ell:.4f}")
    return dataclasses.replace(model, mu_ell=mu_ell, tau_ell=tau_ell)


def _grid_truth(cfg: RunConfig, dataset: Dataset, grid: Grid1D) -> Optional[np.ndarray]:
    if dataset.truth_grid is not None and dataset.grid is not None and dataset.grid.n == grid.n:
        if np.allclose(dataset.grid.nodes, grid.nodes):
            return dataset.truth_grid
    if cfg.truth_path is not None:
        sibling = os.path.join(os.path.dirname(os.path.abspath(cfg.truth_path)), TRUTH_GRID_FILE)
        return data_manager.read_truth_grid(sibling, grid.nodes)
    return None


def _meta(cfg: RunConfig, model: ModelConfig, seed: int, **extra) -> Dict[str, Any]:
    meta = {
        "command": cfg.command,
        "sampler": cfg.sampler.value if cfg.command == "fit" else "block_mellss",
        "hyperprior": model.hyperprior.value,
        "seed": seed,
        "iterations": model.sampler.iterations,
        "burnin": model.sampler.burnin,
        "thin": model.sampler.thin,
        "mu_ell": model.mu_ell,
        "tau_ell": model.tau_ell,
        "det_path": model.det_path.value,
    }
    meta.update(extra)
    return meta


def report_1d(
    meta: Dict[str, Any],
    z: np.ndarray,
    ell: np.ndarray,
    scalars: Dict[str, np.ndarray],
    A,
    grid: Grid1D,
    truth: Optional[np.ndarray],
    truth_grid: Optional[np.ndarray],
    acceptance: Optional[Dict[str, float]] = None,
):
    """Report of a 1-D trace on the original response scale."""
    fitted = np.asarray((A @ z.T).T)
    interior = grid.interior
    return analytics_service.build_report(
        meta=meta,
        scalars=scalars,
        fields={"z": z, "ell": ell},
        fitted_samples=fitted,
        truth=truth,
        grid_samples=z[:, interior] if truth_grid is not None else None,
        truth_grid=truth_grid[interior] if truth_grid is not None else None,
        acceptance=acceptance,
    )


def cmd_fit(cfg: RunConfig, explicit: Set[str]) -> None:
    """Traces, report.json and timing.json of one or more chains of the 1-D model."""
    dataset = _load_1d(cfg)
    x = dataset.x
    model = _elicited_model(cfg, explicit, x)

    grid = None
    if cfg.n_ext is None and (cfg.grid_n is None or cfg.experiment == "exp1"):
        grid = dataset.grid if cfg.data_path is None else _preset_grid(cfg, x)
    if grid is None:
        n_ext = cfg.n_ext
        if cfg.grid_n is not None and n_ext is None:
            n_ext = default_extension((x.max() - x.min()) / (cfg.grid_n - 1), model.mu_ell)
        grid = grid_for_observations(x, cfg.grid_n, n_ext, model.mu_ell)
    logger.info(f"Grid: n={grid.n}, h={grid.h:.6g}, {grid.n_ext} extension nodes per side")

    y_std, y_mean, y_scale = standardize(dataset.y)
    A = build_observation_operator(x, grid)
    data = RegressionData(
        LinearObservations(A, y_std),
        SpdeConfig(grid.n, grid.h, grid.n_ext, model.tau, model.nu),
        grid.nodes,
    )
    truth_grid = _grid_truth(cfg, dataset, grid)

    with OutputBundle(cfg.out_dir) as bundle:
        for k in range(cfg.chains):
            seed = cfg.seed + k
            target = bundle if cfg.chains == 1 else bundle.sub_bundle(os.path.basename(chain_dir(cfg.out_dir, k)))
            trace = run_chain(cfg.sampler, data, model, seed)
            _write_fit_1d(target, cfg, model, trace, grid, A, y_mean, y_scale, dataset, truth_grid, chain=k)


def _write_fit_1d(bundle, cfg, model, trace: Trace, grid, A, y_mean, y_scale, dataset, truth_grid, chain: int):
    z = trace.z * y_scale + y_mean
    scalars = {"lambda": trace.lam, "sigma2": trace.sigma2 * y_scale**2}
    data_manager.write_grid(bundle, grid)
    data_manager.write_trace_1d(bundle, z, trace.ell, scalars)
    meta = _meta(
        cfg, model, trace.seed, chain=chain, n=grid.n, n_ext=grid.n_ext, m=int(A.shape[0]),
        y_mean=y_mean, y_scale=y_scale,
    )
    report = report_1d(meta, z, trace.ell, scalars, A, grid, dataset.truth, truth_grid, trace.acceptance)
    bundle.write_json(REPORT_FILE, report.to_dict())
    timing = analytics_service.timing_record(trace.burnin_seconds, trace.sampling_seconds, report.ess)
    bundle.write_json(TIMING_FILE, timing)


# ===== FIT (2-D) =====


def _axis_grid(values: np.ndarray, n_ext: int) -> Grid1D:
    distinct = np.unique(values)
    if not is_equispaced(distinct):
        raise DataFormatError("2-D coordinates must form a regular grid along each axis")
    return extend_domain(make_grid(float(distinct[0]), float(distinct[-1]), distinct.size), n_ext)


def _load_2d(cfg: RunConfig) -> Dataset:
    if cfg.data_path is None:
        return generate("additive2d", seed=cfg.seed, n1=cfg.grid_n, missing_fraction=cfg.missing_fraction)
    x, y, missing = data_manager.read_data_2d(cfg.data_path)
    truth = data_manager.read_truth(cfg.truth_path, x) if cfg.truth_path else None
    return Dataset(name=cfg.experiment or "data2d", x=x, y=y, truth=truth, missing=missing)


def cmd_fit2d(cfg: RunConfig, explicit: Set[str]) -> None:
    """Traces, report.json and timing.json of the additive model."""
    dataset = _load_2d(cfg)
    x, missing = dataset.x, dataset.missing
    model = _elicited_model(cfg, explicit, x[:, 0])

    n_ext = cfg.n_ext
    if n_ext is None:
        if cfg.experiment == "additive2d" or cfg.data_path is None:
            n_ext = defaults.ADDITIVE_EXTENSION
        else:
            step = float(np.min(np.diff(np.unique(x[:, 0]))))
            n_ext = default_extension(step, model.mu_ell)
    axis1, axis2 = _axis_grid(x[:, 0], n_ext), _axis_grid(x[:, 1], n_ext)
    grid = Grid2D.from_observations(x, axis1, axis2, missing)

    observed = ~missing
    _, y_mean, y_scale = standardize(dataset.y[observed])
    y_std = (dataset.y - y_mean) / y_scale
    data = AdditiveData(grid, y_std, model.tau, model.nu)
    logger.info(
        f"Additive grid {grid.n1}x{grid.n2}: {int(grid.observed.sum())} observed, "
        f"{int(grid.missing.sum())} missing, {int(grid.extension.sum())} extension cells"
    )

    rows_to_cells = (np.rint((x[:, 0] - axis1.lo) / axis1.h).astype(int) * grid.n2
                     + np.rint((x[:, 1] - axis2.lo) / axis2.h).astype(int))

    with OutputBundle(cfg.out_dir) as bundle:
        for k in range(cfg.chains):
            seed = cfg.seed + k
            target = bundle if cfg.chains == 1 else bundle.sub_bundle(os.path.basename(chain_dir(cfg.out_dir, k)))
            trace = run_additive_chain(data, model, seed, cfg.interaction, cfg.surface_draws)
            _write_fit_2d(target, cfg, model, trace, grid, rows_to_cells, y_mean, y_scale, dataset, chain=k)


def _write_fit_2d(bundle, cfg, model, trace: AdditiveTrace, grid: Grid2D, cells, y_mean, y_scale, dataset, chain: int):
    z1, z2 = trace.z1 * y_scale, trace.z2 * y_scale
    scalars: Dict[str, np.ndarray] = {"intercept": trace.intercept * y_scale + y_mean}
    for r, lam in trace.lam.items():
        scalars[f"lambda{r + 1}"] = lam
    scalars["sigma2"] = trace.sigma2 * y_scale**2

    data_manager.write_trace_component(bundle, "z1", z1)
    data_manager.write_trace_component(bundle, "z2", z2)
    fields = {"z1": z1, "z2": z2}
    for r, u in trace.u.items():
        data_manager.write_trace_component(bundle, f"ell{r + 1}", np.exp(u))
        fields[f"ell{r + 1}"] = np.exp(u)
    bundle.write_csv(TRACE_SCALARS_FILE, pd.DataFrame(scalars))

    if trace.z3_mean is not None:
        i, j = np.divmod(np.arange(grid.size), grid.n2)
        summary = pd.DataFrame(
            {
                "x1": grid.axis1.nodes[i],
                "x2": grid.axis2.nodes[j],
                "mean": trace.z3_mean * y_scale,
                "sd": trace.z3_sd * y_scale,
            }
        )
        bundle.write_csv(trace_file("z3_summary"), summary)

    meta = _meta(
        cfg, model, trace.seed, chain=chain, n1=grid.n1, n2=grid.n2, interaction=cfg.interaction,
        surface_draws=int(trace.surface_draws.shape[0]), y_mean=y_mean, y_scale=y_scale,
    )
    report = analytics_service.build_report(
        meta=meta,
        scalars=scalars,
        fields=fields,
        fitted_samples=trace.surface_draws[:, cells] * y_scale + y_mean,
        fitted_mean=trace.surface_mean[cells] * y_scale + y_mean,
        truth=dataset.truth,
        acceptance=trace.acceptance,
    )
    bundle.write_json(REPORT_FILE, report.to_dict())
    timing = analytics_service.timing_record(trace.burnin_seconds, trace.sampling_seconds, report.ess)
    bundle.write_json(TIMING_FILE, timing)


# ===== DIAGNOSE =====


def cmd_diagnose(cfg: RunConfig) -> None:
    """report.json from stored 1-D traces; MAE and EC only when a truth file is given."""
    trace_dir = cfg.trace_dir
    if not os.path.exists(os.path.join(trace_dir, TRACE_Z_FILE)):
        raise ConfigError(f"{trace_dir} holds no 1-D trace ({TRACE_Z_FILE})")
    grid = data_manager.read_grid(os.path.join(trace_dir, GRID_FILE))
    z = data_manager.read_trace(trace_dir, "z")
    ell = data_manager.read_trace(trace_dir, "ell")
    scalars = data_manager.read_scalars(trace_dir)
    if z.shape[1] != grid.n or ell.shape != z.shape:
        raise DataFormatError("Trace widths do not match the grid")

    x, _ = data_manager.read_data_1d(cfg.data_path)
    A = build_observation_operator(x, grid)
    truth = truth_grid = None
    if cfg.truth_path is not None:
        truth = data_manager.read_truth(cfg.truth_path, x)
        sibling = os.path.join(os.path.dirname(os.path.abspath(cfg.truth_path)), TRUTH_GRID_FILE)
        truth_grid = data_manager.read_truth_grid(sibling, grid.nodes)
    else:
        logger.info("No truth file given, reporting without MAE and EC")

    meta = {"command": "diagnose", "trace_dir": os.path.abspath(trace_dir), "n": grid.n, "m": int(x.size)}
    report = report_1d(meta, z, ell, scalars, A, grid, truth, truth_grid)
    timing = read_json(os.path.join(trace_dir, TIMING_FILE))
    if timing is not None:
        analytics_service.attach_timing(report, timing)

    with OutputBundle(cfg.out_dir) as bundle:
        bundle.write_json(REPORT_FILE, report.to_dict())


def run_command(args: argparse.Namespace) -> None:
    """
    @brief Resolve settings and run the parsed command
    @param args: Parsed command line
    """
    settings, explicit = resolve_settings(args)
    cfg = build_run_config(args.command, settings)
    start = time.perf_counter()
    if cfg.command == "simulate":
        cmd_simulate(cfg)
    elif cfg.command == "fit":
        cmd_fit(cfg, explicit)
    elif cfg.command == "fit2d":
        cmd_fit2d(cfg, explicit)
    else:
        cmd_diagnose(cfg)
    logger.info(f"{cfg.command} finished in {time.perf_counter() - start:.1f}s, outputs in {cfg.out_dir}")


__all__ = [
    "DEFAULT_SETTINGS",
    "PRESETS",
    "build_parser",
    "LOG_LEVELS",
    "resolve_settings",
    "resolve_log_level",
    "build_model",
    "build_run_config",
    "cmd_simulate",
    "cmd_fit",
    "cmd_fit2d",
    "cmd_diagnose",
    "run_command",
]
