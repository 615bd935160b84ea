"""Implementations of the essrate subcommands.

Every command returns a process exit code:

    0  success
    1  configuration or argument error
    2  integration failure
    3  I/O failure
    4  the check ran but its verdict is negative
"""

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from essrate.analysis import (
    RateFit,
    RateKind,
    essential_check,
    fit_trajectory_rate,
    predicted_rate,
    theorem_bound_check,
)
from essrate.cli import reproduce
from essrate.cli.config import (
    EssentialReport,
    ExperimentConfig,
    SimulationReport,
    TheoremReport,
    expand_sweep,
    format_validation_error,
    load_config,
)
from essrate.cli.svg import domain_heatmap, line_plot
from essrate.config import get_settings
from essrate.dynamics import (
    ConnectingMap,
    DynamicsSpec,
    MetricKind,
    ModelKind,
    one_essential_rescaling,
)
from essrate.errors import ConfigError, EssrateError, FitError
from essrate.integrate import (
    PolicyKind,
    Trajectory,
    run,
    run_armijo,
    stability_audit,
)
from essrate.objective import (
    ObjectiveKind,
    ObjectiveSpec,
    random_quadratics,
    tmm_witness,
    witness_quadratic,
)
from essrate.registry import MethodRegistry
from essrate.stability import RkMethod, directional_radius, domain_grid, domain_radius, grid_axes

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INTEGRATION = 2
EXIT_IO = 3
EXIT_NEGATIVE = 4


def exit_code_for(error: Exception) -> int:
    """Map an exception raised by a command to its exit code."""
    if isinstance(error, ConfigError | ValidationError | KeyError):
        return EXIT_CONFIG
    if isinstance(error, OSError):
        return EXIT_IO
    return EXIT_INTEGRATION


def _report_error(error: Exception) -> int:
    if isinstance(error, ValidationError):
        message = format_validation_error(error)
    else:
        message = str(error)
    code = exit_code_for(error)
    logger.error(f"{type(error).__name__}: {message}")
    return code


def _registry() -> MethodRegistry:
    return MethodRegistry(get_settings().method_registry_path)


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    file_path.write_text(text)
    logger.info(f"Wrote {file_path}")


def _fit_kind(dynamics: DynamicsSpec, metric: MetricKind) -> RateKind:
    predicted = predicted_rate(dynamics.model, metric, dynamics.objective, dynamics.shift_b)
    if predicted is not None:
        return predicted[0]
    return RateKind.EXPONENTIAL if dynamics.objective.mu > 0.0 else RateKind.POWER


def _integrate(config: ExperimentConfig, method: RkMethod) -> tuple[DynamicsSpec, Trajectory]:
    dynamics = config.build_dynamics()
    x0 = config.initial_position(dynamics.dim)
    if config.policy.kind is PolicyKind.ARMIJO:
        return dynamics, run_armijo(dynamics, x0, config.policy, config.stop, config.metrics)
    traj = run(
        method,
        dynamics,
        dynamics.initial_state(x0),
        config.policy,
        config.stop,
        metrics=config.metrics,
    )
    return dynamics, traj


def simulate_experiment(config: ExperimentConfig) -> SimulationReport:
    """Run one experiment and write its configured artifacts.

    Raises:
        ConfigError: If a referenced name does not resolve.
        IntegrationError: If the run fails.
        OSError: If an artifact cannot be written.
    """
    method = _registry().require(config.method)
    dynamics, traj = _integrate(config, method)

    fits: dict[MetricKind, RateFit] = {}
    for metric in traj.meta.metrics:
        try:
            fits[metric] = fit_trajectory_rate(traj, metric, _fit_kind(dynamics, metric))
        except FitError as e:
            logger.warning(f"{config.name}: no {metric.value} rate fit ({e})")
    violations = [] if config.policy.kind is PolicyKind.ARMIJO else stability_audit(traj, method)
    report = SimulationReport(
        experiment=config.name,
        meta=traj.meta,
        steps=traj.final.k,
        final_t=traj.final.t,
        final_metrics=dict(traj.final.phi),
        flagged_steps=traj.flagged_steps(),
        stability_violations=violations,
        fits=fits,
    )

    outputs = config.outputs
    _write(outputs.trajectory_csv, traj.csv_text())
    _write(outputs.report_json, report.model_dump_json(indent=2) + "\n")
    if outputs.svg is not None:
        prefix = Path(outputs.svg)
        series = {m.value: traj.phi(m) for m in traj.meta.metrics}
        _write(
            str(prefix.with_name(f"{prefix.stem}-metrics.svg")),
            line_plot(traj.times, series, f"{traj.meta.dynamics} metrics", log_y=True),
        )
        _write(
            str(prefix.with_name(f"{prefix.stem}-rho.svg")),
            line_plot(traj.times, {"rho": traj.rhos}, "Jacobian spectral radius"),
        )
    return report


def _simulate_job(config: ExperimentConfig) -> int:
    try:
        report = simulate_experiment(config)
    except (EssrateError, ValidationError, OSError) as e:
        return _report_error(e)
    finals = ", ".join(f"{k.value}={v:.6g}" for k, v in report.final_metrics.items())
    print(f"{report.experiment}: {report.steps} steps to t={report.final_t:.6g}; {finals}")
    return EXIT_OK


def cmd_simulate(config_path: str) -> int:
    """Run every experiment of a config (a sweep fans out over worker processes).

    Returns the largest exit code of the experiments.
    """
    try:
        experiments = expand_sweep(load_config(config_path))
    except (ConfigError, OSError) as e:
        return _report_error(e)

    workers = min(get_settings().resolved_threads(), len(experiments))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            codes = list(pool.map(_simulate_job, experiments))
    else:
        codes = [_simulate_job(config) for config in experiments]
    return max(codes)


def domain_csv(re: np.ndarray, im: np.ndarray, grid: np.ndarray) -> str:
    """Long-format CSV ``re,im,abs_r`` of a sampled stability function."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["re", "im", "abs_r"])
    for i, y in enumerate(im):
        for j, x in enumerate(re):
            writer.writerow([repr(float(x)), repr(float(y)), repr(float(grid[i, j]))])
    return buffer.getvalue()


def cmd_stability(
    method_name: str,
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    resolution: int,
    out: str,
    svg: str | None = None,
) -> int:
    """Sample the stability domain of a method and print its radii."""
    try:
        method = _registry().require(method_name)
        re, im = grid_axes(re_range, im_range, resolution)
    except (ConfigError, KeyError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_CONFIG
    radius = domain_radius(method)
    real_axis = directional_radius(method, math.pi)
    grid = domain_grid(method, re_range, im_range, resolution)
    try:
        _write(out, domain_csv(re, im, grid))
        if svg is not None:
            _write(svg, domain_heatmap(grid, re_range, im_range, f"|R(z)| of {method.name}"))
    except OSError as e:
        return _report_error(e)
    print(f"{method.name}: domain_radius={radius:.12g} real_axis_radius={real_axis:.12g}")
    return EXIT_OK


def _single_config(config_path: str) -> ExperimentConfig:
    experiments = expand_sweep(load_config(config_path))
    if len(experiments) != 1:
        raise ConfigError(f"{config_path}: checks take a single experiment, not a sweep")
    return experiments[0]


def essential_family(config: ExperimentConfig, dynamics: DynamicsSpec) -> list[ObjectiveSpec]:
    """Sampled quadratics in S(mu, L) plus the witness, or the configured objective alone."""
    objective = dynamics.objective
    if objective.kind is not ObjectiveKind.QUADRATIC:
        return [objective]
    sampling = config.family
    family = random_quadratics(
        sampling.count, sampling.dim, objective.mu, objective.ell, seed=config.seed
    )
    if sampling.include_witness:
        if dynamics.model is ModelKind.TMM:
            family.append(tmm_witness(sampling.dim, objective.mu, objective.ell))
        else:
            family.append(witness_quadratic(sampling.dim, objective.ell, mu=objective.mu))
    if not family:
        raise ConfigError("family: count is 0 and include_witness is false")
    return family


def cmd_essential_check(config_path: str) -> int:
    """Estimate the essential constant over the config's family; exit 0 iff 1-essential."""
    try:
        config = _single_config(config_path)
        method = _registry().require(config.method)
        dynamics = config.build_dynamics()
        family = essential_family(config, dynamics)
        x0 = config.initial_position(family[0].dim)
        verdict = essential_check(
            dynamics,
            family,
            [x0],
            method,
            tol=config.family.tol,
            horizon=config.family.horizon,
            policy=config.policy,
            tail_frac=config.family.tail_frac,
        )
        report = EssentialReport(
            experiment=config.name,
            dynamics=dynamics.label,
            method=method.name,
            family=[f.label for f in family],
            verdict=verdict,
        )
        _write(config.outputs.report_json, report.model_dump_json(indent=2) + "\n")
    except (EssrateError, ValidationError, OSError, KeyError) as e:
        return _report_error(e)
    print(json.dumps(verdict.model_dump(mode="json", exclude={"radii"}), indent=2))
    return EXIT_OK if verdict.is_one_essential else EXIT_NEGATIVE


def cmd_theorem_check(config_path: str, eps: float | None = None) -> int:
    """Run a stability-capped integration and check alpha(t_k) <= (r + eps) k."""
    try:
        config = _single_config(config_path)
        if config.policy.kind is not PolicyKind.STABILITY_CAPPED:
            raise ConfigError("policy.kind: theorem-check needs a stability_capped policy")
        method = _registry().require(config.method)
        dynamics, traj = _integrate(config, method)
        alpha = ConnectingMap(
            dynamics.rescaling,
            one_essential_rescaling(dynamics.model, dynamics.objective, dynamics.shift_b),
        )
        r = domain_radius(method)
        check = theorem_bound_check(
            traj,
            alpha,
            r=r,
            eps=config.theorem.eps if eps is None else eps,
            k_min=config.theorem.k_min,
        )
        report = TheoremReport(
            experiment=config.name,
            dynamics=dynamics.label,
            method=method.name,
            connecting_map=alpha.label,
            domain_radius=r,
            check=check,
        )
        _write(config.outputs.trajectory_csv, traj.csv_text())
        _write(config.outputs.report_json, report.model_dump_json(indent=2) + "\n")
    except (EssrateError, ValidationError, OSError, KeyError) as e:
        return _report_error(e)
    print(
        f"fraction_satisfied={check.fraction_satisfied:.6g} "
        f"worst_ratio={check.worst_ratio:.6g} bound={check.bound:.6g} ({check.count} steps)"
    )
    return EXIT_OK if check.holds else EXIT_NEGATIVE


def cmd_reproduce_paper(out_dir: str) -> int:
    """Run every reference criterion, write report.md and criteria.csv.

    Returns the number of failed criteria, or 3 when out_dir is not writable.
    """
    target = Path(out_dir)
    try:
        target.mkdir(parents=True, exist_ok=True)
        marker = target / ".write-test"
        marker.write_text("")
        marker.unlink()
    except OSError as e:
        return _report_error(e)

    results = reproduce.run_all()
    try:
        reproduce.write_reports(results, target)
    except OSError as e:
        return _report_error(e)
    failed = [r.key for r in results if not r.passed]
    for r in results:
        print(f"{r.key:6s} {'pass' if r.passed else 'FAIL'}  {r.title}")
    if failed:
        logger.warning(f"Failed criteria: {', '.join(failed)}")
    return len(failed)

