"""Convergence-rate fitting and the closed-form essential rates."""

import logging
import math
from collections.abc import Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import linregress

from essrate.analysis.models import BSweepResult, RateFit, RateKind, RateRow
from essrate.config import get_settings
from essrate.dynamics.models import DynamicsSpec, ModelKind
from essrate.dynamics.protocol import MetricKind
from essrate.errors import FitError
from essrate.integrate.models import Trajectory
from essrate.objective.models import ObjectiveKind, ObjectiveSpec

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 5
FIT_FLOOR = 1e2 * np.finfo(float).eps


def fit_rate(
    x: Sequence[float] | np.ndarray,
    phi: Sequence[float] | np.ndarray,
    kind: RateKind,
    window: float | None = None,
    floor: float = FIT_FLOOR,
) -> RateFit:
    """Fit a convergence rate to the trailing part of a series.

    Points with phi <= floor (or non-finite) are dropped first, then the last
    ``window`` fraction of the remaining points is fitted by least squares on
    (log x, log phi) for power, (x, log phi) for exponential and linear_k.

    Args:
        x: Times (power, exponential) or step indices (linear_k).
        phi: Metric values.
        kind: Rate shape to fit.
        window: Trailing fraction of points; defaults to Settings.fit_window.
        floor: Values at or below this are treated as floating-point floor.

    Raises:
        FitError: If fewer than 5 usable points remain.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(phi, dtype=float)
    if xs.shape != ys.shape:
        raise FitError(f"series lengths differ: {xs.shape} vs {ys.shape}")
    frac = get_settings().fit_window if window is None else window
    if not 0.0 < frac <= 1.0:
        raise FitError(f"window must be in (0, 1], got {frac}")

    keep = np.isfinite(ys) & (ys > floor) & np.isfinite(xs)
    if kind is RateKind.POWER:
        keep &= xs > 0.0
    indices = np.flatnonzero(keep)
    count = math.ceil(frac * len(indices))
    indices = indices[len(indices) - count :]
    if len(indices) < MIN_FIT_POINTS:
        raise FitError(f"need at least {MIN_FIT_POINTS} positive points, got {len(indices)}")

    log_phi = np.log(ys[indices])
    abscissa = np.log(xs[indices]) if kind is RateKind.POWER else xs[indices]
    if np.ptp(abscissa) == 0.0:
        raise FitError("cannot fit a rate over a single abscissa value")
    fit = linregress(abscissa, log_phi)
    if np.ptp(log_phi) == 0.0:
        # constant log(phi): the zero-slope line is exact
        r_squared = 1.0
    else:
        r_squared = min(1.0, max(0.0, float(fit.rvalue) ** 2))
    return RateFit(
        kind=kind,
        exponent=-float(fit.slope),
        coefficient=math.exp(float(fit.intercept)),
        r_squared=r_squared,
        window=(int(indices[0]), int(indices[-1])),
    )


def fit_trajectory_rate(
    traj: Trajectory,
    metric: MetricKind,
    kind: RateKind,
    window: float | None = None,
    floor: float = FIT_FLOOR,
) -> RateFit:
    """Fit a rate to a recorded metric against t (or k for linear_k)."""
    x = traj.steps if kind is RateKind.LINEAR_K else traj.times
    return fit_rate(x, traj.phi(metric), kind, window=window, floor=floor)


def shifted_rate_coefficient(b: float, ell: float) -> float:
    """Essential-rate coefficient of min ||grad f||^2 for the shifted-gradient model.

    18 L sqrt(L) / (7b) for b <= 2/sqrt(L), 9 (bL + sqrt((bL)^2 - 4L))^3 / (28 b) beyond.
    """
    if b <= 0.0:
        raise ValueError(f"b must be positive, got {b}")
    if b <= 2.0 / math.sqrt(ell):
        return 18.0 * ell * math.sqrt(ell) / (7.0 * b)
    bl = b * ell
    return 9.0 * (bl + math.sqrt(bl * bl - 4.0 * ell)) ** 3 / (28.0 * b)


def shifted_b_sweep(ell: float, b_grid: Sequence[float]) -> BSweepResult:
    """Evaluate the shifted-gradient coefficient on a grid and refine its minimiser.

    The refinement is a bounded scalar search between the grid neighbours of
    the grid minimiser.
    """
    grid = np.asarray(sorted(float(b) for b in b_grid))
    if len(grid) == 0 or grid[0] <= 0.0:
        raise ValueError("b_grid must be a nonempty subset of (0, inf)")
    values = np.array([shifted_rate_coefficient(float(b), ell) for b in grid])
    best = int(np.argmin(values))
    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, len(grid) - 1)])
    if hi > lo:
        refined = minimize_scalar(
            lambda b: shifted_rate_coefficient(b, ell),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        b_ref, c_ref = float(refined.x), float(refined.fun)
    else:
        b_ref, c_ref = float(grid[best]), float(values[best])
    candidates = [(b_ref, c_ref), (float(grid[best]), float(values[best]))]
    # the two branches meet at b = 2/sqrt(L), where the bounded search stalls on the cusp
    kink = 2.0 / math.sqrt(ell)
    if lo <= kink <= hi:
        candidates.append((kink, shifted_rate_coefficient(kink, ell)))
    b_ref, c_ref = min(candidates, key=lambda item: item[1])
    logger.info(
        f"b-sweep over {len(grid)} points: grid min b={grid[best]:.6g}, refined b={b_ref:.9g}"
    )
    return BSweepResult(
        ell=ell,
        points=[(float(b), float(v)) for b, v in zip(grid, values, strict=True)],
        b_grid_min=float(grid[best]),
        coefficient_grid_min=float(values[best]),
        b_refined=b_ref,
        coefficient_refined=c_ref,
    )


def predicted_rate(
    model: ModelKind,
    metric: MetricKind,
    objective: ObjectiveSpec,
    shift_b: float | None = None,
) -> tuple[RateKind, float] | None:
    """Essential rate of a 1-essential model, as (kind, exponent); None if not tabulated."""
    mu, ell = objective.mu, objective.ell
    match (model, metric):
        case (ModelKind.GRADIENT_FLOW, MetricKind.GAP):
            if objective.kind is ObjectiveKind.QUARTIC:
                return RateKind.EXPONENTIAL, 4.0 / 3.0
            if mu > 0.0:
                return RateKind.EXPONENTIAL, 2.0 * mu / ell
            return RateKind.POWER, 1.0
        case (ModelKind.AGM_CONVEX, MetricKind.GAP):
            if objective.kind is ObjectiveKind.POWER_HINGE and objective.power_c is not None:
                c = objective.power_c
                return RateKind.POWER, 2.0 * c / (c - 2.0)
            return RateKind.POWER, 2.0
        case (ModelKind.AGM_SHIFTED, MetricKind.MIN_SHIFTED_GRAD_SQ):
            return RateKind.POWER, 3.0
        case (ModelKind.AGM_STRONG, MetricKind.GAP):
            return RateKind.EXPONENTIAL, math.sqrt(mu / ell)
        case (ModelKind.TMM, MetricKind.TMM_DIST):
            return RateKind.EXPONENTIAL, 2.0 * math.sqrt(mu) / max(
                2.0 * math.sqrt(mu), math.sqrt(2.0 * ell)
            )
    return None


def essential_rate_table(
    results: Sequence[tuple[DynamicsSpec, MetricKind, RateFit]],
) -> list[RateRow]:
    """Rows of (model, metric, fitted rate, predicted rate, relative deviation)."""
    rows = []
    for dynamics, metric, fit in results:
        predicted = predicted_rate(dynamics.model, metric, dynamics.objective, dynamics.shift_b)
        row = RateRow(
            model=dynamics.label,
            metric=metric,
            fitted_kind=fit.kind,
            fitted_exponent=fit.exponent,
        )
        if predicted is not None:
            kind, exponent = predicted
            row.predicted_kind = kind
            row.predicted_exponent = exponent
            if kind is fit.kind and exponent != 0.0:
                row.relative_deviation = abs(fit.exponent - exponent) / abs(exponent)
        rows.append(row)
    return rows
