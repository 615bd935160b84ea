"""Essential-rate verification and step-accumulation checks."""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from essrate.analysis.models import EssentialVerdict, TheoremCheck
from essrate.config import get_settings
from essrate.dynamics.models import DynamicsSpec
from essrate.dynamics.rescaling import TimeMap
from essrate.errors import EssrateError, TrajectoryTooShortError
from essrate.integrate.models import StepPolicy, StopRule, Trajectory
from essrate.integrate.runner import run
from essrate.objective.models import ObjectiveSpec
from essrate.stability.models import RkMethod
from essrate.types import Vector

logger = logging.getLogger(__name__)

MIN_TAIL_RECORDS = 10
# Slope ratios alpha'(4H)/alpha'(H) beyond these bounds are read as divergence or decay.
SLOPE_GROWTH = 1.5


def tail_spectral_radius(traj: Trajectory, tail_frac: float | None = None) -> float:
    """Max of rho_k over the final tail_frac of the records.

    Raises:
        TrajectoryTooShortError: If the tail holds fewer than 10 records.
    """
    frac = get_settings().tail_frac if tail_frac is None else tail_frac
    if not 0.0 < frac <= 1.0:
        raise ValueError(f"tail_frac must be in (0, 1], got {frac}")
    count = math.ceil(frac * len(traj))
    if count < MIN_TAIL_RECORDS:
        raise TrajectoryTooShortError(
            f"tail of {count} records is shorter than {MIN_TAIL_RECORDS} ({len(traj)} records)"
        )
    return float(np.max(traj.rhos[-count:]))


def _tail_radius_job(
    args: tuple[RkMethod, DynamicsSpec, Vector, StepPolicy, float, float],
) -> tuple[float | None, str]:
    method, dynamics, y0, policy, horizon, tail_frac = args
    try:
        traj = run(method, dynamics, y0, policy, StopRule(t_max=horizon))
        return tail_spectral_radius(traj, tail_frac), ""
    except EssrateError as e:
        return None, f"{dynamics.objective.label}: {type(e).__name__}: {e}"


def essential_check(
    template: DynamicsSpec,
    family: Sequence[ObjectiveSpec],
    y0s: Sequence[Vector],
    method: RkMethod,
    tol: float | None = None,
    horizon: float = 200.0,
    policy: StepPolicy | None = None,
    tail_frac: float | None = None,
    threads: int | None = None,
) -> EssentialVerdict:
    """Estimate c = sup over (f, x0) of the tail spectral radius and judge 1-essentiality.

    Each objective replaces the template's objective; ``y0s`` holds initial
    positions x0 (one per objective, or a single shared one) that are lifted to
    the model's initial-value set. Runs fan out over worker processes and are
    reduced in index order. Integration failures are recorded in the verdict.

    Raises:
        ValueError: If the family is empty or y0s does not match it.
    """
    if not family:
        raise ValueError("essential_check needs a nonempty family")
    if len(y0s) not in (1, len(family)):
        raise ValueError(f"expected 1 or {len(family)} initial points, got {len(y0s)}")
    settings = get_settings()
    tol = settings.essential_tol if tol is None else tol
    tail = settings.tail_frac if tail_frac is None else tail_frac
    policy = policy or StepPolicy.stability_capped()
    workers = threads or settings.resolved_threads()

    jobs = []
    for index, objective in enumerate(family):
        dynamics = template.model_copy(update={"objective": objective})
        x0 = y0s[0] if len(y0s) == 1 else y0s[index]
        jobs.append((method, dynamics, dynamics.initial_state(x0), policy, horizon, tail))

    logger.info(
        f"Essential check of {template.label} over {len(jobs)} objectives "
        f"(horizon {horizon:g}, {workers} workers)"
    )
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_tail_radius_job, jobs))
    else:
        results = [_tail_radius_job(job) for job in jobs]

    radii = [radius for radius, _ in results]
    failures = [message for _, message in results if message]
    for message in failures:
        logger.warning(f"Essential check run failed: {message}")

    finite = [(r, i) for i, r in enumerate(radii) if r is not None]
    if not finite:
        c_estimate, witness = math.nan, ""
    else:
        c_estimate, best = max(finite, key=lambda item: (item[0], -item[1]))
        witness = family[best].label
    verdict = EssentialVerdict(
        c_estimate=c_estimate,
        lb_witness=witness,
        ub_ok=bool(c_estimate <= 1.0 + tol),
        lb_ok=bool(c_estimate >= 1.0 - tol),
        tol=tol,
        horizon=horizon,
        radii=radii,
        failures=failures,
    )
    logger.info(
        f"Essential check of {template.label}: c={c_estimate:.6g}, "
        f"1-essential={verdict.is_one_essential}"
    )
    return verdict


def theorem_bound_check(
    traj: Trajectory,
    alpha: TimeMap,
    r: float,
    eps: float,
    k_min: int = 1,
) -> TheoremCheck:
    """Fraction of k >= k_min with alpha(t_k) <= (r + eps) k, and max alpha(t_k)/k."""
    ratios = []
    satisfied = 0
    for record in traj.records:
        if record.k < max(k_min, 1):
            continue
        value = alpha.value(record.t)
        ratios.append(value / record.k)
        if value <= (r + eps) * record.k:
            satisfied += 1
    count = len(ratios)
    return TheoremCheck(
        fraction_satisfied=satisfied / count if count else 1.0,
        worst_ratio=max(ratios) if ratios else 0.0,
        final_ratio=ratios[-1] if ratios else 0.0,
        r=r,
        eps=eps,
        k_min=k_min,
        count=count,
    )


def rescaling_slope_limit(alpha: TimeMap, horizon: float) -> float:
    """Estimate lim alpha'(t) from samples at horizon, 2*horizon and 4*horizon.

    Returns +inf when the slope keeps growing and 0 when it keeps decaying.
    """
    d1 = alpha.derivative(horizon)
    d2 = alpha.derivative(2.0 * horizon)
    d4 = alpha.derivative(4.0 * horizon)
    if d1 > 0.0 and d2 / d1 > SLOPE_GROWTH and d4 / d2 > SLOPE_GROWTH:
        return math.inf
    if d1 > 0.0 and d2 / d1 < 1.0 / SLOPE_GROWTH and d4 / d2 < 1.0 / SLOPE_GROWTH:
        return 0.0
    return d1
