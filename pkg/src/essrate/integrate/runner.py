"""Trajectory integration loops."""

import logging
import math

import numpy as np

from essrate.config import get_settings
from essrate.dynamics.models import DynamicsSpec, ModelKind
from essrate.dynamics.protocol import Dynamics, MetricKind
from essrate.dynamics.rescaling import RescalingKind
from essrate.errors import (
    ConfigError,
    DivergedError,
    NoDescentError,
    NonFiniteStageError,
    StepOverflowError,
)
from essrate.integrate.models import (
    PolicyKind,
    StepPolicy,
    StepRecord,
    StopRule,
    Trajectory,
    TrajectoryMeta,
)
from essrate.integrate.stepper import (
    eigs_with_fallback,
    right_endpoint_step,
    rk_step,
    stable_step_from_eigs,
)
from essrate.stability.domain import in_domain
from essrate.stability.models import RkMethod
from essrate.types import Vector

logger = logging.getLogger(__name__)

MAX_BACKTRACKS = 200


def _meta(
    dynamics: Dynamics,
    method_name: str,
    policy: StepPolicy,
    stop: StopRule,
    metrics: list[MetricKind],
) -> TrajectoryMeta:
    model = rescaling = None
    if isinstance(dynamics, DynamicsSpec):
        model = dynamics.model.value
        rescaling = dynamics.rescaling.label
    return TrajectoryMeta(
        dynamics=dynamics.label,
        model=model,
        rescaling=rescaling,
        objective=dynamics.objective.label,
        method=method_name,
        policy=policy,
        stop=stop,
        metrics=metrics,
    )


def _metrics(
    dynamics: Dynamics,
    kinds: list[MetricKind],
    y: Vector,
    t: float,
    previous: dict[MetricKind, float] | None,
) -> dict[MetricKind, float]:
    out = {}
    for kind in kinds:
        running = previous.get(kind, math.inf) if previous else math.inf
        out[kind] = dynamics.metric(kind, y, t, running)
    return out


def _stop_reason(stop: StopRule, record: StepRecord) -> str | None:
    if stop.max_steps is not None and record.k >= stop.max_steps:
        return "max_steps"
    if stop.t_max is not None and record.t >= stop.t_max:
        return "t_max"
    if stop.phi_target is not None:
        value = record.phi.get(stop.phi_metric)
        if value is not None and value <= stop.phi_target:
            return "phi_target"
    return None


def _default_metrics(dynamics: Dynamics) -> list[MetricKind]:
    available = getattr(dynamics, "available_metrics", None)
    return list(available()) if available else [MetricKind.GAP, MetricKind.DIST]


def run(
    method: RkMethod,
    dynamics: Dynamics,
    y0: Vector,
    policy: StepPolicy,
    stop: StopRule,
    t_start: float | None = None,
    metrics: list[MetricKind] | None = None,
) -> Trajectory:
    """Integrate the dynamics from (y0, t_start) under a step policy.

    Step k uses the Jacobian spectrum at the left endpoint (y_{k-1}, t_{k-1}).
    When that spectrum is all zero the capped step is sized against the
    spectrum at the right endpoint instead.
    Record 0 holds the initial state with h = 0.

    Raises:
        DivergedError: If the state becomes non-finite.
        StabilityImpossibleError: If no admissible step is stable.
        StepOverflowError: If the run exceeds the configured step budget.
    """
    if policy.kind is PolicyKind.ARMIJO:
        raise ConfigError("armijo policies run through run_armijo")
    kinds = metrics if metrics is not None else _default_metrics(dynamics)
    budget = get_settings().max_steps
    t = dynamics.t_start if t_start is None else t_start
    y = np.asarray(y0, dtype=float).copy()

    traj = Trajectory(_meta(dynamics, method.name, policy, stop, kinds))
    eigs, flagged = eigs_with_fallback(dynamics, y, t)
    record = StepRecord(
        k=0,
        t=t,
        h=0.0,
        y=y,
        rho=float(np.max(np.abs(eigs))),
        phi=_metrics(dynamics, kinds, y, t, None),
        eigs=eigs,
        flagged=flagged,
    )
    traj.append(record)
    logger.info(f"Running {dynamics.label} with {method.name} ({policy.kind.value}) from t={t}")

    reason = _stop_reason(stop, record)
    while reason is None:
        if record.k >= budget:
            raise StepOverflowError(f"{dynamics.label} exceeded {budget} steps at t={t}")
        if policy.kind is PolicyKind.FIXED:
            assert policy.h is not None
            h = policy.h
        elif np.any(eigs):
            h = stable_step_from_eigs(method, eigs, policy)
        else:
            h = right_endpoint_step(method, dynamics, y, t, policy)
        try:
            y = rk_step(method, dynamics, y, t, h)
        except NonFiniteStageError as e:
            raise DivergedError(f"{dynamics.label} diverged at step {record.k + 1}: {e}") from e
        if not np.all(np.isfinite(y)):
            raise DivergedError(f"{dynamics.label} diverged at step {record.k + 1}, t={t}")
        t = t + h
        eigs, flagged = eigs_with_fallback(dynamics, y, t)
        record = StepRecord(
            k=record.k + 1,
            t=t,
            h=h,
            y=y,
            rho=float(np.max(np.abs(eigs))),
            phi=_metrics(dynamics, kinds, y, t, record.phi),
            eigs=eigs,
            flagged=flagged,
        )
        traj.append(record)
        logger.debug(f"k={record.k} t={t:.6g} h={h:.6g} rho={record.rho:.6g}")
        reason = _stop_reason(stop, record)

    traj.meta.stop_reason = reason
    logger.info(f"Finished {dynamics.label}: {record.k} steps, t={t:.6g} ({reason})")
    return traj


def run_armijo(
    dynamics: DynamicsSpec,
    y0: Vector,
    policy: StepPolicy,
    stop: StopRule,
    metrics: list[MetricKind] | None = None,
) -> Trajectory:
    """Gradient descent with Armijo backtracking from a growing trial step.

    The trial step is min(grow * h_prev, h_cap); it is multiplied by shrink until
    f(y - h grad f(y)) <= f(y) - slope_c h ||grad f(y)||^2.

    Raises:
        ConfigError: If the dynamics is not an unrescaled gradient flow.
        NoDescentError: If backtracking needs more than 200 reductions.
    """
    if (
        not isinstance(dynamics, DynamicsSpec)
        or dynamics.model is not ModelKind.GRADIENT_FLOW
        or dynamics.rescaling.kind is not RescalingKind.IDENTITY
    ):
        raise ConfigError("run_armijo needs an unrescaled gradient flow")
    if policy.kind is not PolicyKind.ARMIJO:
        raise ConfigError(f"run_armijo needs an armijo policy, got {policy.kind.value}")
    f = dynamics.objective
    kinds = metrics if metrics is not None else _default_metrics(dynamics)
    budget = get_settings().max_steps
    t = dynamics.t_start
    y = np.asarray(y0, dtype=float).copy()

    traj = Trajectory(_meta(dynamics, "armijo", policy, stop, kinds))
    eigs, flagged = eigs_with_fallback(dynamics, y, t)
    record = StepRecord(
        k=0,
        t=t,
        h=0.0,
        y=y,
        rho=float(np.max(np.abs(eigs))),
        phi=_metrics(dynamics, kinds, y, t, None),
        eigs=eigs,
        flagged=flagged,
    )
    traj.append(record)
    logger.info(f"Running Armijo descent on {f.label}")

    h_prev = policy.h_init / policy.grow
    reason = _stop_reason(stop, record)
    while reason is None:
        if record.k >= budget:
            raise StepOverflowError(f"Armijo descent exceeded {budget} steps")
        g = f.grad(y)
        g_sq = float(g @ g)
        f_y = f.eval(y)
        h = min(policy.grow * h_prev, policy.h_cap)
        backtracks = 0
        while f.eval(y - h * g) > f_y - policy.slope_c * h * g_sq:
            h *= policy.shrink
            backtracks += 1
            if backtracks > MAX_BACKTRACKS:
                raise NoDescentError(
                    f"no Armijo step after {MAX_BACKTRACKS} reductions at k={record.k}"
                )
        y = y - h * g
        if not np.all(np.isfinite(y)):
            raise DivergedError(f"Armijo descent diverged at step {record.k + 1}")
        t = t + h
        h_prev = h
        eigs, flagged = eigs_with_fallback(dynamics, y, t)
        record = StepRecord(
            k=record.k + 1,
            t=t,
            h=h,
            y=y,
            rho=float(np.max(np.abs(eigs))),
            phi=_metrics(dynamics, kinds, y, t, record.phi),
            eigs=eigs,
            flagged=flagged,
        )
        traj.append(record)
        logger.debug(f"k={record.k} h={h:.6g} backtracks={backtracks}")
        reason = _stop_reason(stop, record)

    traj.meta.stop_reason = reason
    logger.info(f"Armijo descent finished after {record.k} steps ({reason})")
    return traj


def stability_audit(traj: Trajectory, method: RkMethod) -> list[int]:
    """Indices k whose step h_k put some h_k * lambda(y_{k-1}, t_{k-1}) outside S."""
    violations = []
    for previous, record in zip(traj.records, traj.records[1:], strict=False):
        if previous.eigs is None:
            continue
        if any(not in_domain(method, record.h * complex(lam)) for lam in previous.eigs):
            violations.append(record.k)
    return violations
