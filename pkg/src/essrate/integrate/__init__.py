"""Stability-constrained explicit integration of optimizer dynamics."""

from essrate.integrate.models import (
    PolicyKind,
    StepPolicy,
    StepRecord,
    StopRule,
    Trajectory,
    TrajectoryMeta,
)
from essrate.integrate.runner import run, run_armijo, stability_audit
from essrate.integrate.stepper import (
    eigs_with_fallback,
    max_stable_step,
    right_endpoint_step,
    rk_step,
    stable_step_from_eigs,
)

__all__ = [
    "PolicyKind",
    "StepPolicy",
    "StepRecord",
    "StopRule",
    "Trajectory",
    "TrajectoryMeta",
    "eigs_with_fallback",
    "max_stable_step",
    "right_endpoint_step",
    "rk_step",
    "run",
    "run_armijo",
    "stability_audit",
    "stable_step_from_eigs",
]
