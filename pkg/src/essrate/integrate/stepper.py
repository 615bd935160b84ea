"""Explicit Runge-Kutta steps and stability-constrained step sizes."""

import logging

import numpy as np

from essrate.dynamics.models import dense_eigs, finite_difference_jacobian
from essrate.dynamics.protocol import Dynamics
from essrate.errors import (
    ConfigError,
    NonFiniteStageError,
    NonSmoothPointError,
    StabilityImpossibleError,
)
from essrate.integrate.models import PolicyKind, StepPolicy
from essrate.stability.domain import directional_radius, in_domain
from essrate.stability.models import RkMethod
from essrate.types import ComplexVector, Vector

logger = logging.getLogger(__name__)


def rk_step(method: RkMethod, dynamics: Dynamics, y: Vector, t: float, h: float) -> Vector:
    """Advance y by one explicit Runge-Kutta step of size h.

    Raises:
        NonFiniteStageError: If a stage derivative is not finite.
    """
    y = np.asarray(y, dtype=float)
    if h == 0.0:
        return y.copy()
    if not method.has_tableau:
        raise ConfigError(f"method {method.name!r} has no Butcher tableau to step with")
    a, b, c = method.butcher_a, method.butcher_b, method.butcher_c
    stages: list[Vector] = []
    for i in range(len(b)):
        arg = y.copy()
        for j in range(i):
            if a[i][j] != 0.0:
                arg += h * a[i][j] * stages[j]
        k = dynamics.vector_field(arg, t + c[i] * h)
        if not np.all(np.isfinite(k)):
            raise NonFiniteStageError(f"stage {i} of {method.name} is not finite at t={t}, h={h}")
        stages.append(k)
    out = y.copy()
    for bi, k in zip(b, stages, strict=True):
        if bi != 0.0:
            out += h * bi * k
    return out


def eigs_with_fallback(dynamics: Dynamics, y: Vector, t: float) -> tuple[ComplexVector, bool]:
    """Jacobian eigenvalues at (y, t) and whether the finite-difference fallback was used."""
    try:
        return dynamics.jacobian_eigs(y, t), False
    except NonSmoothPointError as e:
        logger.warning(f"{dynamics.label}: {e}; using a finite-difference Jacobian at t={t}")
        return dense_eigs(finite_difference_jacobian(dynamics, y, t)), True


def stable_step_from_eigs(method: RkMethod, eigs: ComplexVector, policy: StepPolicy) -> float:
    """Largest admissible step keeping h*lambda in S for every eigenvalue.

    Raises:
        StabilityImpossibleError: If even h_floor leaves the stability domain.
    """
    limit = np.inf
    for lam in np.unique(np.asarray(eigs, dtype=complex)):
        modulus = abs(lam)
        if modulus == 0.0:
            continue
        # S is symmetric about the real axis
        radius = directional_radius(method, abs(float(np.angle(lam))))
        limit = min(limit, radius / modulus)
    if not np.isfinite(limit):
        return policy.h_cap
    h = policy.safety * limit
    if h < policy.h_floor:
        unstable = [lam for lam in eigs if not in_domain(method, policy.h_floor * complex(lam))]
        if unstable:
            raise StabilityImpossibleError(
                f"h_floor={policy.h_floor} is unstable for eigenvalue {unstable[0]:.6g} "
                f"with {method.name}"
            )
        return policy.h_floor
    return min(h, policy.h_cap)


def _admissible_at(
    method: RkMethod, dynamics: Dynamics, y: Vector, t: float, h: float, policy: StepPolicy
) -> bool:
    eigs, _ = eigs_with_fallback(dynamics, y, t + h)
    if not np.all(np.isfinite(eigs)):
        return False
    try:
        return h <= stable_step_from_eigs(method, eigs, policy)
    except StabilityImpossibleError:
        return False


def right_endpoint_step(
    method: RkMethod, dynamics: Dynamics, y: Vector, t: float, policy: StepPolicy
) -> float:
    """Step for a spectrum that vanishes at (y, t) but not after it.

    A clock with alpha'(t0) = 0 zeroes the left-endpoint spectrum, so the step is
    chosen against the spectrum at (y, t + h) instead: h_cap when that is
    admissible, otherwise the largest h_floor * 2^j admissible there.
    """
    if _admissible_at(method, dynamics, y, t, policy.h_cap, policy):
        return policy.h_cap
    h = policy.h_floor
    while 2.0 * h < policy.h_cap and _admissible_at(method, dynamics, y, t, 2.0 * h, policy):
        h *= 2.0
    logger.debug(f"{dynamics.label}: zero spectrum at t={t}, right-endpoint step h={h:.6g}")
    return h


def max_stable_step(
    method: RkMethod, dynamics: Dynamics, y: Vector, t: float, policy: StepPolicy
) -> float:
    """clamp(safety * min_lambda directional_radius(arg lambda)/|lambda|, h_floor, h_cap).

    Eigenvalues are taken at the left endpoint (y, t). When every eigenvalue
    is zero the step is h_cap.
    """
    if policy.kind is not PolicyKind.STABILITY_CAPPED:
        raise ConfigError(f"max_stable_step needs a stability_capped policy, got {policy.kind}")
    eigs, _ = eigs_with_fallback(dynamics, y, t)
    return stable_step_from_eigs(method, eigs, policy)
