"""Factories for the built-in objective families and seeded test families."""

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np

from essrate.objective.models import ObjectiveKind, ObjectiveSpec
from essrate.types import Vector

logger = logging.getLogger(__name__)


def quadratic(
    eigs: Sequence[float],
    mu: float | None = None,
    ell: float | None = None,
    radius_R: float = 1.0,
    name: str = "",
) -> ObjectiveSpec:
    """Build f(x) = 1/2 sum_i lambda_i x_i^2.

    Args:
        eigs: Hessian spectrum, in any order.
        mu: Strong-convexity modulus; defaults to min(eigs).
        ell: Smoothness constant; defaults to max(eigs).
        radius_R: Radius of the initial-value set.
        name: Optional identifier.
    """
    values = [float(lam) for lam in eigs]
    return ObjectiveSpec(
        kind=ObjectiveKind.QUADRATIC,
        dim=len(values),
        quadratic_eigs=tuple(values),
        mu=min(values) if mu is None else mu,
        ell=max(values) if ell is None else ell,
        radius_R=radius_R,
        name=name,
    )


def quartic(dim: int = 1, radius_R: float = 1.0) -> ObjectiveSpec:
    """Build f(x) = sum_i x_i^4 / 4, which is convex but not strongly convex."""
    # L-smooth only on bounded sets; ell bounds 3 x^2 on the unit ball.
    return ObjectiveSpec(
        kind=ObjectiveKind.QUARTIC, dim=dim, mu=0.0, ell=3.0 * radius_R**2, radius_R=radius_R
    )


def power_hinge(c: float, ell: float = 1.0, radius_R: float = 1.0) -> ObjectiveSpec:
    """Build the one-dimensional |x|^c family with a linear tail beyond |x| = 1."""
    return ObjectiveSpec(
        kind=ObjectiveKind.POWER_HINGE,
        dim=1,
        power_c=c,
        mu=0.0,
        ell=ell,
        radius_R=radius_R,
    )


def custom(
    fn: Callable[[Vector], float],
    dim: int,
    grad: Callable[[Vector], Vector] | None = None,
    optimum: tuple[Sequence[float], float] | None = None,
    mu: float = 0.0,
    ell: float = 1.0,
    radius_R: float = 1.0,
    name: str = "",
) -> ObjectiveSpec:
    """Wrap a user-supplied objective; derivatives it lacks come from finite differences."""
    stored = None
    if optimum is not None:
        stored = (tuple(float(v) for v in optimum[0]), float(optimum[1]))
    return ObjectiveSpec(
        kind=ObjectiveKind.CUSTOM,
        dim=dim,
        mu=mu,
        ell=ell,
        radius_R=radius_R,
        name=name,
        custom_fn=fn,
        custom_grad=grad,
        custom_optimum=stored,
    )


def witness_quadratic(dim: int, ell: float, mu: float = 0.0) -> ObjectiveSpec:
    """(L/2)||x||^2, the objective that attains the worst-case spectral radius."""
    return quadratic([ell] * dim, mu=mu, ell=ell, name=f"witness(d={dim}, L={ell:g})")


def tmm_witness(dim: int, mu: float, ell: float) -> ObjectiveSpec:
    """Worst case for the triple-momentum dynamics.

    With sqrt(2L) >= 2 sqrt(mu) the complex pair at lambda = L is the largest;
    otherwise the real branch at lambda = mu dominates.
    """
    lam = ell if math.sqrt(2.0 * ell) >= 2.0 * math.sqrt(mu) else mu
    return quadratic([lam] * dim, mu=mu, ell=ell, name=f"tmm_witness(d={dim}, lambda={lam:g})")


def random_quadratics(
    count: int, dim: int, mu: float, ell: float, seed: int = 0
) -> list[ObjectiveSpec]:
    """Draw quadratics with eigenvalues uniform in [mu, L].

    The family is a deterministic function of ``seed``.
    """
    rng = np.random.default_rng(seed)
    family = []
    for index in range(count):
        eigs = rng.uniform(mu, ell, size=dim)
        family.append(quadratic(eigs, mu=mu, ell=ell, name=f"quadratic[{seed}:{index}]"))
    logger.debug(f"Generated {count} quadratics in S({mu}, {ell}) with seed {seed}")
    return family
