"""Rescaled optimizer ODEs with closed-form Jacobian spectra.

All momentum models use the first-order (x, v) forms with state y = (x, v).
Writing a = alpha'(t) and s = alpha(t), the rescaled vector fields are

    gradient_flow   x' = -a grad f(x)
    agm_convex      x' = (a/s)(v - x),      v' = -(a/4) grad f(x)
    agm_shifted     x' = (2a/s)(v - x),     v' = -(s a/2) grad f(z),
                    z = (1 - 2b/s) x + (2b/s) v
    agm_strong      x' = a sqrt(mu)(v - x), v' = a sqrt(mu)(x - v) - (a/sqrt(mu)) grad f(x)
    tmm             x' = 2a sqrt(mu)(v - x), v' = a sqrt(mu)(x - v) - (a/sqrt(mu)) grad f(x)
"""

import logging
import math
from enum import StrEnum

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, model_validator

from essrate.dynamics.protocol import Dynamics, MetricKind
from essrate.dynamics.rescaling import Rescaling, RescalingKind
from essrate.errors import (
    DimensionMismatchError,
    EigenSolverError,
    MetricUnavailableError,
    SingularTimeError,
)
from essrate.objective.models import ObjectiveKind, ObjectiveSpec
from essrate.types import ComplexVector, Matrix, Vector

logger = logging.getLogger(__name__)

# Models with alpha(t) in a denominator start integrating here.
SINGULAR_T_START = 1e-3
EQUIVALENCE_TOL = 1e-9


class ModelKind(StrEnum):
    """Optimizer ODE families."""

    GRADIENT_FLOW = "gradient_flow"
    AGM_CONVEX = "agm_convex"
    AGM_SHIFTED = "agm_shifted"
    AGM_STRONG = "agm_strong"
    TMM = "tmm"

    @property
    def has_momentum(self) -> bool:
        return self is not ModelKind.GRADIENT_FLOW


class DynamicsSpec(BaseModel):
    """A named optimizer vector field with an attached time-rescaling."""

    model_config = ConfigDict(frozen=True)

    model: ModelKind = Field(..., description="Optimizer ODE family")
    objective: ObjectiveSpec = Field(..., description="Objective the dynamics minimises")
    rescaling: Rescaling = Field(default_factory=Rescaling.identity, description="Time rescaling")
    shift_b: float | None = Field(
        default=None, gt=0.0, description="Gradient shift b of the shifted-gradient model"
    )

    @model_validator(mode="after")
    def _check_model(self) -> "DynamicsSpec":
        if self.model in (ModelKind.AGM_STRONG, ModelKind.TMM) and self.objective.mu <= 0.0:
            raise ValueError(f"{self.model.value} requires a strongly convex objective (mu > 0)")
        if self.model is ModelKind.AGM_SHIFTED and self.shift_b is None:
            raise ValueError("agm_shifted requires shift_b")
        return self

    @property
    def label(self) -> str:
        shift = f", b={self.shift_b:g}" if self.model is ModelKind.AGM_SHIFTED else ""
        return f"{self.model.value}[{self.rescaling.label}{shift}]"

    @property
    def dim(self) -> int:
        return self.objective.dim

    @property
    def state_dim(self) -> int:
        return 2 * self.dim if self.model.has_momentum else self.dim

    @property
    def t_start(self) -> float:
        if self.model in (ModelKind.AGM_CONVEX, ModelKind.AGM_SHIFTED):
            return SINGULAR_T_START
        return 0.0

    def initial_state(self, x0: Vector) -> Vector:
        """Lift x0 into the model's initial-value set: (x0, x0) for momentum models."""
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (self.dim,):
            raise DimensionMismatchError(f"x0 must have length {self.dim}, got shape {x0.shape}")
        return np.concatenate([x0, x0]) if self.model.has_momentum else x0.copy()

    def split(self, y: Vector) -> tuple[Vector, Vector | None]:
        """Return (x, v); v is None for the gradient flow."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.state_dim,):
            raise DimensionMismatchError(
                f"{self.label} expects a state of length {self.state_dim}, got shape {y.shape}"
            )
        if not self.model.has_momentum:
            return y, None
        return y[: self.dim], y[self.dim :]

    def _time(self, t: float) -> tuple[float, float]:
        s = self.rescaling.value(t)
        a = self.rescaling.derivative(t)
        if self.model in (ModelKind.AGM_CONVEX, ModelKind.AGM_SHIFTED) and s <= 0.0:
            raise SingularTimeError(f"{self.label} is singular at t={t} (alpha(t) = {s})")
        return s, a

    def shifted_point(self, x: Vector, v: Vector, s: float) -> Vector:
        """Gradient evaluation point z of the shifted-gradient model."""
        w = 2.0 * (self.shift_b or 0.0) / s
        return (1.0 - w) * x + w * v

    def vector_field(self, y: Vector, t: float) -> Vector:
        """Return alpha'(t) g(y, alpha(t))."""
        x, v = self.split(y)
        s, a = self._time(t)
        f = self.objective
        if self.model is ModelKind.GRADIENT_FLOW:
            return -a * f.grad(x)
        assert v is not None
        sqrt_mu = math.sqrt(f.mu)
        match self.model:
            case ModelKind.AGM_CONVEX:
                dx = (a / s) * (v - x)
                dv = -(a / 4.0) * f.grad(x)
            case ModelKind.AGM_SHIFTED:
                dx = (2.0 * a / s) * (v - x)
                dv = -(s * a / 2.0) * f.grad(self.shifted_point(x, v, s))
            case ModelKind.AGM_STRONG:
                dx = a * sqrt_mu * (v - x)
                dv = a * sqrt_mu * (x - v) - (a / sqrt_mu) * f.grad(x)
            case _:
                dx = 2.0 * a * sqrt_mu * (v - x)
                dv = a * sqrt_mu * (x - v) - (a / sqrt_mu) * f.grad(x)
        return np.concatenate([dx, dv])

    def _hessian_point(self, y: Vector, t: float) -> Vector:
        x, v = self.split(y)
        if self.model is ModelKind.AGM_SHIFTED:
            assert v is not None
            return self.shifted_point(x, v, self._time(t)[0])
        return x

    def jacobian(self, y: Vector, t: float) -> Matrix:
        """Exact Jacobian of the vector field with respect to y.

        Raises:
            NonSmoothPointError: If the objective has no Hessian at the evaluation point.
        """
        s, a = self._time(t)
        hess = self.objective.hessian(self._hessian_point(y, t))
        if self.model is ModelKind.GRADIENT_FLOW:
            return -a * hess
        eye = np.eye(self.dim)
        zero = np.zeros((self.dim, self.dim))
        c = a * math.sqrt(self.objective.mu)
        match self.model:
            case ModelKind.AGM_CONVEX:
                blocks = [[-(a / s) * eye, (a / s) * eye], [-(a / 4.0) * hess, zero]]
            case ModelKind.AGM_SHIFTED:
                b = self.shift_b or 0.0
                blocks = [
                    [-(2.0 * a / s) * eye, (2.0 * a / s) * eye],
                    [-(a / 2.0) * (s - 2.0 * b) * hess, -a * b * hess],
                ]
            case ModelKind.AGM_STRONG:
                k = a / math.sqrt(self.objective.mu)
                blocks = [[-c * eye, c * eye], [c * eye - k * hess, -c * eye]]
            case _:
                k = a / math.sqrt(self.objective.mu)
                blocks = [[-2.0 * c * eye, 2.0 * c * eye], [c * eye - k * hess, -c * eye]]
        return np.block(blocks)

    def jacobian_eigs(self, y: Vector, t: float) -> ComplexVector:
        """All state_dim Jacobian eigenvalues.

        Every Jacobian block is a polynomial in the Hessian, so the spectrum
        follows from the Hessian eigenvalues whenever those are analytic. Custom
        objectives go through the dense eigensolver.
        """
        if self.objective.kind is ObjectiveKind.CUSTOM:
            return dense_eigs(self.jacobian(y, t))
        s, a = self._time(t)
        lam = self.objective.hessian_eigs(self._hessian_point(y, t)).astype(complex)
        return self.closed_form_eigs(lam, s, a)

    def closed_form_eigs(self, lam: np.ndarray, s: float, a: float) -> ComplexVector:
        """Jacobian eigenvalues for Hessian eigenvalues lam at alpha = s, alpha' = a."""
        lam = np.asarray(lam, dtype=complex)
        if self.model is ModelKind.GRADIENT_FLOW:
            return -a * lam
        mu = self.objective.mu
        match self.model:
            case ModelKind.AGM_CONVEX:
                centre = np.full_like(lam, -a / (2.0 * s))
                spread = (a / (2.0 * s)) * np.sqrt(1.0 - s * lam)
            case ModelKind.AGM_SHIFTED:
                beta = 1.0 / s + (self.shift_b or 0.0) * lam / 2.0
                centre = -a * beta
                spread = a * np.sqrt(beta * beta - lam)
            case ModelKind.AGM_STRONG:
                centre = np.full_like(lam, -a * math.sqrt(mu))
                spread = a * np.sqrt(mu - lam)
            case _:
                centre = np.full_like(lam, -1.5 * a * math.sqrt(mu))
                spread = (a / 2.0) * np.sqrt(9.0 * mu - 8.0 * lam)
        return np.concatenate([centre + spread, centre - spread])

    def spectral_radius(self, y: Vector, t: float) -> float:
        """Largest modulus of the Jacobian eigenvalues."""
        return float(np.max(np.abs(self.jacobian_eigs(y, t))))

    def rescaled(self, alpha: Rescaling) -> "DynamicsSpec":
        """Return the dynamics alpha'(t) g(y, alpha(t))."""
        if alpha.kind is RescalingKind.IDENTITY:
            return self
        return self.model_copy(update={"rescaling": self.rescaling.compose(alpha)})

    def metric(
        self, kind: MetricKind, y: Vector, t: float, running_min: float = math.inf
    ) -> float:
        """Evaluate the convergence metric Phi at (y, t).

        Args:
            kind: Metric to evaluate.
            y: State.
            t: Time.
            running_min: Previous value of the running minimum (MinShiftedGradSq only).

        Raises:
            MetricUnavailableError: If the model lacks the structure the metric needs.
        """
        x, v = self.split(y)
        x_star, f_star = self.objective.optimum()
        match kind:
            case MetricKind.GAP:
                return max(self.objective.eval(x) - f_star, 0.0)
            case MetricKind.DIST:
                return float(np.linalg.norm(x - x_star))
            case MetricKind.MIN_SHIFTED_GRAD_SQ:
                if self.model is not ModelKind.AGM_SHIFTED:
                    raise MetricUnavailableError("minsgrad is defined for agm_shifted only")
                a = self.rescaling.derivative(t)
                if a <= 0.0:
                    raise SingularTimeError(f"alpha'({t}) = {a}; shifted gradient undefined")
                dx = self.vector_field(y, t)[: self.dim]
                g = self.objective.grad(x + ((self.shift_b or 0.0) / a) * dx)
                return min(running_min, float(g @ g))
            case MetricKind.TMM_DIST:
                if self.model is not ModelKind.TMM:
                    raise MetricUnavailableError("tmmdist is defined for tmm only")
                a = self.rescaling.derivative(t)
                if a <= 0.0:
                    raise SingularTimeError(f"alpha'({t}) = {a}; tmmdist undefined")
                dx = self.vector_field(y, t)[: self.dim]
                r = x + dx / (2.0 * a * math.sqrt(self.objective.mu)) - x_star
                return float(r @ r)
        raise MetricUnavailableError(f"unknown metric {kind}")

    def available_metrics(self) -> list[MetricKind]:
        """Metrics this model can record."""
        metrics = [MetricKind.GAP, MetricKind.DIST]
        if self.model is ModelKind.AGM_SHIFTED:
            metrics.append(MetricKind.MIN_SHIFTED_GRAD_SQ)
        if self.model is ModelKind.TMM:
            metrics.append(MetricKind.TMM_DIST)
        return metrics


def dense_eigs(matrix: Matrix) -> ComplexVector:
    """Eigenvalues of a dense real matrix.

    Raises:
        EigenSolverError: If LAPACK fails to converge.
    """
    try:
        return scipy.linalg.eigvals(matrix).astype(complex)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenSolverError(f"eigensolver failed: {e}") from e


def finite_difference_jacobian(dynamics: Dynamics, y: Vector, t: float) -> Matrix:
    """Central-difference Jacobian of the vector field, used at nonsmooth points."""
    y = np.asarray(y, dtype=float)
    h = max(1e-6, 1e-6 * float(np.max(np.abs(y), initial=0.0)))
    n = len(y)
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        jac[:, j] = (dynamics.vector_field(y + e, t) - dynamics.vector_field(y - e, t)) / (2.0 * h)
    return jac


def verify_equivalence(
    g1: Dynamics,
    g2: Dynamics,
    alpha: Rescaling,
    samples: list[tuple[Vector, float]],
) -> bool:
    """Check g1(y, t) = alpha'(t) g2(y, alpha(t)) on every sample.

    Returns False when the state dimensions differ or g2 is singular at a
    mapped sample.
    """
    if g1.state_dim != g2.state_dim:
        return False
    for y, t in samples:
        try:
            lhs = g1.vector_field(y, t)
            rhs = g2.vector_field(y, alpha.value(t))
        except (SingularTimeError, DimensionMismatchError) as e:
            logger.debug(f"Equivalence sample at t={t} rejected: {e}")
            return False
        scaled = alpha.derivative(t) * rhs
        if np.linalg.norm(lhs - scaled) > EQUIVALENCE_TOL * (1.0 + np.linalg.norm(scaled)):
            return False
    return True


def one_essential_rescaling(
    model: ModelKind, objective: ObjectiveSpec, shift_b: float | None = None
) -> Rescaling:
    """Rescaling under which the model's worst-case spectral radius tends to 1."""
    ell, mu = objective.ell, objective.mu
    match model:
        case ModelKind.GRADIENT_FLOW:
            if objective.kind is ObjectiveKind.QUARTIC:
                return Rescaling.exp23()
            return Rescaling.linear(1.0 / ell)
        case ModelKind.AGM_CONVEX:
            return Rescaling.power_law(2.0, 1.0 / ell)
        case ModelKind.AGM_SHIFTED:
            if shift_b is None:
                raise ValueError("agm_shifted needs shift_b")
            return Rescaling.linear(1.0 / shifted_limit_radius(shift_b, ell, 1.0))
        case ModelKind.AGM_STRONG:
            return Rescaling.linear(1.0 / math.sqrt(ell))
        case ModelKind.TMM:
            return Rescaling.linear(1.0 / max(2.0 * math.sqrt(mu), math.sqrt(2.0 * ell)))
    raise ValueError(f"unknown model {model}")


def shifted_limit_radius(b: float, ell: float, a: float) -> float:
    """Limiting spectral radius of the shifted-gradient model with alpha' -> a.

    a sqrt(L) for b <= 2/sqrt(L), otherwise (a/2)(bL + sqrt((bL)^2 - 4L)).
    """
    if b <= 2.0 / math.sqrt(ell):
        return a * math.sqrt(ell)
    bl = b * ell
    return 0.5 * a * (bl + math.sqrt(bl * bl - 4.0 * ell))


def gradient_flow_solution(
    objective: ObjectiveSpec, x0: Vector, alpha: Rescaling, t: float
) -> Vector:
    """Exact solution of x' = -alpha'(t) grad f(x) for quadratics and the quartic."""
    x0 = np.asarray(x0, dtype=float)
    s = alpha.value(t)
    if objective.kind is ObjectiveKind.QUADRATIC:
        return x0 * np.exp(-np.asarray(objective.quadratic_eigs) * s)
    if objective.kind is ObjectiveKind.QUARTIC:
        return x0 / np.sqrt(2.0 * s * x0 * x0 + 1.0)
    raise ValueError(f"no closed-form gradient flow for {objective.kind.value}")
