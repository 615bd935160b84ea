"""First-order reformulations of heavy-ball type second-order ODEs.

The second-order ODE x'' + a1(t) x' + a2(t) grad f(x) = 0 has the standard
first-order form u = (x, x'). For an invertible time-dependent A(t) the
change of variables u = A(t) w gives

    w' = (dA^{-1}/dt) A w + A^{-1} M A w - A^{-1} (0, a2 grad f([A w]_1)),

with M = [[0, I], [0, -a1 I]]. When (dA^{-1}/dt) A vanishes as t grows, the
Jacobian spectrum of the w-system approaches that of the u-system.
"""

import logging
import math
from collections.abc import Callable

import numpy as np

from essrate.dynamics.models import dense_eigs
from essrate.dynamics.protocol import MetricKind
from essrate.dynamics.rescaling import Rescaling
from essrate.errors import (
    DimensionMismatchError,
    MetricUnavailableError,
    SingularTimeError,
    SingularTransformError,
)
from essrate.objective.models import ObjectiveSpec
from essrate.types import ComplexVector, Matrix, MatrixFn, ScalarFn, Vector

logger = logging.getLogger(__name__)

DERIVATIVE_REL_STEP = 1e-5
# Reciprocal condition numbers below this count as singular.
RCOND_FLOOR = 1e-14


class ReformulatedDynamics:
    """The w-system of a heavy-ball ODE under the transformation u = A(t) w."""

    def __init__(
        self,
        a1: ScalarFn,
        a2: ScalarFn,
        transform: MatrixFn,
        objective: ObjectiveSpec,
        t_start: float = 1e-3,
        name: str = "reformulated",
    ) -> None:
        self.a1 = a1
        self.a2 = a2
        self.transform = transform
        self.objective = objective
        self._t_start = t_start
        self.name = name

    @property
    def dim(self) -> int:
        return self.objective.dim

    @property
    def state_dim(self) -> int:
        return 2 * self.dim

    @property
    def t_start(self) -> float:
        return self._t_start

    @property
    def label(self) -> str:
        return self.name

    def matrix(self, t: float) -> Matrix:
        """A(t) expanded to the full state; 2x2 transforms act blockwise on each coordinate."""
        a = np.asarray(self.transform(t), dtype=float)
        if a.shape == (2, 2) and self.dim > 1:
            a = np.kron(a, np.eye(self.dim))
        if a.shape != (self.state_dim, self.state_dim):
            raise DimensionMismatchError(
                f"A(t) must be 2x2 or {self.state_dim}x{self.state_dim}, got {a.shape}"
            )
        return a

    def inverse(self, t: float) -> Matrix:
        """A(t)^{-1}.

        Raises:
            SingularTransformError: If A(t) is numerically singular.
        """
        a = self.matrix(t)
        if 1.0 / np.linalg.cond(a) < RCOND_FLOOR:
            raise SingularTransformError(f"A({t}) is singular")
        try:
            return np.linalg.inv(a)
        except np.linalg.LinAlgError as e:
            raise SingularTransformError(f"A({t}) is singular: {e}") from e

    def inverse_derivative(self, t: float) -> Matrix:
        """dA^{-1}/dt by central differences."""
        h = DERIVATIVE_REL_STEP * max(1.0, t)
        return (self.inverse(t + h) - self.inverse(t - h)) / (2.0 * h)

    def _standard_matrix(self, t: float) -> Matrix:
        d = self.dim
        eye = np.eye(d)
        return np.block([[np.zeros((d, d)), eye], [np.zeros((d, d)), -self.a1(t) * eye]])

    def position(self, y: Vector, t: float) -> Vector:
        """x = [A(t) w]_1."""
        w = self._check(y)
        return (self.matrix(t) @ w)[: self.dim]

    def _check(self, y: Vector) -> Vector:
        w = np.asarray(y, dtype=float)
        if w.shape != (self.state_dim,):
            raise DimensionMismatchError(
                f"{self.label} expects a state of length {self.state_dim}, got shape {w.shape}"
            )
        return w

    def vector_field(self, y: Vector, t: float) -> Vector:
        w = self._check(y)
        a = self.matrix(t)
        a_inv = self.inverse(t)
        u = a @ w
        grad = self.objective.grad(u[: self.dim])
        forcing = np.concatenate([np.zeros(self.dim), self.a2(t) * grad])
        return self.inverse_derivative(t) @ u + a_inv @ (self._standard_matrix(t) @ u - forcing)

    def jacobian(self, y: Vector, t: float) -> Matrix:
        w = self._check(y)
        a = self.matrix(t)
        d = self.dim
        hess = self.objective.hessian((a @ w)[:d])
        standard = self._standard_matrix(t)
        standard[d:, :d] -= self.a2(t) * hess
        return self.inverse_derivative(t) @ a + self.inverse(t) @ standard @ a

    def jacobian_eigs(self, y: Vector, t: float) -> ComplexVector:
        return dense_eigs(self.jacobian(y, t))

    def spectral_radius(self, y: Vector, t: float) -> float:
        return float(np.max(np.abs(self.jacobian_eigs(y, t))))

    def metric(
        self, kind: MetricKind, y: Vector, t: float, running_min: float = math.inf
    ) -> float:
        x = self.position(y, t)
        x_star, f_star = self.objective.optimum()
        if kind is MetricKind.GAP:
            return max(self.objective.eval(x) - f_star, 0.0)
        if kind is MetricKind.DIST:
            return float(np.linalg.norm(x - x_star))
        raise MetricUnavailableError(f"{kind.value} is not defined for reformulated dynamics")

    def available_metrics(self) -> list[MetricKind]:
        return [MetricKind.GAP, MetricKind.DIST]

    def initial_state(self, x0: Vector, t: float | None = None) -> Vector:
        """w(t) for u = (x0, 0)."""
        x0 = np.asarray(x0, dtype=float)
        t0 = self.t_start if t is None else t
        return self.inverse(t0) @ np.concatenate([x0, np.zeros(self.dim)])


def reformulate(
    a1: ScalarFn,
    a2: ScalarFn,
    transform: MatrixFn,
    objective: ObjectiveSpec,
    t_start: float = 1e-3,
) -> ReformulatedDynamics:
    """Build the w-system of x'' + a1 x' + a2 grad f(x) = 0 under u = A(t) w."""
    return ReformulatedDynamics(a1, a2, transform, objective, t_start=t_start, name="reformulated")


def standard_form(
    a1: ScalarFn, a2: ScalarFn, objective: ObjectiveSpec, t_start: float = 1e-3
) -> ReformulatedDynamics:
    """The (x, x') system, i.e. the reformulation with A = I."""
    return ReformulatedDynamics(
        a1, a2, lambda t: np.eye(2), objective, t_start=t_start, name="standard"
    )


def agm_convex_coefficients(alpha: Rescaling) -> tuple[ScalarFn, ScalarFn]:
    """(a1, a2) of the second-order form of agm_convex under alpha.

    a1 = 2 alpha'/alpha - alpha''/alpha' and a2 = alpha'^2 / (4 alpha).
    """

    def a1(t: float) -> float:
        s, ds = alpha.value(t), alpha.derivative(t)
        if s <= 0.0 or ds <= 0.0:
            raise SingularTimeError(f"a1 is singular at t={t}")
        return 2.0 * ds / s - alpha.second_derivative(t) / ds

    def a2(t: float) -> float:
        s = alpha.value(t)
        if s <= 0.0:
            raise SingularTimeError(f"a2 is singular at t={t}")
        return alpha.derivative(t) ** 2 / (4.0 * s)

    return a1, a2


def agm_convex_transform(alpha: Rescaling) -> Callable[[float], Matrix]:
    """A(t) = [[1, 0], [-alpha'/alpha, alpha'/alpha]], mapping (x, v) to (x, x')."""

    def transform(t: float) -> Matrix:
        ratio = alpha.derivative(t) / alpha.value(t)
        return np.array([[1.0, 0.0], [-ratio, ratio]])

    return transform
