"""Data models for objective functions.

An :class:`ObjectiveSpec` is immutable after construction; every evaluation is
a pure function of its fields and the query point.
"""

import logging
from collections.abc import Callable
from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from essrate.errors import DimensionMismatchError, MissingOptimumError, NonSmoothPointError
from essrate.types import Matrix, Vector

logger = logging.getLogger(__name__)

# Central differences need a relative step with an absolute floor.
FD_REL_STEP = 1e-6
# Hessians from function values alone use a coarser step (second difference).
FD_VALUE_STEP = 1e-4


class ObjectiveKind(StrEnum):
    """Objective families."""

    QUADRATIC = "quadratic"
    QUARTIC = "quartic"
    POWER_HINGE = "power_hinge"
    CUSTOM = "custom"


class ObjectiveSpec(BaseModel):
    """An objective function with exact derivatives and a known optimum.

    Quadratics are stored by their Hessian spectrum,
    f(x) = 1/2 * sum_i lambda_i x_i^2. The quartic family is
    f(x) = sum_i x_i^4 / 4. The power-hinge family (d = 1) is
    K |x|^c for |x| <= 1 and K (c(|x| - 1) + 1) otherwise, with
    K = L (c - 3) / (c (c - 2)^2).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: ObjectiveKind = Field(..., description="Objective family")
    dim: int = Field(default=1, gt=0, description="Dimension d of the decision variable")
    quadratic_eigs: tuple[float, ...] = Field(
        default=(),
        description="Hessian diagonal of a quadratic, one entry per coordinate",
    )
    mu: float = Field(default=0.0, ge=0.0, description="Strong-convexity modulus")
    ell: float = Field(default=1.0, gt=0.0, description="Smoothness constant L")
    power_c: float | None = Field(
        default=None,
        description="Exponent c (> 3) of the power-hinge family",
    )
    radius_R: float = Field(default=1.0, gt=0.0, description="Radius of the initial-value set")
    name: str = Field(default="", description="Human readable identifier")

    custom_fn: Callable[[Vector], float] | None = Field(default=None, exclude=True)
    custom_grad: Callable[[Vector], Vector] | None = Field(default=None, exclude=True)
    custom_optimum: tuple[tuple[float, ...], float] | None = Field(default=None, exclude=True)

    @field_validator("quadratic_eigs")
    @classmethod
    def _check_nonnegative(cls, eigs: tuple[float, ...]) -> tuple[float, ...]:
        if any(lam < 0 for lam in eigs):
            raise ValueError("quadratic eigenvalues must be nonnegative")
        return eigs

    @model_validator(mode="after")
    def _check_family(self) -> "ObjectiveSpec":
        if self.mu > self.ell:
            raise ValueError(f"mu={self.mu} exceeds ell={self.ell}")
        if self.kind is ObjectiveKind.QUADRATIC:
            if len(self.quadratic_eigs) != self.dim:
                raise ValueError(
                    f"quadratic needs {self.dim} eigenvalues, got {len(self.quadratic_eigs)}"
                )
            if min(self.quadratic_eigs) < self.mu - 1e-12:
                raise ValueError("smallest eigenvalue is below mu")
            if max(self.quadratic_eigs) > self.ell + 1e-12:
                raise ValueError("largest eigenvalue is above ell")
        elif self.kind is ObjectiveKind.POWER_HINGE:
            if self.dim != 1:
                raise ValueError("the power-hinge family is one-dimensional")
            if self.power_c is None or self.power_c <= 3:
                raise ValueError("power_c must be greater than 3")
            if self.mu != 0.0:
                raise ValueError("the power-hinge family is not strongly convex")
        elif self.kind is ObjectiveKind.CUSTOM and self.custom_fn is None:
            raise ValueError("custom objectives need custom_fn")
        return self

    @property
    def label(self) -> str:
        """Short identifier used in logs and reports."""
        if self.name:
            return self.name
        if self.kind is ObjectiveKind.QUADRATIC:
            return f"quadratic(d={self.dim}, max={max(self.quadratic_eigs):g})"
        if self.kind is ObjectiveKind.POWER_HINGE:
            return f"power_hinge(c={self.power_c:g}, L={self.ell:g})"
        return f"{self.kind.value}(d={self.dim})"

    @property
    def hinge_coefficient(self) -> float:
        """K = L (c - 3) / (c (c - 2)^2) of the power-hinge family."""
        c = float(self.power_c or 0.0)
        return self.ell * (c - 3.0) / (c * (c - 2.0) ** 2)

    def _check(self, x: Vector) -> Vector:
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.dim,):
            raise DimensionMismatchError(
                f"{self.label} expects a vector of length {self.dim}, got shape {arr.shape}"
            )
        return arr

    def eval(self, x: Vector) -> float:
        """Return f(x)."""
        x = self._check(x)
        if self.kind is ObjectiveKind.QUADRATIC:
            return 0.5 * float(np.dot(self.quadratic_eigs, x * x))
        if self.kind is ObjectiveKind.QUARTIC:
            return 0.25 * float(np.sum(x**4))
        if self.kind is ObjectiveKind.POWER_HINGE:
            c = float(self.power_c or 0.0)
            ax = abs(float(x[0]))
            if ax <= 1.0:
                return self.hinge_coefficient * ax**c
            return self.hinge_coefficient * (c * (ax - 1.0) + 1.0)
        assert self.custom_fn is not None
        return float(self.custom_fn(x))

    def grad(self, x: Vector) -> Vector:
        """Return the exact gradient at x (central differences for custom objectives)."""
        x = self._check(x)
        if self.kind is ObjectiveKind.QUADRATIC:
            return np.asarray(self.quadratic_eigs) * x
        if self.kind is ObjectiveKind.QUARTIC:
            return x**3
        if self.kind is ObjectiveKind.POWER_HINGE:
            c = float(self.power_c or 0.0)
            ax = abs(float(x[0]))
            slope = c * ax ** (c - 1.0) if ax <= 1.0 else c
            return np.array([self.hinge_coefficient * slope * np.sign(x[0])])
        if self.custom_grad is not None:
            return np.asarray(self.custom_grad(x), dtype=float)
        return self._fd_grad(x)

    def _fd_step(self, x: Vector, rel: float = FD_REL_STEP) -> float:
        return max(rel, rel * float(np.max(np.abs(x), initial=0.0)))

    def _fd_grad(self, x: Vector) -> Vector:
        h = self._fd_step(x)
        out = np.empty(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h
            out[i] = (self.eval(x + e) - self.eval(x - e)) / (2.0 * h)
        return out

    def hessian(self, x: Vector) -> Matrix:
        """Return the Hessian matrix at x.

        Raises:
            NonSmoothPointError: If x sits on the kink |x| = 1 of a power hinge.
        """
        x = self._check(x)
        if self.kind is ObjectiveKind.QUADRATIC:
            return np.diag(np.asarray(self.quadratic_eigs))
        if self.kind is ObjectiveKind.QUARTIC:
            return np.diag(3.0 * x**2)
        if self.kind is ObjectiveKind.POWER_HINGE:
            c = float(self.power_c or 0.0)
            ax = abs(float(x[0]))
            if ax == 1.0:
                raise NonSmoothPointError(f"{self.label} is not twice differentiable at |x| = 1")
            if ax > 1.0:
                return np.zeros((1, 1))
            return np.array([[self.hinge_coefficient * c * (c - 1.0) * ax ** (c - 2.0)]])
        return self._fd_hessian(x)

    def _fd_hessian(self, x: Vector) -> Matrix:
        hess = np.empty((self.dim, self.dim))
        if self.custom_grad is not None:
            h = self._fd_step(x)
            for i in range(self.dim):
                e = np.zeros(self.dim)
                e[i] = h
                hess[:, i] = (self.grad(x + e) - self.grad(x - e)) / (2.0 * h)
        else:
            h = self._fd_step(x, FD_VALUE_STEP)
            f0 = self.eval(x)
            for i in range(self.dim):
                ei = np.zeros(self.dim)
                ei[i] = h
                hess[i, i] = (self.eval(x + ei) - 2.0 * f0 + self.eval(x - ei)) / h**2
                for j in range(i):
                    ej = np.zeros(self.dim)
                    ej[j] = h
                    hess[i, j] = (
                        self.eval(x + ei + ej)
                        - self.eval(x + ei - ej)
                        - self.eval(x - ei + ej)
                        + self.eval(x - ei - ej)
                    ) / (4.0 * h**2)
                    hess[j, i] = hess[i, j]
        return 0.5 * (hess + hess.T)

    def hessian_eigs(self, x: Vector) -> Vector:
        """Return the Hessian eigenvalues at x in descending order."""
        if self.kind is ObjectiveKind.QUADRATIC:
            self._check(x)
            return np.sort(np.asarray(self.quadratic_eigs))[::-1]
        if self.kind is ObjectiveKind.CUSTOM:
            return np.sort(np.linalg.eigvalsh(self.hessian(x)))[::-1]
        return np.sort(np.diag(self.hessian(x)))[::-1]

    def optimum(self) -> tuple[Vector, float]:
        """Return (x*, f*)."""
        if self.kind is ObjectiveKind.CUSTOM:
            if self.custom_optimum is None:
                raise MissingOptimumError(f"{self.label} has no registered optimum")
            x_star, f_star = self.custom_optimum
            return np.asarray(x_star, dtype=float), float(f_star)
        return np.zeros(self.dim), 0.0
