"""Explicit Runge-Kutta methods described by their Butcher tableau."""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

# Tolerance when comparing a declared stability polynomial against its tableau.
POLY_MATCH_TOL = 1e-12


def tableau_stability_poly(
    butcher_a: tuple[tuple[float, ...], ...], butcher_b: tuple[float, ...]
) -> tuple[float, ...]:
    """Return [c_0, ..., c_s] with c_0 = 1 and c_j = b^T A^(j-1) 1."""
    a = np.asarray(butcher_a, dtype=float)
    b = np.asarray(butcher_b, dtype=float)
    coeffs = [1.0]
    v = np.ones(len(b))
    for _ in range(len(b)):
        coeffs.append(float(b @ v))
        v = a @ v
    while len(coeffs) > 2 and coeffs[-1] == 0.0:
        coeffs.pop()
    return tuple(coeffs)


class RkMethod(BaseModel):
    """An explicit Runge-Kutta method.

    The stability function of an explicit method is the polynomial
    R(z) = sum_j c_j z^j. When ``stability_poly`` is omitted it is derived from
    the tableau; when both are given they must agree.
    """

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Method identifier")
    order: int = Field(..., ge=1, description="Classical order of accuracy")
    butcher_a: tuple[tuple[float, ...], ...] = Field(
        default=(), description="Strictly lower-triangular stage matrix A"
    )
    butcher_b: tuple[float, ...] = Field(default=(), description="Stage weights b")
    butcher_c: tuple[float, ...] = Field(default=(), description="Stage nodes c")
    stability_poly: tuple[float, ...] = Field(
        default=(), description="Coefficients [c_0, c_1, ..., c_s] of R(z)"
    )

    @model_validator(mode="after")
    def _check_method(self) -> "RkMethod":
        if self.butcher_b:
            self._check_tableau()
            derived = tableau_stability_poly(self.butcher_a, self.butcher_b)
            if not self.stability_poly:
                object.__setattr__(self, "stability_poly", derived)
            elif not _poly_close(self.stability_poly, derived):
                raise ValueError(
                    f"stability_poly {self.stability_poly} does not match the tableau ({derived})"
                )
        if len(self.stability_poly) < 2:
            raise ValueError("stability_poly needs at least c_0 and c_1")
        if not (
            math.isclose(self.stability_poly[0], 1.0, rel_tol=1e-12)
            and math.isclose(self.stability_poly[1], 1.0, rel_tol=1e-12)
        ):
            raise ValueError("a consistent method has c_0 = c_1 = 1")
        if self.stability_poly[-1] == 0.0:
            raise ValueError("leading stability coefficient must be nonzero")
        for j in range(min(self.order + 1, len(self.stability_poly))):
            if not math.isclose(self.stability_poly[j], 1.0 / math.factorial(j), rel_tol=1e-9):
                raise ValueError(
                    f"order {self.order} requires c_{j} = 1/{j}!, got {self.stability_poly[j]}"
                )
        return self

    def _check_tableau(self) -> None:
        stages = len(self.butcher_b)
        if len(self.butcher_a) != stages or len(self.butcher_c) != stages:
            raise ValueError("butcher_a, butcher_b and butcher_c must have one entry per stage")
        for i, row in enumerate(self.butcher_a):
            if len(row) != stages:
                raise ValueError(f"row {i} of butcher_a has {len(row)} entries, expected {stages}")
            if any(row[j] != 0.0 for j in range(i, stages)):
                raise ValueError("butcher_a must be strictly lower triangular")

    @property
    def stages(self) -> int:
        """Number of stages, or the polynomial degree when no tableau is attached."""
        return len(self.butcher_b) or len(self.stability_poly) - 1

    @property
    def has_tableau(self) -> bool:
        return bool(self.butcher_b)

    @property
    def coefficients(self) -> np.ndarray:
        """Stability coefficients as an ascending-power array."""
        return np.asarray(self.stability_poly, dtype=float)


def _poly_close(left: tuple[float, ...], right: tuple[float, ...]) -> bool:
    width = max(len(left), len(right))
    a = np.pad(np.asarray(left, dtype=float), (0, width - len(left)))
    b = np.pad(np.asarray(right, dtype=float), (0, width - len(right)))
    return bool(np.allclose(a, b, rtol=0.0, atol=POLY_MATCH_TOL))
