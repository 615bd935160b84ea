"""Result models of the analysis operations."""

from enum import StrEnum

from pydantic import BaseModel, Field, field_validator

from essrate.dynamics.protocol import MetricKind


class RateKind(StrEnum):
    """Shapes of convergence rates.

    power: Phi ~ C t^{-p}; exponential: Phi ~ C e^{-q t}; linear_k: Phi ~ C sigma^k
    with exponent -ln(sigma).
    """

    POWER = "power"
    EXPONENTIAL = "exponential"
    LINEAR_K = "linear_k"


class RateFit(BaseModel):
    """A least-squares rate fit on a trailing window."""

    kind: RateKind
    exponent: float = Field(..., description="Fitted p, q or -ln(sigma)")
    coefficient: float = Field(..., description="Fitted prefactor C")
    r_squared: float = Field(..., ge=0.0, le=1.0, description="Goodness of fit on the window")
    window: tuple[int, int] = Field(..., description="First and last series index used")

    @field_validator("exponent")
    @classmethod
    def _finite(cls, value: float) -> float:
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError("fitted exponent must be finite")
        return value


class EssentialVerdict(BaseModel):
    """Outcome of a c-essential check over a sampled family."""

    c_estimate: float = Field(..., description="Max over the family of tail spectral radii")
    lb_witness: str = Field(..., description="Objective achieving c_estimate")
    ub_ok: bool = Field(..., description="c_estimate <= 1 + tol")
    lb_ok: bool = Field(..., description="Some pair reached 1 - tol")
    tol: float
    horizon: float
    radii: list[float | None] = Field(default_factory=list, description="Tail radius per pair")
    failures: list[str] = Field(default_factory=list, description="Annotated integration failures")

    @property
    def is_one_essential(self) -> bool:
        return self.ub_ok and self.lb_ok


class TheoremCheck(BaseModel):
    """Empirical check of alpha(t_k) <= (r + eps) k."""

    fraction_satisfied: float = Field(..., ge=0.0, le=1.0)
    worst_ratio: float = Field(..., description="max_k alpha(t_k) / k over k >= k_min")
    final_ratio: float = Field(..., description="alpha(t_k) / k at the last record")
    r: float
    eps: float
    k_min: int
    count: int = Field(..., description="Number of indices checked")

    @property
    def bound(self) -> float:
        return self.r + self.eps

    @property
    def holds(self) -> bool:
        return self.count > 0 and self.fraction_satisfied == 1.0


class RateRow(BaseModel):
    """One row of the essential-rate table."""

    model: str
    metric: MetricKind
    fitted_kind: RateKind
    fitted_exponent: float
    predicted_kind: RateKind | None = None
    predicted_exponent: float | None = None
    relative_deviation: float | None = None


class BSweepResult(BaseModel):
    """Essential-rate coefficient of the shifted-gradient model over a grid of b."""

    ell: float
    points: list[tuple[float, float]] = Field(..., description="(b, coefficient) per grid point")
    b_grid_min: float
    coefficient_grid_min: float
    b_refined: float
    coefficient_refined: float
