"""Step policies, stop rules and trajectory records."""

import csv
import io
import math
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from essrate.config import get_settings
from essrate.dynamics.protocol import MetricKind
from essrate.types import ComplexVector, Vector

CSV_METRIC_COLUMNS: tuple[MetricKind, ...] = (
    MetricKind.GAP,
    MetricKind.DIST,
    MetricKind.MIN_SHIFTED_GRAD_SQ,
    MetricKind.TMM_DIST,
)


class PolicyKind(StrEnum):
    """Step-size policies."""

    FIXED = "fixed"
    STABILITY_CAPPED = "stability_capped"
    ARMIJO = "armijo"


class StepPolicy(BaseModel):
    """How the integrator chooses h_k."""

    model_config = ConfigDict(frozen=True)

    kind: PolicyKind = Field(default=PolicyKind.STABILITY_CAPPED, description="Policy family")
    h: float | None = Field(default=None, gt=0.0, description="Step of a fixed-step policy")
    safety: float = Field(
        default_factory=lambda: get_settings().default_safety,
        gt=0.0,
        le=1.0,
        description="Fraction of the maximal stable step to take",
    )
    h_floor: float = Field(
        default_factory=lambda: get_settings().default_h_floor,
        gt=0.0,
        description="Smallest admissible step",
    )
    h_cap: float = Field(
        default_factory=lambda: get_settings().default_h_cap,
        gt=0.0,
        description="Largest admissible step",
    )
    shrink: float = Field(default=0.5, gt=0.0, lt=1.0, description="Armijo backtracking factor")
    grow: float = Field(default=2.0, gt=1.0, description="Armijo growth of the trial step")
    slope_c: float = Field(default=1e-4, gt=0.0, lt=1.0, description="Armijo sufficient-decrease c")
    h_init: float = Field(default=1.0, gt=0.0, description="First Armijo trial step")

    @model_validator(mode="after")
    def _check_policy(self) -> "StepPolicy":
        if self.h_floor > self.h_cap:
            raise ValueError(f"h_floor={self.h_floor} exceeds h_cap={self.h_cap}")
        if self.kind is PolicyKind.FIXED and self.h is None:
            raise ValueError("a fixed-step policy needs h")
        return self

    @classmethod
    def fixed(cls, h: float) -> "StepPolicy":
        return cls(kind=PolicyKind.FIXED, h=h)

    @classmethod
    def stability_capped(cls, safety: float | None = None, **bounds: float) -> "StepPolicy":
        if safety is not None:
            bounds["safety"] = safety
        return cls(kind=PolicyKind.STABILITY_CAPPED, **bounds)

    @classmethod
    def armijo(cls, **params: float) -> "StepPolicy":
        return cls(kind=PolicyKind.ARMIJO, **params)


class StopRule(BaseModel):
    """When a run ends; the first satisfied condition wins."""

    model_config = ConfigDict(frozen=True)

    max_steps: int | None = Field(default=None, gt=0, description="Number of steps to take")
    t_max: float | None = Field(default=None, gt=0.0, description="Accumulated time to reach")
    phi_target: float | None = Field(
        default=None, gt=0.0, description="Stop once the stop metric falls to this value"
    )
    phi_metric: MetricKind = Field(
        default=MetricKind.GAP, description="Metric compared against phi_target"
    )

    @model_validator(mode="after")
    def _check_rule(self) -> "StopRule":
        if self.max_steps is None and self.t_max is None and self.phi_target is None:
            raise ValueError("a stop rule needs max_steps, t_max or phi_target")
        return self


@dataclass(slots=True)
class StepRecord:
    """State after step k; eigs are the Jacobian eigenvalues at (y_k, t_k)."""

    k: int
    t: float
    h: float
    y: Vector
    rho: float
    phi: dict[MetricKind, float] = field(default_factory=dict)
    eigs: ComplexVector | None = None
    flagged: bool = False


class TrajectoryMeta(BaseModel):
    """Descriptors of the run that produced a trajectory."""

    dynamics: str = Field(..., description="Dynamics label")
    model: str | None = Field(default=None, description="Model family, if any")
    rescaling: str | None = Field(default=None, description="Rescaling label, if any")
    objective: str = Field(..., description="Objective label")
    method: str = Field(..., description="Runge-Kutta method name")
    policy: StepPolicy
    stop: StopRule | None = None
    metrics: list[MetricKind] = Field(default_factory=list)
    stop_reason: str = Field(default="", description="Which stop condition ended the run")


class Trajectory:
    """Discrete record {k, t_k, h_k, y_k, rho_k, Phi_k} of one integration."""

    def __init__(self, meta: TrajectoryMeta, records: list[StepRecord] | None = None) -> None:
        self.meta = meta
        self.records: list[StepRecord] = records or []

    def append(self, record: StepRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, index: int) -> StepRecord:
        return self.records[index]

    @property
    def final(self) -> StepRecord:
        return self.records[-1]

    @property
    def steps(self) -> np.ndarray:
        return np.array([r.k for r in self.records], dtype=float)

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    @property
    def step_sizes(self) -> np.ndarray:
        return np.array([r.h for r in self.records])

    @property
    def rhos(self) -> np.ndarray:
        return np.array([r.rho for r in self.records])

    @property
    def states(self) -> np.ndarray:
        return np.array([r.y for r in self.records])

    def phi(self, kind: MetricKind) -> np.ndarray:
        """Metric series; NaN where the metric was not recorded."""
        return np.array([r.phi.get(kind, math.nan) for r in self.records])

    def flagged_steps(self) -> list[int]:
        return [r.k for r in self.records if r.flagged]

    def csv_text(self) -> str:
        """Render the trajectory CSV with shortest round-trip floats."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        state_dim = len(self.records[0].y) if self.records else 0
        header = ["k", "t", "h", "rho"] + [f"phi_{m.value}" for m in CSV_METRIC_COLUMNS]
        writer.writerow(header + [f"y{i}" for i in range(state_dim)])
        for r in self.records:
            row = [str(r.k), repr(r.t), repr(r.h), repr(r.rho)]
            row += [repr(r.phi[m]) if m in r.phi else "" for m in CSV_METRIC_COLUMNS]
            row += [repr(float(v)) for v in r.y]
            writer.writerow(row)
        return buffer.getvalue()

    def to_csv(self, path: str | Path) -> None:
        """Write the trajectory CSV."""
        file_path = Path(path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_path.write_text(self.csv_text())

