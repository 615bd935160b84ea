"""Experiment configuration documents and report schemas."""

import itertools
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from essrate.analysis.models import EssentialVerdict, RateFit, TheoremCheck
from essrate.dynamics.models import DynamicsSpec, ModelKind, one_essential_rescaling
from essrate.dynamics.protocol import MetricKind
from essrate.dynamics.rescaling import Rescaling
from essrate.errors import ConfigError
from essrate.integrate.models import StepPolicy, StopRule, TrajectoryMeta
from essrate.objective import families
from essrate.objective.models import ObjectiveKind, ObjectiveSpec
from essrate.types import Vector

logger = logging.getLogger(__name__)


class ObjectiveConfig(BaseModel):
    """Objective descriptor; custom objectives are not expressible in a config file."""

    kind: ObjectiveKind = Field(..., description="Objective family")
    dim: int = Field(default=1, ge=1, description="Dimension of quartic objectives")
    eigs: list[float] = Field(default_factory=list, description="Quadratic Hessian spectrum")
    mu: float | None = Field(default=None, ge=0.0, description="Strong-convexity modulus")
    ell: float | None = Field(default=None, gt=0.0, description="Smoothness constant")
    power_c: float | None = Field(default=None, description="Exponent of the power hinge")
    radius_R: float = Field(default=1.0, gt=0.0, description="Radius of the initial-value set")

    @model_validator(mode="after")
    def _check_kind(self) -> "ObjectiveConfig":
        if self.kind is ObjectiveKind.CUSTOM:
            raise ValueError("custom objectives are only available through the Python API")
        if self.kind is ObjectiveKind.QUADRATIC and not self.eigs:
            raise ValueError("a quadratic objective needs eigs")
        if self.kind is ObjectiveKind.POWER_HINGE and self.power_c is None:
            raise ValueError("a power_hinge objective needs power_c")
        return self

    def build(self) -> ObjectiveSpec:
        match self.kind:
            case ObjectiveKind.QUADRATIC:
                return families.quadratic(
                    self.eigs, mu=self.mu, ell=self.ell, radius_R=self.radius_R
                )
            case ObjectiveKind.QUARTIC:
                return families.quartic(self.dim, radius_R=self.radius_R)
            case _:
                assert self.power_c is not None
                return families.power_hinge(
                    self.power_c, ell=self.ell or 1.0, radius_R=self.radius_R
                )


class ModelConfig(BaseModel):
    """Dynamics descriptor."""

    name: ModelKind = Field(..., description="Optimizer ODE family")
    rescaling: Rescaling = Field(default_factory=Rescaling.identity, description="Time rescaling")
    one_essential: bool = Field(
        default=False, description="Replace the rescaling by the model's 1-essential rescaling"
    )
    shift_b: float | None = Field(default=None, gt=0.0, description="Shifted-gradient b")

    def build(self, objective: ObjectiveSpec) -> DynamicsSpec:
        rescaling = self.rescaling
        if self.one_essential:
            rescaling = one_essential_rescaling(self.name, objective, self.shift_b)
        return DynamicsSpec(
            model=self.name, objective=objective, rescaling=rescaling, shift_b=self.shift_b
        )


class OutputsConfig(BaseModel):
    """Artifact paths; relative paths resolve against the working directory."""

    trajectory_csv: str | None = Field(default=None, description="Trajectory CSV path")
    report_json: str | None = Field(default=None, description="JSON report path")
    svg: str | None = Field(default=None, description="Path prefix of the SVG plots")


class FamilyConfig(BaseModel):
    """Objective family sampled by essential-check."""

    count: int = Field(default=50, ge=0, description="Number of random quadratics")
    dim: int = Field(default=2, ge=1, description="Dimension of the random quadratics")
    include_witness: bool = Field(default=True, description="Append the worst-case witness")
    horizon: float = Field(default=200.0, gt=0.0, description="Integration horizon per run")
    tol: float | None = Field(default=None, gt=0.0, description="Verdict tolerance")
    tail_frac: float | None = Field(default=None, gt=0.0, le=1.0, description="Tail fraction")


class TheoremConfig(BaseModel):
    """Parameters of theorem-check."""

    eps: float = Field(default=0.05, gt=0.0, description="Slack added to the domain radius")
    k_min: int = Field(default=100, ge=1, description="First step index checked")


class ExperimentConfig(BaseModel):
    """One experiment: objective, dynamics, method, step control and outputs."""

    name: str = Field(default="experiment", description="Identifier used in reports")
    objective: ObjectiveConfig
    model: ModelConfig
    method: str = Field(default="rk4", description="Registered Runge-Kutta method name")
    policy: StepPolicy = Field(default_factory=StepPolicy.stability_capped)
    stop: StopRule = Field(default_factory=lambda: StopRule(max_steps=1000))
    metrics: list[MetricKind] | None = Field(
        default=None, description="Metrics to record; all available metrics when omitted"
    )
    x0: list[float] | None = Field(default=None, description="Initial position; ones by default")
    outputs: OutputsConfig = Field(default_factory=OutputsConfig)
    seed: int = Field(default=0, description="Seed of the sampled objective family")
    family: FamilyConfig = Field(default_factory=FamilyConfig)
    theorem: TheoremConfig = Field(default_factory=TheoremConfig)
    sweep: dict[str, list[Any]] = Field(
        default_factory=dict, description="Dotted config paths mapped to values to cross"
    )

    def build_objective(self) -> ObjectiveSpec:
        return self.objective.build()

    def build_dynamics(self) -> DynamicsSpec:
        return self.model.build(self.build_objective())

    def initial_position(self, dim: int) -> Vector:
        if self.x0 is None:
            return np.ones(dim)
        if len(self.x0) != dim:
            raise ConfigError(f"x0: expected {dim} entries, got {len(self.x0)}")
        return np.asarray(self.x0, dtype=float)


class SimulationReport(BaseModel):
    """JSON report written by simulate."""

    experiment: str = Field(..., description="Experiment identifier")
    meta: TrajectoryMeta
    steps: int
    final_t: float
    final_metrics: dict[MetricKind, float]
    flagged_steps: list[int] = Field(default_factory=list)
    stability_violations: list[int] = Field(default_factory=list)
    fits: dict[MetricKind, RateFit] = Field(default_factory=dict)


class EssentialReport(BaseModel):
    """JSON report written by essential-check."""

    experiment: str
    dynamics: str
    method: str
    family: list[str]
    verdict: EssentialVerdict


class TheoremReport(BaseModel):
    """JSON report written by theorem-check."""

    experiment: str
    dynamics: str
    method: str
    connecting_map: str
    domain_radius: float
    check: TheoremCheck


def format_validation_error(error: ValidationError) -> str:
    """Flatten a pydantic error into ``field.path: message`` entries."""
    parts = []
    for item in error.errors():
        path = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{path}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a config mapping.

    Raises:
        ConfigError: With the offending field path when validation fails.
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(format_validation_error(e)) from e


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a JSON config document.

    Raises:
        ConfigError: If the document is not valid JSON or not an object.
        OSError: If the file cannot be read.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object, got {type(data).__name__}")
    return data


def _set_dotted(data: dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = data
    for key in keys[:-1]:
        child = node.setdefault(key, {})
        if not isinstance(child, dict):
            raise ConfigError(f"sweep.{dotted}: {key} is not an object")
        node = child
    node[keys[-1]] = value


def _suffixed(path: str | None, index: int) -> str | None:
    if path is None:
        return None
    p = Path(path)
    return str(p.with_name(f"{p.stem}-{index:03d}{p.suffix}"))


def expand_sweep(data: dict[str, Any]) -> list[ExperimentConfig]:
    """Expand ``sweep`` into the cross product of experiments.

    Each expanded experiment gets its output paths suffixed with ``-NNN``. A
    config without a sweep yields itself.

    Raises:
        ConfigError: If the sweep or any expanded experiment is invalid.
    """
    sweep = data.get("sweep") or {}
    if not isinstance(sweep, dict):
        raise ConfigError("sweep: expected an object of dotted paths")
    if not sweep:
        return [parse_config(data)]
    for key, values in sweep.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep.{key}: expected a nonempty list")
    keys = list(sweep)
    experiments = []
    for index, combo in enumerate(itertools.product(*(sweep[k] for k in keys))):
        variant = json.loads(json.dumps({k: v for k, v in data.items() if k != "sweep"}))
        for key, value in zip(keys, combo, strict=True):
            _set_dotted(variant, key, value)
        variant["name"] = f"{variant.get('name', 'experiment')}-{index:03d}"
        outputs = variant.setdefault("outputs", {})
        for name in ("trajectory_csv", "report_json", "svg"):
            outputs[name] = _suffixed(outputs.get(name), index)
        experiments.append(parse_config(variant))
    logger.info(f"Expanded sweep over {', '.join(keys)} into {len(experiments)} experiments")
    return experiments
