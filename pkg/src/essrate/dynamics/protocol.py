"""Structural interface shared by every integrable dynamics."""

from enum import StrEnum
from typing import Protocol, runtime_checkable

from essrate.objective.models import ObjectiveSpec
from essrate.types import ComplexVector, Matrix, Vector


class MetricKind(StrEnum):
    """Convergence metrics Phi recorded along trajectories."""

    GAP = "gap"
    DIST = "dist"
    MIN_SHIFTED_GRAD_SQ = "minsgrad"
    TMM_DIST = "tmmdist"


@runtime_checkable
class Dynamics(Protocol):
    """A time-dependent vector field y' = g(y, t) built on an objective."""

    objective: ObjectiveSpec

    @property
    def state_dim(self) -> int: ...

    @property
    def t_start(self) -> float: ...

    @property
    def label(self) -> str: ...

    def vector_field(self, y: Vector, t: float) -> Vector: ...

    def jacobian(self, y: Vector, t: float) -> Matrix: ...

    def jacobian_eigs(self, y: Vector, t: float) -> ComplexVector: ...

    def spectral_radius(self, y: Vector, t: float) -> float: ...

    def metric(self, kind: MetricKind, y: Vector, t: float, running_min: float = ...) -> float: ...
