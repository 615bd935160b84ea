"""Time-rescaling functions.

A rescaling alpha maps the time of a rescaled system to the time of its base
system: g_hat(y, t) = alpha'(t) g(y, alpha(t)). Valid rescalings satisfy
alpha(0) = 0, alpha' > 0 on t > 0 and alpha(t) -> infinity.
"""

import logging
import math
from enum import StrEnum
from typing import Protocol, runtime_checkable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import brentq

logger = logging.getLogger(__name__)


@runtime_checkable
class TimeMap(Protocol):
    """Anything with a value and a first derivative in time."""

    def value(self, t: float) -> float: ...

    def derivative(self, t: float) -> float: ...


class RescalingKind(StrEnum):
    """Closed-form rescaling families."""

    IDENTITY = "identity"
    LINEAR = "linear"
    POWER = "power"
    EXP23 = "exp23"
    LOG_SLIP = "log_slip"
    COMPOSED = "composed"


class Rescaling(BaseModel):
    """A time-rescaling function alpha with derivatives and inverse.

    Families:
        identity: alpha(t) = t
        linear: alpha(t) = rate * t
        power: alpha(t) = scale * t^power
        exp23: alpha(t) = (3/2)(e^{2t/3} - 1)
        log_slip: alpha(t) = ratio * (t - log(t + 1))
        composed: alpha(t) = outer(inner(t))
    """

    model_config = ConfigDict(frozen=True)

    kind: RescalingKind = Field(default=RescalingKind.IDENTITY, description="Rescaling family")
    rate: float = Field(default=1.0, gt=0.0, description="Slope r of a linear rescaling")
    power: float = Field(default=1.0, gt=0.0, description="Exponent p of a power rescaling")
    scale: float = Field(default=1.0, gt=0.0, description="Prefactor of a power rescaling")
    ratio: float = Field(default=1.0, gt=0.0, description="Limit slope of a log-slip rescaling")
    outer: "Rescaling | None" = Field(default=None, description="Outer map of a composition")
    inner: "Rescaling | None" = Field(default=None, description="Inner map of a composition")

    @model_validator(mode="after")
    def _check_composition(self) -> "Rescaling":
        if self.kind is RescalingKind.COMPOSED and (self.outer is None or self.inner is None):
            raise ValueError("a composed rescaling needs outer and inner")
        return self

    @classmethod
    def identity(cls) -> "Rescaling":
        return cls()

    @classmethod
    def linear(cls, rate: float) -> "Rescaling":
        return cls(kind=RescalingKind.LINEAR, rate=rate)

    @classmethod
    def power_law(cls, power: float, scale: float = 1.0) -> "Rescaling":
        return cls(kind=RescalingKind.POWER, power=power, scale=scale)

    @classmethod
    def exp23(cls) -> "Rescaling":
        return cls(kind=RescalingKind.EXP23)

    @classmethod
    def log_slip(cls, ratio: float) -> "Rescaling":
        return cls(kind=RescalingKind.LOG_SLIP, ratio=ratio)

    @property
    def label(self) -> str:
        """Short human readable form, e.g. ``power(2, 0.1)``."""
        match self.kind:
            case RescalingKind.LINEAR:
                return f"linear({self.rate:g})"
            case RescalingKind.POWER:
                return f"power({self.power:g}, {self.scale:g})"
            case RescalingKind.LOG_SLIP:
                return f"log_slip({self.ratio:g})"
            case RescalingKind.COMPOSED:
                assert self.outer is not None and self.inner is not None
                return f"{self.outer.label}o{self.inner.label}"
            case _:
                return self.kind.value

    def value(self, t: float) -> float:
        """Return alpha(t)."""
        match self.kind:
            case RescalingKind.IDENTITY:
                return t
            case RescalingKind.LINEAR:
                return self.rate * t
            case RescalingKind.POWER:
                return self.scale * t**self.power
            case RescalingKind.EXP23:
                return 1.5 * math.expm1(2.0 * t / 3.0)
            case RescalingKind.LOG_SLIP:
                return self.ratio * (t - math.log1p(t))
            case _:
                assert self.outer is not None and self.inner is not None
                return self.outer.value(self.inner.value(t))

    def derivative(self, t: float) -> float:
        """Return alpha'(t)."""
        match self.kind:
            case RescalingKind.IDENTITY:
                return 1.0
            case RescalingKind.LINEAR:
                return self.rate
            case RescalingKind.POWER:
                if t == 0.0:
                    if self.power == 1.0:
                        return self.scale
                    return 0.0 if self.power > 1.0 else math.inf
                return self.scale * self.power * t ** (self.power - 1.0)
            case RescalingKind.EXP23:
                return math.exp(2.0 * t / 3.0)
            case RescalingKind.LOG_SLIP:
                return self.ratio * t / (t + 1.0)
            case _:
                assert self.outer is not None and self.inner is not None
                return self.outer.derivative(self.inner.value(t)) * self.inner.derivative(t)

    def second_derivative(self, t: float) -> float:
        """Return alpha''(t)."""
        match self.kind:
            case RescalingKind.IDENTITY | RescalingKind.LINEAR:
                return 0.0
            case RescalingKind.POWER:
                p = self.power
                if p in (1.0, 2.0):
                    return self.scale * p * (p - 1.0)
                if t == 0.0:
                    return 0.0 if p > 2 else math.inf
                return self.scale * p * (p - 1.0) * t ** (p - 2.0)
            case RescalingKind.EXP23:
                return (2.0 / 3.0) * math.exp(2.0 * t / 3.0)
            case RescalingKind.LOG_SLIP:
                return self.ratio / (t + 1.0) ** 2
            case _:
                assert self.outer is not None and self.inner is not None
                s = self.inner.value(t)
                di = self.inner.derivative(t)
                return (
                    self.outer.second_derivative(s) * di * di
                    + self.outer.derivative(s) * self.inner.second_derivative(t)
                )

    def inverse(self, s: float) -> float:
        """Return the t >= 0 with alpha(t) = s.

        Raises:
            ValueError: If s is negative.
        """
        if s < 0.0:
            raise ValueError(f"rescalings are inverted on [0, inf), got {s}")
        match self.kind:
            case RescalingKind.IDENTITY:
                return s
            case RescalingKind.LINEAR:
                return s / self.rate
            case RescalingKind.POWER:
                return (s / self.scale) ** (1.0 / self.power)
            case RescalingKind.EXP23:
                return 1.5 * math.log1p(2.0 * s / 3.0)
            case RescalingKind.LOG_SLIP:
                if s == 0.0:
                    return 0.0
                hi = s / self.ratio + 1.0
                while self.value(hi) < s:
                    hi *= 2.0
                return float(brentq(lambda t: self.value(t) - s, 0.0, hi, xtol=1e-14, rtol=1e-15))
            case _:
                assert self.outer is not None and self.inner is not None
                return self.inner.inverse(self.outer.inverse(s))

    def compose(self, inner: "Rescaling") -> "Rescaling":
        """Return self o inner, simplified where a closed form exists."""
        if inner.kind is RescalingKind.IDENTITY:
            return self
        if self.kind is RescalingKind.IDENTITY:
            return inner
        if self.kind is RescalingKind.LINEAR and inner.kind is RescalingKind.LINEAR:
            return Rescaling.linear(self.rate * inner.rate)
        if self.kind is RescalingKind.LINEAR and inner.kind is RescalingKind.POWER:
            return Rescaling.power_law(inner.power, self.rate * inner.scale)
        if self.kind is RescalingKind.POWER and inner.kind is RescalingKind.LINEAR:
            return Rescaling.power_law(self.power, self.scale * inner.rate**self.power)
        if self.kind is RescalingKind.POWER and inner.kind is RescalingKind.POWER:
            return Rescaling.power_law(
                self.power * inner.power, self.scale * inner.scale**self.power
            )
        return Rescaling(kind=RescalingKind.COMPOSED, outer=self, inner=inner)

    def validate_samples(self, t_max: float = 1e3, samples: int = 200) -> bool:
        """Check alpha(0) = 0, alpha' > 0 on a grid and growth at t_max."""
        if abs(self.value(0.0)) > 1e-12:
            return False
        grid = np.geomspace(1e-6, t_max, samples)
        if not all(self.derivative(float(t)) > 0.0 for t in grid):
            return False
        return self.value(t_max) > self.value(t_max / 2.0)


class ConnectingMap:
    """Time map between two rescalings of the same base dynamics.

    With alpha = target^{-1} o source, g_source(y, t) = alpha'(t) g_target(y, alpha(t)).
    """

    def __init__(self, source: Rescaling, target: Rescaling) -> None:
        self.source = source
        self.target = target

    @property
    def label(self) -> str:
        return f"{self.target.label}^-1 o {self.source.label}"

    def value(self, t: float) -> float:
        return self.target.inverse(self.source.value(t))

    def derivative(self, t: float) -> float:
        return self.source.derivative(t) / self.target.derivative(self.value(t))

    def inverse(self, s: float) -> float:
        return self.source.inverse(self.target.value(s))

    def __repr__(self) -> str:
        return f"ConnectingMap({self.label})"


Rescaling.model_rebuild()
