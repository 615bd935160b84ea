"""Objective functions with exact derivatives and known optima."""

from essrate.objective.families import (
    custom,
    power_hinge,
    quadratic,
    quartic,
    random_quadratics,
    tmm_witness,
    witness_quadratic,
)
from essrate.objective.models import ObjectiveKind, ObjectiveSpec

__all__ = [
    "ObjectiveKind",
    "ObjectiveSpec",
    "custom",
    "power_hinge",
    "quadratic",
    "quartic",
    "random_quadratics",
    "tmm_witness",
    "witness_quadratic",
]
