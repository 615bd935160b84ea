"""Optimizer ODE models, time-rescalings, metrics and reformulations."""

from essrate.dynamics.models import (
    DynamicsSpec,
    ModelKind,
    dense_eigs,
    finite_difference_jacobian,
    gradient_flow_solution,
    one_essential_rescaling,
    shifted_limit_radius,
    verify_equivalence,
)
from essrate.dynamics.protocol import Dynamics, MetricKind
from essrate.dynamics.reformulate import (
    ReformulatedDynamics,
    agm_convex_coefficients,
    agm_convex_transform,
    reformulate,
    standard_form,
)
from essrate.dynamics.rescaling import ConnectingMap, Rescaling, RescalingKind, TimeMap

__all__ = [
    "ConnectingMap",
    "Dynamics",
    "DynamicsSpec",
    "MetricKind",
    "ModelKind",
    "ReformulatedDynamics",
    "Rescaling",
    "RescalingKind",
    "TimeMap",
    "agm_convex_coefficients",
    "agm_convex_transform",
    "dense_eigs",
    "finite_difference_jacobian",
    "gradient_flow_solution",
    "one_essential_rescaling",
    "reformulate",
    "shifted_limit_radius",
    "standard_form",
    "verify_equivalence",
]
