"""Essential-rate verification, theorem bound checks and rate fitting."""

from essrate.analysis.essential import (
    essential_check,
    rescaling_slope_limit,
    tail_spectral_radius,
    theorem_bound_check,
)
from essrate.analysis.models import (
    BSweepResult,
    EssentialVerdict,
    RateFit,
    RateKind,
    RateRow,
    TheoremCheck,
)
from essrate.analysis.rates import (
    essential_rate_table,
    fit_rate,
    fit_trajectory_rate,
    predicted_rate,
    shifted_b_sweep,
    shifted_rate_coefficient,
)
from essrate.dynamics.models import shifted_limit_radius

__all__ = [
    "BSweepResult",
    "EssentialVerdict",
    "RateFit",
    "RateKind",
    "RateRow",
    "TheoremCheck",
    "essential_check",
    "essential_rate_table",
    "fit_rate",
    "fit_trajectory_rate",
    "predicted_rate",
    "rescaling_slope_limit",
    "shifted_b_sweep",
    "shifted_limit_radius",
    "shifted_rate_coefficient",
    "tail_spectral_radius",
    "theorem_bound_check",
]
