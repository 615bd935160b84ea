"""Exception hierarchy for essrate.

Every error derives from :class:`EssrateError` and from the builtin exception
that best describes it, so callers can catch either.
"""


class EssrateError(Exception):
    """Base class for all essrate errors."""


class DimensionMismatchError(EssrateError, ValueError):
    """A vector does not have the dimension the object expects."""


class NonSmoothPointError(EssrateError, ValueError):
    """Second derivatives were requested at a kink of a piecewise objective."""


class MissingOptimumError(EssrateError, LookupError):
    """A custom objective was asked for an optimum it was not given."""


class SingularTimeError(EssrateError, ValueError):
    """The vector field has a singular coefficient at the requested time."""


class MetricUnavailableError(EssrateError, ValueError):
    """The metric needs structure the dynamics does not have."""


class EigenSolverError(EssrateError, RuntimeError):
    """The dense eigensolver failed to converge."""


class SingularTransformError(EssrateError, ValueError):
    """A reformulation matrix A(t) is not invertible."""


class FitError(EssrateError, ValueError):
    """A rate could not be fitted to the given series."""


class TrajectoryTooShortError(EssrateError, ValueError):
    """A trajectory has too few records for the requested analysis."""


class ConfigError(EssrateError, ValueError):
    """An experiment configuration is invalid."""


class UnknownMethodError(EssrateError, KeyError):
    """A Runge-Kutta method name is not registered."""


class IntegrationError(EssrateError, RuntimeError):
    """Base class for failures while integrating a trajectory."""


class DivergedError(IntegrationError):
    """The state became non-finite."""


class StabilityImpossibleError(IntegrationError):
    """No admissible step keeps h*lambda inside the stability domain."""


class StepOverflowError(IntegrationError):
    """The run exceeded the configured step budget without meeting its stop rule."""


class NoDescentError(IntegrationError):
    """Armijo backtracking failed to find a sufficient-decrease step."""


class NonFiniteStageError(IntegrationError):
    """A Runge-Kutta stage evaluated to a non-finite value."""
