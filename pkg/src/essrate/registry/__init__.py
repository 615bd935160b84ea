"""Registry of named Runge-Kutta methods."""

from essrate.registry.method_registry import MethodRegistry

__all__ = ["MethodRegistry"]
