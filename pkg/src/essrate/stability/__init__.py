"""Stability functions and stability domains of explicit Runge-Kutta methods."""

from essrate.stability.builtin import BUILTIN_METHODS, EULER, HEUN, METHOD_ALIASES, RK3, RK4
from essrate.stability.domain import (
    directional_radius,
    domain_grid,
    domain_radius,
    grid_axes,
    in_domain,
    ray_extent,
    stability_value,
)
from essrate.stability.models import RkMethod, tableau_stability_poly

__all__ = [
    "BUILTIN_METHODS",
    "EULER",
    "HEUN",
    "METHOD_ALIASES",
    "RK3",
    "RK4",
    "RkMethod",
    "directional_radius",
    "domain_grid",
    "domain_radius",
    "grid_axes",
    "in_domain",
    "ray_extent",
    "stability_value",
    "tableau_stability_poly",
]
