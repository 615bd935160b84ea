"""Stability function, stability domain and stability radii of explicit RK methods.

For an explicit method the stability function is a polynomial, so the squared
modulus along a ray z = s e^{i theta} is the real polynomial
P(s) = |R(s e^{i theta})|^2 of degree 2s. Boundary crossings along a ray are
the positive real roots of P(s) - 1, which makes ray radii cheap enough to
evaluate at every integration step.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import minimize_scalar

from essrate.stability.models import RkMethod
from essrate.types import Matrix

logger = logging.getLogger(__name__)

# |R(z)| <= 1 + BOUNDARY_SLACK counts as stable.
BOUNDARY_SLACK = 1e-12
# Rays whose first sample is already unstable have radius 0.
FIRST_SAMPLE = 1e-3
ROOT_XTOL = 1e-9
DOMAIN_ANGLES = 2049


def stability_value(method: RkMethod, z: complex) -> float:
    """Return |R(z)|."""
    acc = 0j
    for c in reversed(method.stability_poly):
        acc = acc * z + c
    return abs(acc)


def in_domain(method: RkMethod, z: complex) -> bool:
    """Return True if z lies in the stability domain, boundary included."""
    return stability_value(method, z) <= 1.0 + BOUNDARY_SLACK


def _ray_poly(method: RkMethod, theta: float) -> np.ndarray:
    """Ascending coefficients of |R(s e^{i theta})|^2 - 1 in s."""
    coeffs = method.coefficients
    w = coeffs * np.exp(1j * theta * np.arange(len(coeffs)))
    p = np.real(np.convolve(w, np.conj(w)))
    p[0] -= 1.0
    return p


def _positive_roots(p: np.ndarray) -> np.ndarray:
    """Positive real roots of p(s)/s, ascending."""
    q = p[1:].copy()
    # roundoff in the low-order terms would split the root at 0 into a cluster
    q[np.abs(q) <= 1e-14 * np.max(np.abs(q))] = 0.0
    q = np.trim_zeros(q)
    if len(q) < 2:
        return np.empty(0)
    roots = npoly.polyroots(q)
    real = roots[np.abs(roots.imag) <= 1e-7 * np.maximum(1.0, np.abs(roots))].real
    return np.sort(real[real > 0.0])


def _polish(p: np.ndarray, root: float) -> float:
    """Refine a companion-matrix root with a few Newton steps.

    Near tangential (double) roots Newton may wander; the unpolished root is
    kept whenever the refinement moves further than the bracket allows.
    """
    dp = npoly.polyder(p)
    s = root
    for _ in range(3):
        slope = npoly.polyval(s, dp)
        if slope == 0.0:
            break
        step = npoly.polyval(s, p) / slope
        s -= step
        if abs(step) <= ROOT_XTOL * 1e-3:
            break
    if abs(s - root) > 1e-6 * max(1.0, root):
        return root
    return float(s)


def _outside(p: np.ndarray, s: float) -> bool:
    """True when the ray point at distance s is outside the domain."""
    return bool(npoly.polyval(s, p) > 2.0 * BOUNDARY_SLACK)


def directional_radius(method: RkMethod, theta: float) -> float:
    """Largest rho such that the segment {s e^{i theta} : 0 <= s <= rho} lies in S.

    Args:
        method: Runge-Kutta method.
        theta: Ray direction in radians.

    Returns:
        The segment radius, or 0 when the ray leaves S immediately.
    """
    return _directional_radius_cached(method, round(float(theta), 13))


@lru_cache(maxsize=8192)
def _directional_radius_cached(method: RkMethod, theta: float) -> float:
    p = _ray_poly(method, theta)
    if _outside(p, FIRST_SAMPLE):
        return 0.0
    for root in _positive_roots(p):
        if root <= FIRST_SAMPLE * 0.5:
            continue
        if _outside(p, root * (1.0 + 1e-7)):
            return _polish(p, float(root))
    return math.inf


def ray_extent(method: RkMethod, theta: float) -> float:
    """Largest |z| of a point of S on the ray of angle theta (point membership)."""
    p = _ray_poly(method, theta)
    roots = _positive_roots(p)
    if len(roots) == 0:
        return 0.0
    return _polish(p, float(roots[-1]))


def domain_radius(method: RkMethod) -> float:
    """Return r = max over S of |z|.

    The ray extent is maximised on a grid over [0, pi] (S is symmetric about
    the real axis) and the best cell is refined with a bounded scalar search.
    """
    angles = np.linspace(0.0, math.pi, DOMAIN_ANGLES)
    extents = np.array([ray_extent(method, float(theta)) for theta in angles])
    best = int(np.argmax(extents))
    lo = angles[max(best - 1, 0)]
    hi = angles[min(best + 1, len(angles) - 1)]
    refined = minimize_scalar(
        lambda theta: -ray_extent(method, theta),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    radius = max(float(extents[best]), float(-refined.fun))
    logger.debug(f"domain_radius({method.name}) = {radius:.12g}")
    return radius


def grid_axes(
    re_range: tuple[float, float], im_range: tuple[float, float], resolution: int
) -> tuple[np.ndarray, np.ndarray]:
    """Return the real and imaginary sample coordinates of a domain grid."""
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    return (
        np.linspace(re_range[0], re_range[1], resolution),
        np.linspace(im_range[0], im_range[1], resolution),
    )


def domain_grid(
    method: RkMethod,
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    resolution: int,
) -> Matrix:
    """Sample |R| on a resolution x resolution grid.

    Row i holds the imaginary coordinate im[i], column j the real coordinate
    re[j]; entry [0, 0] is the corner (re_range[0], im_range[0]).
    """
    re, im = grid_axes(re_range, im_range, resolution)
    z = re[None, :] + 1j * im[:, None]
    return np.abs(npoly.polyval(z, method.coefficients))
