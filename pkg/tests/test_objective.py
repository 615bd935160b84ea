"""Tests for objective specifications and families."""

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from essrate.errors import DimensionMismatchError, MissingOptimumError, NonSmoothPointError
from essrate.objective import (
    ObjectiveKind,
    ObjectiveSpec,
    custom,
    power_hinge,
    quadratic,
    quartic,
    random_quadratics,
    tmm_witness,
    witness_quadratic,
)


def fd_hessian_eigs(f: ObjectiveSpec, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Descending spectrum of the central-difference Jacobian of grad f."""
    hess = np.empty((f.dim, f.dim))
    for i in range(f.dim):
        e = np.zeros(f.dim)
        e[i] = step
        hess[:, i] = (f.grad(x + e) - f.grad(x - e)) / (2.0 * step)
    return np.sort(np.linalg.eigvalsh(0.5 * (hess + hess.T)))[::-1]


class TestQuadratic:
    """Tests for diagonal quadratics."""

    def test_eval_grad_hessian(self) -> None:
        """Test the closed forms against hand computation."""
        f = quadratic([10.0, 1.0])
        x = np.array([1.0, 2.0])

        assert f.eval(x) == pytest.approx(0.5 * (10.0 + 4.0))
        assert f.grad(x) == pytest.approx([10.0, 2.0])
        assert np.array_equal(f.hessian(x), np.diag([10.0, 1.0]))

    def test_eigenvalues_follow_coordinates(self) -> None:
        """Test that each coordinate keeps its own curvature."""
        f = quadratic([1.0, 10.0])

        assert f.grad(np.ones(2)) == pytest.approx([1.0, 10.0])
        assert f.hessian_eigs(np.zeros(2)) == pytest.approx([10.0, 1.0])

    def test_default_constants(self) -> None:
        """Test that mu and ell default to the spectrum extremes."""
        f = quadratic([3.0, 0.5, 2.0])

        assert f.mu == 0.5
        assert f.ell == 3.0
        assert f.optimum()[1] == 0.0

    def test_rejects_negative_eigenvalue(self) -> None:
        """Test that a nonconvex quadratic is rejected."""
        with pytest.raises(ValueError, match="nonnegative"):
            quadratic([1.0, -1.0])

    def test_rejects_mu_above_ell(self) -> None:
        """Test the mu <= ell constraint."""
        with pytest.raises(ValueError, match="exceeds"):
            quadratic([1.0], mu=2.0, ell=1.0)

    def test_rejects_spectrum_outside_bounds(self) -> None:
        """Test that the spectrum must lie in [mu, ell]."""
        with pytest.raises(ValueError, match="above ell"):
            quadratic([5.0], mu=0.0, ell=1.0)

    def test_dimension_mismatch(self) -> None:
        """Test that vectors of the wrong length are rejected."""
        with pytest.raises(DimensionMismatchError):
            quadratic([1.0, 2.0]).eval(np.ones(3))

    @given(st.lists(st.floats(min_value=0.1, max_value=100.0), min_size=1, max_size=6))
    def test_gradient_is_hessian_times_x(self, eigs: list[float]) -> None:
        """Test grad f(x) = H x for arbitrary spectra."""
        f = quadratic(eigs)
        x = np.linspace(-1.0, 1.0, len(eigs))

        assert f.grad(x) == pytest.approx(f.hessian(x) @ x)


class TestQuartic:
    """Tests for the quartic objective."""

    def test_derivatives(self) -> None:
        """Test the quartic closed forms."""
        f = quartic(2)
        x = np.array([1.0, -2.0])

        assert f.eval(x) == pytest.approx(0.25 * (1.0 + 16.0))
        assert f.grad(x) == pytest.approx([1.0, -8.0])
        assert f.hessian_eigs(x) == pytest.approx([12.0, 3.0])

    def test_smoothness_on_ball(self) -> None:
        """Test that ell bounds the curvature on the initial ball."""
        f = quartic(1, radius_R=2.0)

        assert f.mu == 0.0
        assert f.ell == pytest.approx(12.0)

    @given(st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=1, max_size=4))
    def test_hessian_eigs_match_finite_differences(self, xs: list[float]) -> None:
        """Test the analytic spectrum against differenced gradients."""
        f = quartic(len(xs))
        x = np.array(xs)

        assert f.hessian_eigs(x) == pytest.approx(fd_hessian_eigs(f, x), rel=1e-5, abs=1e-8)


class TestPowerHinge:
    """Tests for the |x|^c family with a linear tail."""

    def test_continuity_at_kink(self) -> None:
        """Test that value and slope match across |x| = 1."""
        f = power_hinge(4.0)
        inside, outside = np.array([1.0 - 1e-9]), np.array([1.0 + 1e-9])

        assert f.eval(inside) == pytest.approx(f.eval(outside), rel=1e-6)
        assert f.grad(inside) == pytest.approx(f.grad(outside), rel=1e-6)

    def test_hessian_at_kink_raises(self) -> None:
        """Test that the Hessian is undefined on the kink."""
        f = power_hinge(6.0)

        with pytest.raises(NonSmoothPointError):
            f.hessian(np.array([-1.0]))

    def test_linear_tail_has_zero_curvature(self) -> None:
        """Test that the tail is affine."""
        assert power_hinge(6.0).hessian(np.array([2.0]))[0, 0] == 0.0

    def test_curvature_bounded_by_ell(self) -> None:
        """Test that the Hessian stays in [0, ell] on [-2, 2] away from the kinks."""
        f = power_hinge(10.0, ell=3.0)
        xs = np.linspace(-2.0, 2.0, 400)

        assert max(f.hessian(np.array([x]))[0, 0] for x in xs) <= 3.0 + 1e-12

    @given(
        c=st.sampled_from([4.0, 6.0, 10.0]),
        x=st.floats(min_value=-2.0, max_value=2.0),
    )
    def test_hessian_eigs_match_finite_differences(self, c: float, x: float) -> None:
        """Test the analytic curvature against differenced gradients off the kinks."""
        assume(abs(abs(x) - 1.0) > 1e-3)
        f = power_hinge(c)
        point = np.array([x])

        assert f.hessian_eigs(point) == pytest.approx(fd_hessian_eigs(f, point), rel=1e-5, abs=1e-8)

    def test_rejects_small_exponent(self) -> None:
        """Test the c > 3 constraint."""
        with pytest.raises(ValueError, match="greater than 3"):
            power_hinge(2.5)


class TestCustom:
    """Tests for user-supplied objectives."""

    def test_finite_difference_derivatives(self) -> None:
        """Test that missing derivatives come from finite differences."""
        f = custom(lambda x: float(np.sum(np.cosh(x))), dim=2, optimum=((0.0, 0.0), 2.0))
        x = np.array([0.3, -0.2])

        assert f.kind is ObjectiveKind.CUSTOM
        assert f.grad(x) == pytest.approx(np.sinh(x), rel=1e-6)
        assert f.hessian(x) == pytest.approx(np.diag(np.cosh(x)), rel=1e-4, abs=1e-6)

    def test_supplied_gradient_is_used(self) -> None:
        """Test that a supplied gradient takes precedence."""
        f = custom(lambda x: float(x @ x), dim=1, grad=lambda x: 7.0 * np.ones(1))

        assert f.grad(np.zeros(1)) == pytest.approx([7.0])

    def test_missing_optimum(self) -> None:
        """Test that a custom objective without an optimum cannot report one."""
        f = custom(lambda x: float(x @ x), dim=1)

        with pytest.raises(MissingOptimumError):
            f.optimum()

    def test_needs_function(self) -> None:
        """Test that a custom objective without a callable is rejected."""
        with pytest.raises(ValueError, match="custom_fn"):
            ObjectiveSpec(kind=ObjectiveKind.CUSTOM)


class TestFamilies:
    """Tests for seeded families and witnesses."""

    def test_random_quadratics_are_deterministic(self) -> None:
        """Test that the family depends only on the seed."""
        first = random_quadratics(5, 3, 1.0, 10.0, seed=7)
        second = random_quadratics(5, 3, 1.0, 10.0, seed=7)

        assert [f.quadratic_eigs for f in first] == [f.quadratic_eigs for f in second]
        assert all(1.0 <= lam <= 10.0 for f in first for lam in f.quadratic_eigs)

    def test_witness_quadratic(self) -> None:
        """Test that the witness carries the full curvature L."""
        f = witness_quadratic(3, 10.0, mu=1.0)

        assert f.quadratic_eigs == (10.0, 10.0, 10.0)
        assert f.mu == 1.0

    def test_tmm_witness_branches(self) -> None:
        """Test that the witness picks the dominant spectral branch."""
        assert tmm_witness(1, 1.0, 10.0).quadratic_eigs == (10.0,)
        assert tmm_witness(1, 1.0, 1.5).quadratic_eigs == (1.0,)
