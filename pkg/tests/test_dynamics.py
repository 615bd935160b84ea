"""Tests for the rescaled optimizer ODE models."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from essrate.dynamics import (
    DynamicsSpec,
    MetricKind,
    ModelKind,
    Rescaling,
    RescalingKind,
    dense_eigs,
    finite_difference_jacobian,
    gradient_flow_solution,
    one_essential_rescaling,
    shifted_limit_radius,
    verify_equivalence,
)
from essrate.errors import (
    DimensionMismatchError,
    MetricUnavailableError,
    NonSmoothPointError,
    SingularTimeError,
)
from essrate.objective import power_hinge, quadratic, quartic

MU, ELL = 1.0, 10.0


def make(model: ModelKind, rescaling: Rescaling | None = None) -> DynamicsSpec:
    """Dynamics on a fixed two-dimensional quadratic in S(1, 10)."""
    return DynamicsSpec(
        model=model,
        objective=quadratic([ELL, 3.0], mu=MU, ell=ELL),
        rescaling=rescaling or Rescaling.identity(),
        shift_b=0.4 if model is ModelKind.AGM_SHIFTED else None,
    )


def sample_state(dynamics: DynamicsSpec) -> np.ndarray:
    return np.linspace(-1.0, 2.0, dynamics.state_dim)


class TestDynamicsSpec:
    """Tests for construction and state handling."""

    def test_strong_models_need_mu(self) -> None:
        """Test that strongly convex models reject mu = 0."""
        with pytest.raises(ValueError, match="strongly convex"):
            DynamicsSpec(model=ModelKind.TMM, objective=quadratic([1.0], mu=0.0))

    def test_shifted_needs_b(self) -> None:
        """Test that the shifted model needs shift_b."""
        with pytest.raises(ValueError, match="shift_b"):
            DynamicsSpec(model=ModelKind.AGM_SHIFTED, objective=quadratic([1.0]))

    def test_initial_state(self) -> None:
        """Test that momentum models start from (x0, x0)."""
        dynamics = make(ModelKind.AGM_CONVEX)

        assert dynamics.initial_state(np.array([1.0, 2.0])) == pytest.approx([1, 2, 1, 2])
        assert make(ModelKind.GRADIENT_FLOW).initial_state(np.ones(2)).shape == (2,)
        assert dynamics.t_start == pytest.approx(1e-3)
        assert make(ModelKind.TMM).t_start == 0.0

    def test_state_dimension_checked(self) -> None:
        """Test that a state of the wrong length is rejected."""
        with pytest.raises(DimensionMismatchError):
            make(ModelKind.AGM_STRONG).vector_field(np.ones(3), 1.0)

    def test_singular_time(self) -> None:
        """Test that the 1/alpha models are singular at alpha = 0."""
        with pytest.raises(SingularTimeError):
            make(ModelKind.AGM_CONVEX).vector_field(np.ones(4), 0.0)


class TestJacobian:
    """Tests for Jacobians and their closed-form spectra."""

    @pytest.mark.parametrize("model", list(ModelKind))
    def test_closed_form_matches_dense(self, model: ModelKind) -> None:
        """Test closed-form eigenvalues against the dense eigensolver."""
        dynamics = make(model, Rescaling.power_law(1.5, 0.3))
        y, t = sample_state(dynamics), 2.0

        closed = np.poly(dynamics.jacobian_eigs(y, t))
        dense = np.poly(dense_eigs(dynamics.jacobian(y, t)))

        assert closed == pytest.approx(dense, rel=1e-8, abs=1e-8)

    @settings(max_examples=200)
    @given(
        model=st.sampled_from(list(ModelKind)),
        eigs=st.lists(st.floats(min_value=MU, max_value=ELL), min_size=1, max_size=3),
        rescaling=st.sampled_from(
            [Rescaling.identity(), Rescaling.linear(0.5), Rescaling.power_law(1.5, 0.3)]
        ),
        t=st.floats(min_value=0.5, max_value=50.0),
    )
    def test_closed_form_matches_dense_everywhere(
        self, model: ModelKind, eigs: list[float], rescaling: Rescaling, t: float
    ) -> None:
        """Test the closed-form spectrum on random models, quadratics and times."""
        dynamics = DynamicsSpec(
            model=model,
            objective=quadratic(eigs, mu=MU, ell=ELL),
            rescaling=rescaling,
            shift_b=0.4 if model is ModelKind.AGM_SHIFTED else None,
        )
        y = sample_state(dynamics)

        # characteristic polynomials stay well conditioned at critical damping
        closed = np.poly(dynamics.jacobian_eigs(y, t))
        dense = np.poly(dense_eigs(dynamics.jacobian(y, t)))

        assert closed == pytest.approx(dense, rel=1e-8, abs=1e-8)

    @pytest.mark.parametrize("model", list(ModelKind))
    def test_jacobian_matches_finite_differences(self, model: ModelKind) -> None:
        """Test the exact Jacobian against central differences."""
        dynamics = make(model)
        y, t = sample_state(dynamics), 1.5

        assert dynamics.jacobian(y, t) == pytest.approx(
            finite_difference_jacobian(dynamics, y, t), abs=1e-6
        )

    def test_gradient_flow_spectrum(self) -> None:
        """Test that the gradient-flow spectrum is -alpha' times the Hessian's."""
        dynamics = make(ModelKind.GRADIENT_FLOW, Rescaling.linear(0.5))

        eigs = dynamics.jacobian_eigs(np.ones(2), 3.0)

        assert sorted(eigs.real) == pytest.approx([-5.0, -1.5])
        assert dynamics.spectral_radius(np.ones(2), 3.0) == pytest.approx(5.0)

    def test_kink_raises(self) -> None:
        """Test that the power hinge has no Jacobian on its kink."""
        dynamics = DynamicsSpec(model=ModelKind.AGM_CONVEX, objective=power_hinge(4.0))

        with pytest.raises(NonSmoothPointError):
            dynamics.jacobian_eigs(np.array([1.0, 1.0]), 1.0)


class TestRescaledDynamics:
    """Tests for rescaling and equivalence."""

    @pytest.mark.parametrize("model", list(ModelKind))
    def test_rescaled_is_equivalent(self, model: ModelKind) -> None:
        """Test g_alpha(y, t) = alpha'(t) g(y, alpha(t))."""
        base = make(model)
        alpha = Rescaling.power_law(2.0, 0.5)
        rng = np.random.default_rng(1)
        samples = [(rng.normal(size=base.state_dim), t) for t in (0.5, 1.0, 4.0)]

        assert verify_equivalence(base.rescaled(alpha), base, alpha, samples)

    def test_equivalence_detects_mismatch(self) -> None:
        """Test that a wrong time map is rejected."""
        base = make(ModelKind.GRADIENT_FLOW)
        rescaled = base.rescaled(Rescaling.linear(2.0))
        samples = [(np.ones(2), 1.0)]

        assert not verify_equivalence(rescaled, base, Rescaling.linear(3.0), samples)

    def test_equivalence_dimension_mismatch(self) -> None:
        """Test that dynamics of different state sizes are not equivalent."""
        samples = [(np.ones(2), 1.0)]

        assert not verify_equivalence(
            make(ModelKind.GRADIENT_FLOW), make(ModelKind.AGM_STRONG), Rescaling.identity(), samples
        )

    def test_rescaling_composes(self) -> None:
        """Test that rescaling a rescaled model composes the clocks."""
        dynamics = make(ModelKind.GRADIENT_FLOW, Rescaling.linear(2.0)).rescaled(
            Rescaling.linear(3.0)
        )

        assert dynamics.rescaling == Rescaling.linear(6.0)

    def test_gradient_flow_solution(self) -> None:
        """Test the closed-form solution of the rescaled gradient flow."""
        f = quadratic([2.0])

        x = gradient_flow_solution(f, np.ones(1), Rescaling.linear(0.5), 3.0)

        assert x == pytest.approx([math.exp(-3.0)])
        assert gradient_flow_solution(quartic(), np.ones(1), Rescaling.identity(), 4.0) == (
            pytest.approx([1.0 / 3.0])
        )


class TestOneEssential:
    """Tests for the normalising rescalings."""

    def test_table(self) -> None:
        """Test the tabulated 1-essential rescalings."""
        f = quadratic([ELL], mu=MU, ell=ELL)

        assert one_essential_rescaling(ModelKind.GRADIENT_FLOW, f) == Rescaling.linear(0.1)
        assert one_essential_rescaling(ModelKind.AGM_CONVEX, f) == Rescaling.power_law(2.0, 0.1)
        assert one_essential_rescaling(ModelKind.AGM_STRONG, f).rate == pytest.approx(
            1.0 / math.sqrt(ELL)
        )
        assert one_essential_rescaling(ModelKind.TMM, f).rate == pytest.approx(
            1.0 / math.sqrt(20.0)
        )
        assert one_essential_rescaling(ModelKind.GRADIENT_FLOW, quartic()).kind is (
            RescalingKind.EXP23
        )

    def test_shifted_needs_b(self) -> None:
        """Test that the shifted rescaling depends on b."""
        with pytest.raises(ValueError):
            one_essential_rescaling(ModelKind.AGM_SHIFTED, quadratic([1.0]))

    @pytest.mark.parametrize("model", list(ModelKind))
    def test_witness_radius_tends_to_one(self, model: ModelKind) -> None:
        """Test that the normalised worst-case radius approaches 1 at late times."""
        f = quadratic([ELL], mu=MU, ell=ELL)
        shift_b = 2.0 / math.sqrt(ELL) if model is ModelKind.AGM_SHIFTED else None
        dynamics = DynamicsSpec(
            model=model,
            objective=f,
            rescaling=one_essential_rescaling(model, f, shift_b),
            shift_b=shift_b,
        )
        y = dynamics.initial_state(np.ones(1))

        assert dynamics.spectral_radius(y, 1e8) == pytest.approx(1.0, abs=1e-3)

    def test_shifted_limit_radius_branches(self) -> None:
        """Test both branches of the shifted limit radius."""
        assert shifted_limit_radius(0.1, 4.0, 1.0) == pytest.approx(2.0)
        assert shifted_limit_radius(2.0, 4.0, 1.0) == pytest.approx(0.5 * (8.0 + math.sqrt(48.0)))

    @given(
        b=st.floats(min_value=0.05, max_value=3.0),
        ell=st.floats(min_value=1.0, max_value=20.0),
        a=st.floats(min_value=0.5, max_value=2.0),
    )
    def test_shifted_limit_radius_matches_eigenvalues(self, b: float, ell: float, a: float) -> None:
        """Test the limit radius against dense eigenvalues at a late time."""
        # the two branches meet at b = 2/sqrt(L), where the spectrum is defective
        assume(abs(b * math.sqrt(ell) - 2.0) > 0.05)
        dynamics = DynamicsSpec(
            model=ModelKind.AGM_SHIFTED,
            objective=quadratic([ell, ell / 4.0, ell / 16.0]),
            rescaling=Rescaling.linear(a),
            shift_b=b,
        )
        y = dynamics.initial_state(np.ones(3))

        numeric = float(np.max(np.abs(dense_eigs(dynamics.jacobian(y, 1e8 / a)))))

        assert numeric == pytest.approx(shifted_limit_radius(b, ell, a), rel=1e-5)


class TestMetrics:
    """Tests for convergence metrics."""

    def test_gap_and_dist(self) -> None:
        """Test the gap and distance at a known point."""
        dynamics = make(ModelKind.AGM_CONVEX)
        y = np.array([1.0, 1.0, 5.0, 5.0])

        assert dynamics.metric(MetricKind.GAP, y, 1.0) == pytest.approx(0.5 * (ELL + 3.0))
        assert dynamics.metric(MetricKind.DIST, y, 1.0) == pytest.approx(math.sqrt(2.0))

    def test_model_specific_metrics(self) -> None:
        """Test that model-specific metrics are refused elsewhere."""
        with pytest.raises(MetricUnavailableError, match="agm_shifted"):
            make(ModelKind.AGM_CONVEX).metric(MetricKind.MIN_SHIFTED_GRAD_SQ, np.ones(4), 1.0)
        with pytest.raises(MetricUnavailableError, match="tmm"):
            make(ModelKind.AGM_STRONG).metric(MetricKind.TMM_DIST, np.ones(4), 1.0)

    def test_min_shifted_grad_is_running_minimum(self) -> None:
        """Test that the shifted-gradient metric never increases."""
        dynamics = make(ModelKind.AGM_SHIFTED)
        y = sample_state(dynamics)

        fresh = dynamics.metric(MetricKind.MIN_SHIFTED_GRAD_SQ, y, 2.0)

        assert fresh > 0.0
        assert dynamics.metric(MetricKind.MIN_SHIFTED_GRAD_SQ, y, 2.0, fresh / 2) == fresh / 2

    def test_tmm_dist_at_rest(self) -> None:
        """Test that the TMM distance reduces to ||x - x*||^2 when v = x."""
        dynamics = make(ModelKind.TMM)
        y = np.array([0.0, 0.0, 0.0, 0.0])

        assert dynamics.metric(MetricKind.TMM_DIST, y, 1.0) == pytest.approx(0.0)

    def test_available_metrics(self) -> None:
        """Test the per-model metric lists."""
        assert MetricKind.MIN_SHIFTED_GRAD_SQ in make(ModelKind.AGM_SHIFTED).available_metrics()
        assert MetricKind.TMM_DIST in make(ModelKind.TMM).available_metrics()
        assert make(ModelKind.GRADIENT_FLOW).available_metrics() == [
            MetricKind.GAP,
            MetricKind.DIST,
        ]
