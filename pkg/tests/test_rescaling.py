"""Tests for time-rescalings and connecting maps."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from essrate.dynamics import ConnectingMap, Rescaling, RescalingKind

RESCALINGS = [
    Rescaling.identity(),
    Rescaling.linear(0.1),
    Rescaling.power_law(2.0, 0.1),
    Rescaling.power_law(0.5),
    Rescaling.exp23(),
    Rescaling.log_slip(2.0),
    Rescaling.power_law(2.0).compose(Rescaling.log_slip(1.0)),
]


class TestRescaling:
    """Tests for the Rescaling model."""

    @pytest.mark.parametrize("alpha", RESCALINGS, ids=lambda a: a.label)
    def test_is_admissible(self, alpha: Rescaling) -> None:
        """Test alpha(0) = 0 with positive, growing slope."""
        assert alpha.validate_samples()

    @pytest.mark.parametrize("alpha", RESCALINGS, ids=lambda a: a.label)
    def test_derivative_matches_difference_quotient(self, alpha: Rescaling) -> None:
        """Test alpha' against a central difference."""
        t, h = 1.7, 1e-6
        quotient = (alpha.value(t + h) - alpha.value(t - h)) / (2.0 * h)

        assert alpha.derivative(t) == pytest.approx(quotient, rel=1e-6)

    @pytest.mark.parametrize("alpha", RESCALINGS, ids=lambda a: a.label)
    def test_second_derivative_matches_difference_quotient(self, alpha: Rescaling) -> None:
        """Test alpha'' against a central difference of alpha'."""
        t, h = 1.7, 1e-5
        quotient = (alpha.derivative(t + h) - alpha.derivative(t - h)) / (2.0 * h)

        assert alpha.second_derivative(t) == pytest.approx(quotient, rel=1e-5, abs=1e-9)

    @pytest.mark.parametrize("alpha", RESCALINGS, ids=lambda a: a.label)
    @given(t=st.floats(min_value=0.0, max_value=50.0))
    def test_inverse(self, alpha: Rescaling, t: float) -> None:
        """Test alpha^{-1}(alpha(t)) = t."""
        assert alpha.inverse(alpha.value(t)) == pytest.approx(t, rel=1e-8, abs=1e-8)

    def test_inverse_rejects_negative(self) -> None:
        """Test that rescalings are only inverted on [0, inf)."""
        with pytest.raises(ValueError):
            Rescaling.linear(2.0).inverse(-1.0)

    def test_power_slope_at_zero(self) -> None:
        """Test the one-sided slope of power laws at the origin."""
        assert Rescaling.power_law(2.0).derivative(0.0) == 0.0
        assert Rescaling.power_law(1.0, 3.0).derivative(0.0) == 3.0
        assert math.isinf(Rescaling.power_law(0.5).derivative(0.0))

    def test_compose_simplifies(self) -> None:
        """Test closed-form compositions."""
        assert Rescaling.linear(2.0).compose(Rescaling.linear(3.0)) == Rescaling.linear(6.0)
        assert Rescaling.power_law(2.0, 0.5).compose(Rescaling.linear(3.0)) == (
            Rescaling.power_law(2.0, 4.5)
        )
        assert Rescaling.identity().compose(Rescaling.exp23()) == Rescaling.exp23()

    def test_compose_general(self) -> None:
        """Test that other compositions evaluate as outer(inner(t))."""
        outer, inner = Rescaling.exp23(), Rescaling.log_slip(2.0)
        composed = outer.compose(inner)

        assert composed.kind is RescalingKind.COMPOSED
        assert composed.value(3.0) == pytest.approx(outer.value(inner.value(3.0)))

    def test_composed_needs_parts(self) -> None:
        """Test that an empty composition is rejected."""
        with pytest.raises(ValueError, match="outer and inner"):
            Rescaling(kind=RescalingKind.COMPOSED)

    def test_log_slip_slope(self) -> None:
        """Test that the log-slip slope approaches its ratio from below."""
        alpha = Rescaling.log_slip(2.0)

        assert alpha.derivative(1e6) == pytest.approx(2.0, abs=1e-5)
        assert alpha.derivative(1e6) < 2.0

    def test_json_round_trip(self) -> None:
        """Test that nested compositions survive serialization."""
        alpha = Rescaling.exp23().compose(Rescaling.log_slip(2.0))

        assert Rescaling.model_validate_json(alpha.model_dump_json()) == alpha


class TestConnectingMap:
    """Tests for the map between two rescaled clocks."""

    def test_linear_to_linear(self) -> None:
        """Test that linear clocks connect by their rate ratio."""
        alpha = ConnectingMap(Rescaling.linear(0.5), Rescaling.linear(0.1))

        assert alpha.value(10.0) == pytest.approx(50.0)
        assert alpha.derivative(10.0) == pytest.approx(5.0)
        assert alpha.inverse(50.0) == pytest.approx(10.0)

    def test_power_to_linear(self) -> None:
        """Test that a power clock maps through the target's inverse."""
        alpha = ConnectingMap(Rescaling.power_law(2.0), Rescaling.linear(0.1))

        assert alpha.value(3.0) == pytest.approx(90.0)
        assert alpha.derivative(3.0) == pytest.approx(60.0)
