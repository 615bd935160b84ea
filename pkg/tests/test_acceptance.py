"""Reference experiments run through the public API.

The long-running ones are marked ``slow``; deselect them with ``-m "not slow"``.
"""

import math
from pathlib import Path

import numpy as np
import pytest

from essrate.cli import reproduce
from essrate.cli.reproduce import CriterionResult
from essrate.dynamics import ModelKind, Rescaling
from essrate.errors import EssrateError


class TestFastCriteria:
    """Criteria that finish in well under a second."""

    def test_exact_discrete_rate(self) -> None:
        """Test Euler against (1 - h lambda)^k to 1e-12."""
        result = reproduce.criterion_exact_discrete_rate()

        assert result.passed, result.measured
        assert result.measured["iterate_rel_err"] <= 1e-12

    def test_agm_rate(self) -> None:
        """Test Gap(t) <= 2 L / t^2 for the accelerated ODE."""
        result = reproduce.criterion_agm_rate()

        assert result.passed, result.measured

    def test_optimal_b(self) -> None:
        """Test the optimal gradient shift b = 2 and coefficient 9/7."""
        result = reproduce.criterion_optimal_b()

        assert result.passed, result.measured
        assert result.measured["coefficient"] == pytest.approx(9.0 / 7.0, abs=1e-6)

    def test_slope_limit(self) -> None:
        """Test the log-slip slope limit."""
        assert reproduce.criterion_slope_limit().passed

    def test_reformulation(self) -> None:
        """Test the shared spectral moduli of both AGM forms."""
        standard, transformed = reproduce.reformulation_moduli(100.0)

        assert np.max(np.abs(standard - transformed)) <= 1e-4
        assert reproduce.criterion_reformulation().passed

    def test_tmm_factor(self) -> None:
        """Test the sqrt(2) advantage of triple momentum."""
        q_tmm, q_strong = reproduce.strongly_convex_rates()

        assert q_tmm / math.sqrt(0.01) == pytest.approx(math.sqrt(2.0), rel=0.05)
        assert q_strong >= math.sqrt(0.01)


@pytest.mark.slow
class TestSlowCriteria:
    """Criteria that integrate long horizons or large families."""

    @pytest.mark.parametrize(
        "rescaling",
        [
            Rescaling.linear(0.1),
            Rescaling.linear(1.0),
            Rescaling.linear(10.0),
            Rescaling.power_law(2.0),
            Rescaling.power_law(3.0),
        ],
        ids=lambda rescaling: rescaling.label,
    )
    def test_cancellation(self, rescaling: Rescaling) -> None:
        """Test alpha(t_k)/k -> 2 for linear and power rescalings."""
        lo, hi, fraction = reproduce.cancellation_ratios(rescaling)

        assert 1.9 <= lo <= hi <= 2.05
        assert fraction == 1.0

    def test_cancellation_ignores_linear_rate(self) -> None:
        """Test that the linear rates agree within 1%."""
        result = reproduce.criterion_cancellation()

        assert result.passed, result.measured
        assert result.measured["linear_spread"] <= 0.01

    def test_quartic(self) -> None:
        """Test the 1/t^2 flow rate and the Armijo advantage."""
        result = reproduce.criterion_quartic()

        assert result.passed, result.measured
        assert result.measured["power_exponent"] == pytest.approx(2.0, abs=0.05)

    @pytest.mark.parametrize("model", list(ModelKind))
    def test_one_essential(self, model: ModelKind) -> None:
        """Test c = 1 for the normalised models."""
        result = reproduce.criterion_one_essential([model])

        assert result.passed, result.detail
        assert result.measured[f"c_{model.value}"] == pytest.approx(1.0, abs=1e-2)

    @pytest.mark.parametrize("c", [4.0, 6.0, 10.0])
    def test_power_hinge(self, c: float) -> None:
        """Test the 2c/(c - 2) exponent of the power family."""
        exponent, flagged = reproduce.power_hinge_exponent(c)

        assert exponent == pytest.approx(2.0 * c / (c - 2.0), rel=0.05)
        assert isinstance(flagged, list)


class TestReports:
    """Tests for the reproduce-paper report writers."""

    @pytest.fixture
    def results(self) -> list[CriterionResult]:
        """One passing and one failing criterion."""
        return [
            CriterionResult(
                key="AC-1",
                title="first",
                passed=True,
                measured={"err": 1e-14},
                expected="err <= 1e-12",
            ),
            CriterionResult(key="AC-2", title="second", passed=False, detail="DivergedError: x"),
        ]

    def test_markdown(self, results: list[CriterionResult]) -> None:
        """Test the summary line, the table and the details section."""
        text = reproduce.report_markdown(results)

        assert "1 of 2 criteria passed." in text
        assert "| AC-1 | first | pass | err=1e-14 | err <= 1e-12 | 0.00 |" in text
        assert "- AC-2: DivergedError: x" in text

    def test_csv(self, results: list[CriterionResult]) -> None:
        """Test one row per criterion."""
        lines = reproduce.report_csv(results).splitlines()

        assert lines[0] == "key,title,passed,seconds,measured,detail"
        assert lines[2].startswith("AC-2,second,False,0.000,")

    def test_failing_criterion_is_captured(self) -> None:
        """Test that library errors become failed results."""

        def broken() -> CriterionResult:
            raise EssrateError("boom")

        result = reproduce.run_criterion(4, broken)

        assert result.key == "AC-5"
        assert not result.passed
        assert "boom" in result.detail

    def test_write_reports(self, results: list[CriterionResult], tmp_path: Path) -> None:
        """Test that the report directory gets the markdown, CSV and plot."""
        reproduce.write_reports(results, tmp_path / "reports")

        assert (tmp_path / "reports" / "report.md").exists()
        assert (tmp_path / "reports" / "criteria.csv").exists()
        assert (tmp_path / "reports" / "agm_gap.svg").read_text().startswith("<svg")
