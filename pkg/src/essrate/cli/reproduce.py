"""Reference experiments with pass/fail criteria, run by ``essrate reproduce-paper``.

Each ``criterion_*`` function runs one experiment end to end through the
public API and returns a :class:`CriterionResult`. Failures of the library
(validation or integration errors) are reported as failed criteria.
"""

import csv
import io
import logging
import math
import time
from collections.abc import Callable
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from essrate.analysis import (
    RateKind,
    essential_check,
    fit_trajectory_rate,
    rescaling_slope_limit,
    shifted_b_sweep,
    theorem_bound_check,
)
from essrate.cli.svg import line_plot
from essrate.dynamics import (
    ConnectingMap,
    DynamicsSpec,
    MetricKind,
    ModelKind,
    Rescaling,
    agm_convex_coefficients,
    agm_convex_transform,
    one_essential_rescaling,
    reformulate,
    standard_form,
)
from essrate.errors import EssrateError
from essrate.integrate import StepPolicy, StopRule, Trajectory, run, run_armijo
from essrate.objective import (
    ObjectiveSpec,
    power_hinge,
    quadratic,
    quartic,
    random_quadratics,
    tmm_witness,
    witness_quadratic,
)
from essrate.stability import EULER, RK4, domain_radius

logger = logging.getLogger(__name__)

MU = 1.0
ELL = 10.0
FAMILY_SIZE = 50
FAMILY_DIM = 2
FAMILY_SEED = 0


class CriterionResult(BaseModel):
    """Outcome of one reference experiment."""

    key: str = Field(..., description="Criterion identifier, e.g. AC-1")
    title: str
    passed: bool
    measured: dict[str, float] = Field(default_factory=dict)
    expected: str = Field(default="", description="Human readable pass condition")
    detail: str = ""
    seconds: float = 0.0


def criterion_exact_discrete_rate() -> CriterionResult:
    """Euler with h = 2/(L + mu) on a diagonal quadratic reproduces (1 - h lambda)^k exactly."""
    eigs = np.array([ELL, MU])
    h = 2.0 / (ELL + MU)
    x0 = np.ones(2)
    dynamics = DynamicsSpec(model=ModelKind.GRADIENT_FLOW, objective=quadratic(eigs))
    traj = run(EULER, dynamics, x0, StepPolicy.fixed(h), StopRule(max_steps=200))

    sigma = 1.0 - 2.0 * MU / (ELL + MU)
    gap0 = traj[0].phi[MetricKind.GAP]
    iterate_err = envelope_err = 0.0
    for record in traj.records:
        exact = (1.0 - h * eigs) ** record.k * x0
        iterate_err = max(iterate_err, float(np.max(np.abs(record.y - exact) / np.abs(exact))))
        envelope = gap0 * sigma ** (2 * record.k)
        envelope_err = max(envelope_err, abs(record.phi[MetricKind.GAP] - envelope) / envelope)
    return CriterionResult(
        key="AC-1",
        title="Exact discrete rate of Euler on a quadratic",
        passed=iterate_err <= 1e-12 and envelope_err <= 1e-12,
        measured={"iterate_rel_err": iterate_err, "envelope_rel_err": envelope_err},
        expected="relative errors <= 1e-12 over 200 steps",
    )


def _essential_family(model: ModelKind) -> tuple[DynamicsSpec, list[ObjectiveSpec]]:
    family = random_quadratics(FAMILY_SIZE, FAMILY_DIM, MU, ELL, seed=FAMILY_SEED)
    if model is ModelKind.TMM:
        witness = tmm_witness(FAMILY_DIM, MU, ELL)
    else:
        witness = witness_quadratic(FAMILY_DIM, ELL, mu=MU)
    shift_b = 2.0 / math.sqrt(ELL) if model is ModelKind.AGM_SHIFTED else None
    template = DynamicsSpec(
        model=model,
        objective=witness,
        rescaling=one_essential_rescaling(model, witness, shift_b),
        shift_b=shift_b,
    )
    return template, [*family, witness]


def essential_horizon(model: ModelKind) -> float:
    """Horizon of the essential check; the shifted model approaches radius 1 like 1 + sqrt(2/t)."""
    return 4e4 if model is ModelKind.AGM_SHIFTED else 200.0


def criterion_one_essential(models: list[ModelKind] | None = None) -> CriterionResult:
    """Every model under its normalising rescaling is 1-essential over a sampled family."""
    measured = {}
    failures = []
    for model in models or list(ModelKind):
        template, family = _essential_family(model)
        verdict = essential_check(
            template,
            family,
            [np.ones(FAMILY_DIM)],
            RK4,
            tol=1e-2,
            horizon=essential_horizon(model),
            policy=StepPolicy.stability_capped(0.9),
            tail_frac=0.25,
        )
        measured[f"c_{model.value}"] = verdict.c_estimate
        if not verdict.is_one_essential:
            failures.append(f"{template.label}: c={verdict.c_estimate:.6g}")
        failures.extend(verdict.failures)
    return CriterionResult(
        key="AC-2",
        title="1-essentiality of the normalised models",
        passed=not failures,
        measured=measured,
        expected="|c - 1| <= 1e-2 for every model",
        detail="; ".join(failures),
    )


def agm_convex_trajectory() -> Trajectory:
    """AgmConvex with alpha = t^2/L on (L/2) x^2 from x0 = 1."""
    objective = quadratic([ELL])
    dynamics = DynamicsSpec(
        model=ModelKind.AGM_CONVEX,
        objective=objective,
        rescaling=one_essential_rescaling(ModelKind.AGM_CONVEX, objective),
    )
    return run(
        RK4,
        dynamics,
        dynamics.initial_state(np.ones(1)),
        StepPolicy.stability_capped(0.25),
        StopRule(t_max=200.0),
    )


def criterion_agm_rate() -> CriterionResult:
    """The gap stays below 2 L ||x0 - x*||^2 / t^2 for t >= 1."""
    traj = agm_convex_trajectory()
    worst = 0.0
    for record in traj.records:
        if record.t >= 1.0:
            bound = 2.0 * ELL / record.t**2
            worst = max(worst, record.phi[MetricKind.GAP] / bound)
    return CriterionResult(
        key="AC-3",
        title="Essential rate of the accelerated gradient ODE",
        passed=0.0 < worst <= 1.0,
        measured={"max_gap_over_bound": worst},
        expected="Gap(t) <= 2 L ||x0 - x*||^2 / t^2 for t >= 1",
    )


def cancellation_ratios(rescaling: Rescaling) -> tuple[float, float, float]:
    """Run a rescaled gradient flow with Euler at safety 1 and return bound statistics.

    Returns:
        (min, max) of alpha(t_k)/k over k >= 100 and the fraction satisfying
        alpha(t_k) <= (r + 0.05) k, where alpha maps the run's time to the
        1-essential time.
    """
    objective = quadratic([ELL, MU])
    dynamics = DynamicsSpec(
        model=ModelKind.GRADIENT_FLOW, objective=objective, rescaling=rescaling
    )
    policy = StepPolicy.stability_capped(1.0)
    traj = run(EULER, dynamics, np.ones(2), policy, StopRule(max_steps=400))
    alpha = ConnectingMap(rescaling, one_essential_rescaling(ModelKind.GRADIENT_FLOW, objective))
    check = theorem_bound_check(traj, alpha, r=domain_radius(EULER), eps=0.05, k_min=100)
    ratios = [alpha.value(rec.t) / rec.k for rec in traj.records if rec.k >= 100]
    return min(ratios), max(ratios), check.fraction_satisfied


def criterion_cancellation() -> CriterionResult:
    """alpha(t_k)/k approaches the domain radius 2 whatever the rescaling."""
    rescalings = [Rescaling.linear(r0) for r0 in (0.1, 1.0, 10.0)]
    rescalings += [Rescaling.power_law(p) for p in (2.0, 3.0)]
    measured = {}
    passed = True
    linear_max = []
    for rescaling in rescalings:
        lo, hi, fraction = cancellation_ratios(rescaling)
        measured[f"min_ratio_{rescaling.label}"] = lo
        measured[f"max_ratio_{rescaling.label}"] = hi
        passed &= lo >= 1.9 and hi <= 2.05 and fraction == 1.0
        if rescaling.label.startswith("linear"):
            linear_max.append(hi)
    spread = (max(linear_max) - min(linear_max)) / min(linear_max)
    measured["linear_spread"] = spread
    return CriterionResult(
        key="AC-4",
        title="Cancellation of the rescaling under stability-capped steps",
        passed=passed and spread <= 0.01,
        measured=measured,
        expected="alpha(t_k)/k in [1.9, 2.05] for k >= 100, equal across r0 within 1%",
    )


def quartic_runs() -> tuple[Trajectory, Trajectory, Trajectory]:
    """The unrescaled quartic flow, a stability-capped Euler run and Armijo descent."""
    flow = DynamicsSpec(model=ModelKind.GRADIENT_FLOW, objective=quartic(1))
    x0 = np.ones(1)
    fine = run(RK4, flow, x0, StepPolicy.fixed(0.1), StopRule(t_max=500.0))
    capped = run(
        EULER,
        flow,
        x0,
        StepPolicy.stability_capped(0.25, h_cap=1e300),
        StopRule(max_steps=100),
    )
    armijo = run_armijo(
        flow,
        x0,
        StepPolicy.armijo(grow=2.0, shrink=0.5, slope_c=1e-4, h_init=0.1, h_cap=1e300),
        StopRule(max_steps=100),
    )
    return fine, capped, armijo


def criterion_quartic() -> CriterionResult:
    """Theta(1/t^2) flow rate, bounded discrete decay and the gain of growing steps."""
    fine, capped, armijo = quartic_runs()
    power = fit_trajectory_rate(fine, MetricKind.GAP, RateKind.POWER)
    linear_k = fit_trajectory_rate(capped, MetricKind.GAP, RateKind.LINEAR_K)
    capped_gap = capped.final.phi[MetricKind.GAP]
    armijo_gap = armijo.final.phi[MetricKind.GAP]
    passed = (
        abs(power.exponent - 2.0) <= 0.05
        and linear_k.exponent <= (4.0 / 3.0) * 2.0 * 1.05
        and armijo_gap * 10.0 <= capped_gap
    )
    return CriterionResult(
        key="AC-5",
        title="Quartic gradient flow and Armijo step growth",
        passed=passed,
        measured={
            "power_exponent": power.exponent,
            "linear_k_exponent": linear_k.exponent,
            "capped_gap_k100": capped_gap,
            "armijo_gap_k100": armijo_gap,
        },
        expected="p = 2 +- 0.05; -ln(sigma) <= 2.8; Armijo gap 10x smaller at k = 100",
    )


def strongly_convex_rates(mu: float = MU, ell: float = 100.0) -> tuple[float, float]:
    """Fitted exponential rates of TmmDist (tmm) and Gap (agm_strong), both 1-essential."""
    # On lambda = mu the TmmDist component decays at exactly twice the normalised slope.
    objective = quadratic([mu], mu=mu, ell=ell, name="lambda=mu")
    policy = StepPolicy.fixed(0.5)
    stop = StopRule(t_max=400.0)
    rates = []
    pairs = ((ModelKind.TMM, MetricKind.TMM_DIST), (ModelKind.AGM_STRONG, MetricKind.GAP))
    for model, metric in pairs:
        dynamics = DynamicsSpec(
            model=model,
            objective=objective,
            rescaling=one_essential_rescaling(model, objective),
        )
        traj = run(RK4, dynamics, dynamics.initial_state(np.ones(1)), policy, stop)
        rates.append(fit_trajectory_rate(traj, metric, RateKind.EXPONENTIAL).exponent)
    return rates[0], rates[1]


def criterion_tmm_factor() -> CriterionResult:
    """The triple-momentum rate beats the certified strongly convex AGM rate by sqrt(2)."""
    mu, ell = MU, 100.0
    certified = math.sqrt(mu / ell)
    q_tmm, q_strong = strongly_convex_rates(mu, ell)
    ratio = q_tmm / certified
    return CriterionResult(
        key="AC-6",
        title="Triple momentum versus strongly convex AGM",
        passed=abs(ratio - math.sqrt(2.0)) <= 0.05 * math.sqrt(2.0) and q_strong >= certified,
        measured={"q_tmm": q_tmm, "q_agm_strong": q_strong, "ratio": ratio},
        expected="q_tmm / sqrt(mu/L) = sqrt(2) +- 5%; q_agm_strong >= sqrt(mu/L)",
    )


def criterion_optimal_b() -> CriterionResult:
    """The shifted-gradient coefficient is minimal at b = 2/sqrt(L) with value 9 L^2 / 7."""
    grid = np.linspace(0.2, 10.0, 200)
    sweep = shifted_b_sweep(1.0, grid)
    step = float(grid[1] - grid[0])
    return CriterionResult(
        key="AC-7",
        title="Optimal gradient shift",
        passed=abs(sweep.b_grid_min - 2.0) <= step
        and abs(sweep.coefficient_refined - 9.0 / 7.0) <= 1e-6,
        measured={
            "b_grid_min": sweep.b_grid_min,
            "b_refined": sweep.b_refined,
            "coefficient": sweep.coefficient_refined,
        },
        expected="b within one grid step of 2; coefficient = 9/7 +- 1e-6",
    )


def criterion_slope_limit() -> CriterionResult:
    """The connecting rescaling of a log-slip pair has slope tending to the radius ratio."""
    limit = rescaling_slope_limit(Rescaling.log_slip(2.0), 1e6)
    return CriterionResult(
        key="AC-8",
        title="Slope limit of a connecting rescaling",
        passed=abs(limit - 2.0) <= 1e-5,
        measured={"slope_limit": limit},
        expected="2 +- 1e-5",
    )


def power_hinge_exponent(c: float) -> tuple[float, list[int]]:
    """Fitted power exponent of the gap of the 1-essential AgmConvex on |x|^c, and flagged steps."""
    objective = power_hinge(c, ell=1.0)
    dynamics = DynamicsSpec(
        model=ModelKind.AGM_CONVEX,
        objective=objective,
        rescaling=one_essential_rescaling(ModelKind.AGM_CONVEX, objective),
    )
    traj = run(
        RK4,
        dynamics,
        dynamics.initial_state(np.ones(1)),
        StepPolicy.stability_capped(0.2),
        StopRule(t_max=1e6),
    )
    # f* = 0, so the gap keeps full relative precision below the default floor.
    fit = fit_trajectory_rate(traj, MetricKind.GAP, RateKind.POWER, window=0.25, floor=0.0)
    return fit.exponent, traj.flagged_steps()


def criterion_power_hinge() -> CriterionResult:
    """The AGM rate on |x|^c is t^(-2c/(c-2)) and no better."""
    measured = {}
    passed = True
    for c in (4.0, 6.0, 10.0):
        exponent, _ = power_hinge_exponent(c)
        target = 2.0 * c / (c - 2.0)
        measured[f"exponent_c{c:g}"] = exponent
        passed &= abs(exponent - target) <= 0.05 * target
    return CriterionResult(
        key="AC-9",
        title="Tight exponent on the power family",
        passed=passed,
        measured=measured,
        expected="2c/(c-2) +- 5% for c in {4, 6, 10}",
    )


def reformulation_moduli(t: float = 100.0) -> tuple[np.ndarray, np.ndarray]:
    """Sorted Jacobian eigenvalue moduli of the (x, x') and (x, v) systems at time t."""
    objective = quadratic([1.0])
    alpha = Rescaling.power_law(2.0, 1.0 / objective.ell)
    a1, a2 = agm_convex_coefficients(alpha)
    standard = standard_form(a1, a2, objective)
    transformed = reformulate(a1, a2, agm_convex_transform(alpha), objective)
    y = np.zeros(2)
    return (
        np.sort(np.abs(standard.jacobian_eigs(y, t))),
        np.sort(np.abs(transformed.jacobian_eigs(y, t))),
    )


def criterion_reformulation() -> CriterionResult:
    """The (x, v) form of the AGM ODE shares the Jacobian spectrum moduli of the (x, x') form."""
    standard, transformed = reformulation_moduli(100.0)
    err = float(np.max(np.abs(standard - transformed)))
    return CriterionResult(
        key="AC-10",
        title="Eigenvalue invariance of the first-order reformulation",
        passed=err <= 1e-4,
        measured={"max_modulus_err": err},
        expected="moduli agree within 1e-4 at t = 100",
    )


CRITERIA: tuple[Callable[[], CriterionResult], ...] = (
    criterion_exact_discrete_rate,
    criterion_one_essential,
    criterion_agm_rate,
    criterion_cancellation,
    criterion_quartic,
    criterion_tmm_factor,
    criterion_optimal_b,
    criterion_slope_limit,
    criterion_power_hinge,
    criterion_reformulation,
)


def run_criterion(index: int, criterion: Callable[[], CriterionResult]) -> CriterionResult:
    """Run one criterion, turning library errors into a failed result."""
    key = f"AC-{index + 1}"
    started = time.perf_counter()
    try:
        result = criterion()
    except (EssrateError, ValidationError) as e:
        logger.error(f"{key} failed with {type(e).__name__}: {e}")
        result = CriterionResult(
            key=key,
            title=criterion.__name__.removeprefix("criterion_").replace("_", " "),
            passed=False,
            detail=f"{type(e).__name__}: {e}",
        )
    result.seconds = time.perf_counter() - started
    logger.info(f"{result.key} {'passed' if result.passed else 'FAILED'} in {result.seconds:.2f}s")
    return result


def run_all() -> list[CriterionResult]:
    return [run_criterion(i, criterion) for i, criterion in enumerate(CRITERIA)]


def report_markdown(results: list[CriterionResult]) -> str:
    failed = sum(not r.passed for r in results)
    lines = [
        "# essrate reference experiments",
        "",
        f"{len(results) - failed} of {len(results)} criteria passed.",
        "",
        "| Criterion | Title | Result | Measured | Expected | Seconds |",
        "|---|---|---|---|---|---|",
    ]
    for r in results:
        measured = ", ".join(f"{k}={v:.6g}" for k, v in r.measured.items())
        status = "pass" if r.passed else "FAIL"
        lines.append(
            f"| {r.key} | {r.title} | {status} | {measured} | {r.expected} | {r.seconds:.2f} |"
        )
    details = [f"- {r.key}: {r.detail}" for r in results if r.detail]
    if details:
        lines += ["", "## Details", "", *details]
    return "\n".join(lines) + "\n"


def report_csv(results: list[CriterionResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["key", "title", "passed", "seconds", "measured", "detail"])
    for r in results:
        measured = ";".join(f"{k}={v!r}" for k, v in r.measured.items())
        writer.writerow([r.key, r.title, r.passed, f"{r.seconds:.3f}", measured, r.detail])
    return buffer.getvalue()


def write_reports(results: list[CriterionResult], out_dir: Path) -> None:
    """Write report.md, criteria.csv and the AGM gap plot into out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.md").write_text(report_markdown(results))
    (out_dir / "criteria.csv").write_text(report_csv(results))
    try:
        traj = agm_convex_trajectory()
    except EssrateError as e:
        logger.warning(f"Skipping the AGM gap plot: {e}")
        return
    bound = np.where(traj.times >= 1.0, 2.0 * ELL / np.maximum(traj.times, 1.0) ** 2, math.nan)
    (out_dir / "agm_gap.svg").write_text(
        line_plot(
            traj.times,
            {"gap": traj.phi(MetricKind.GAP), "2L/t^2": bound},
            title="AGM ODE gap, alpha = t^2/L",
            y_label="log10 gap",
            log_y=True,
        )
    )
    logger.info(f"Wrote reference reports to {out_dir}")
