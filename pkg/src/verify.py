"""Verification suite: each computable claim as a named check with a tolerance."""

from __future__ import annotations

import functools
import math
import time
from typing import Callable, Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from rich.console import Console
from rich.progress import Progress

from src.diskquad import QuadratureSpec
from src.funcspace import (
    AnalyticFn,
    CompactMonomial,
    LogExtremal,
    MobiusAtom,
    Polynomial,
    closed_form_applies,
    cn,
    geom_partial_closed,
    geom_partial_direct,
    gzn_build,
    to_polynomial,
)
from src.norms import (
    ScanSpec,
    UndefinedRatioError,
    bloch_norm,
    bloch_seminorm,
    lemma5_estimates,
    sample_grid,
    weighted_sup,
)
from src.operators import (
    DUALITY_ANCHOR,
    AdjointForm,
    adjoint_quad,
    adjoint_series,
    duality_check,
    truncated_kernel_integral,
)
from src.reports import CheckReport


console = Console(stderr=True)

CHECK_NAMES = ("eq7", "identity", "lemma5", "lower_bound", "growth", "duality", "gzn_bloch")

DEFAULT_TOLERANCES = {
    "eq7": 1e-10,
    "identity": 1e-6,
    "lemma5": 1e-6,
    "lower_bound": 1e-6,
    "growth": 0.15,
    "duality": 1e-12,
    "duality_quad": 1e-5,
    "gzn_bloch": 1e-3,
}

ANCHORS = {
    "eq7": "Σ_{k=0}^n (k+1)(k+2)|z|^{2k} in closed form; limit 2/(1-|z|^2)^3",
    "identity": "2z ∫ g′(w)/(1-z w̄)^3 dA(w) = (z^2 g′(z))′",
    "lemma5": "sup (1-|z|^2)^2 |(z^2 f′(z))′| <= 4 ‖f‖_ℬ",
    "lower_bound": "2 sup |w̄(1-|w|^2)^2/(1-w̄^2)^2| = 2 and ‖g‖_ℬ = 1 for g = ½log((1+z)/(1-z))",
    "growth": "|P* g_{z_n}^n(z_n)| ≍ n^{2+α}, z_n = 1 - 1/n",
    "duality": DUALITY_ANCHOR,
    "gzn_bloch": "‖g_z^n‖_ℬ <= 1",
}

# Rounding slack on one-sided brackets such as value <= 1
BRACKET_SLACK = 1e-12

EQ7_N = (0, 1, 5, 20, 100, 10_000)
EQ7_S = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
EQ7_LIMITS = ((10_000, 0.5), (100_000, 0.5))
GROWTH_N = tuple(2 ** k for k in range(6, 14))
GZN_SAMPLES = ((0, 0.5 + 0j), (5, 0j), (20, 0.5 + 0j), (100, 0.95 + 0j), (500, 0.99 + 0j))


class VerifyConfig(BaseModel):
    """Suite selection and tolerance overrides."""
    model_config = ConfigDict(extra="forbid")

    tolerances: dict[str, float] = Field(default_factory=dict)
    only: list[str] | None = None
    alphas: list[float] = Field(default_factory=lambda: [-1.0, -1.5])
    strict_gzn: bool = False
    seed: int = 7
    identity_polynomials: int = Field(default=20, ge=0)
    lemma5_random: int = Field(default=50, ge=0)

    @field_validator("tolerances")
    @classmethod
    def known_tolerances(cls, value: dict[str, float]) -> dict[str, float]:
        unknown = set(value) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"Unknown tolerance names: {sorted(unknown)}")
        if any(v < 0 or not math.isfinite(v) for v in value.values()):
            raise ValueError("Tolerances must be finite and nonnegative")
        return value

    @field_validator("only")
    @classmethod
    def known_checks(cls, value: list[str] | None) -> list[str] | None:
        if value is not None:
            unknown = set(value) - set(CHECK_NAMES)
            if unknown:
                raise ValueError(f"Unknown checks: {sorted(unknown)}; choose from {list(CHECK_NAMES)}")
        return value

    @field_validator("alphas")
    @classmethod
    def alphas_in_range(cls, value: list[float]) -> list[float]:
        for alpha in value:
            if not -2.0 < alpha <= -1.0:
                raise ValueError(f"alpha = {alpha} must lie in (-2, -1]")
        return value

    def tolerance(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def selected(self) -> list[str]:
        if self.only is None:
            return list(CHECK_NAMES)
        return [name for name in CHECK_NAMES if name in self.only]


def timed(check: Callable[..., CheckReport]) -> Callable[..., CheckReport]:
    """Record wall-clock runtime on the returned report."""
    @functools.wraps(check)
    def wrapper(*args, **kwargs) -> CheckReport:
        started = time.perf_counter()
        report = check(*args, **kwargs)
        report.runtime = time.perf_counter() - started
        return report
    return wrapper


def random_polynomial(rng: np.random.Generator, degree: int) -> Polynomial:
    """Coefficients uniform in the complex unit box."""
    re = rng.uniform(-1.0, 1.0, degree + 1)
    im = rng.uniform(-1.0, 1.0, degree + 1)
    return Polynomial(tuple(re + 1j * im))


def polar_grid(radii: Iterable[float], angles: int) -> list[complex]:
    return [r * np.exp(2j * np.pi * k / angles) for r in radii for k in range(angles)]


@timed
def check_eq7(
    n_list: Iterable[int] = EQ7_N,
    s_list: Iterable[float] = EQ7_S,
    tol: float = DEFAULT_TOLERANCES["eq7"],
    limits: Iterable[tuple[int, float]] = EQ7_LIMITS,
    limit_tol: float = 1e-6,
) -> CheckReport:
    """Closed form of S_n(s) against direct summation, plus the n -> infinity limit 2/(1-s)^3."""
    worst, worst_at, closed_points = 0.0, (0, 0.0), 0
    for n in n_list:
        for s in s_list:
            closed = geom_partial_closed(n, s)
            direct = geom_partial_direct(n, s)
            err = abs(closed - direct) / abs(direct)
            closed_points += closed_form_applies(n, s)
            if err > worst:
                worst, worst_at = err, (n, s)

    limit_errors = [
        abs(geom_partial_closed(n, s) * (1.0 - s) ** 3 / 2.0 - 1.0) for n, s in limits
    ]
    passed = worst <= tol and all(e < limit_tol for e in limit_errors)

    return CheckReport(
        name="eq7",
        anchor=ANCHORS["eq7"],
        computed=[worst, float(worst_at[0]), worst_at[1], *limit_errors],
        expected=[0.0],
        tolerance=tol,
        passed=passed,
        labels=["max_rel_error", "worst_n", "worst_s",
                *[f"limit_error_n{n}_s{s}" for n, s in limits]],
        notes=[f"{closed_points} grid points evaluated by the closed form, the rest by direct summation"],
    )


def default_identity_functions(seed: int = 7, count: int = 20) -> list[tuple[str, AnalyticFn]]:
    rng = np.random.default_rng(seed)
    functions = [("z", Polynomial((0, 1)))]
    for i in range(count):
        degree = int(rng.integers(1, 13))
        functions.append((f"random{i}", random_polynomial(rng, degree)))
    functions.append(("log_extremal", LogExtremal()))
    return functions


def identity_spec(g: AnalyticFn) -> QuadratureSpec:
    """Whole disk for polynomials; R = 0.99 through the dilation identity otherwise."""
    if to_polynomial(g) is not None:
        return QuadratureSpec.from_settings(radial_nodes=16, angular_nodes=256)
    return QuadratureSpec.from_settings(outer_radius=0.99)


@timed
def check_identity(
    g_list: list[tuple[str, AnalyticFn]] | None = None,
    z_list: list[complex] | None = None,
    tol: float = DEFAULT_TOLERANCES["identity"],
    seed: int = 7,
) -> CheckReport:
    """Quadrature form of P*g against the (z^2 g')' form, beta = 2."""
    g_list = g_list if g_list is not None else default_identity_functions(seed)
    z_list = z_list if z_list is not None else polar_grid((0.1, 0.3, 0.5, 0.8, 0.9), 8)
    form = AdjointForm(2.0)

    worst, worst_label, worst_z = 0.0, "", 0j
    unconverged = 0
    for label, g in g_list:
        spec = identity_spec(g)
        for z in z_list:
            quad = adjoint_quad(g, form, z, spec)
            series = adjoint_series(g, form, z)
            err = abs(quad.value - series) / (1.0 + abs(series))
            unconverged += not quad.converged
            if err > worst:
                worst, worst_label, worst_z = err, label, complex(z)

    notes = [f"{len(g_list)} functions x {len(z_list)} points"]
    if unconverged:
        notes.append(f"{unconverged} quadratures did not reach their tolerance")

    return CheckReport(
        name="identity",
        anchor=ANCHORS["identity"],
        computed=[worst, worst_z],
        expected=[0.0],
        tolerance=tol,
        passed=worst <= tol and unconverged == 0,
        labels=["max_rel_error", "worst_z"],
        notes=notes + ([f"worst function {worst_label}"] if worst_label else []),
    )


def default_lemma5_suite(seed: int = 7, count: int = 50) -> list[tuple[str, AnalyticFn]]:
    suite: list[tuple[str, AnalyticFn]] = []
    for k in range(1, 13):
        suite.append((f"z^{k}", Polynomial((0,) * k + (1,))))
    for lam in (0.3, 0.6j, 0.9):
        suite.append((f"mobius({lam})", MobiusAtom(lam)))
    suite.append(("log_extremal", LogExtremal()))
    rng = np.random.default_rng(seed)
    for i in range(count):
        suite.append((f"random{i}", random_polynomial(rng, 10)))
    return suite


@timed
def check_lemma5(
    suite: list[tuple[str, AnalyticFn]] | None = None,
    tol: float = DEFAULT_TOLERANCES["lemma5"],
    seed: int = 7,
    scan: ScanSpec | None = None,
) -> CheckReport:
    """Ratio 𝒫(f) / Bloch seminorm stays below 4 across the suite."""
    suite = suite if suite is not None else default_lemma5_suite(seed)
    if not suite:
        raise ValueError("Lemma suite must be nonempty")

    ratios: dict[str, float] = {}
    notes = ["𝒫 is evaluated with (z^2 f′(z))′, the form used in the bound's proof"]
    for label, f in suite:
        p_est, b_est = lemma5_estimates(f, scan)
        if b_est.value == 0.0:
            notes.append(f"{label}: zero Bloch seminorm, skipped")
            continue
        ratios[label] = p_est.value / b_est.value

    if not ratios:
        raise UndefinedRatioError("Every suite member has zero Bloch seminorm")

    witness = max(ratios, key=ratios.get)
    max_ratio = ratios[witness]
    notes.append(f"largest ratio at {witness}")

    return CheckReport(
        name="lemma5",
        anchor=ANCHORS["lemma5"],
        computed=[max_ratio, ratios.get("log_extremal", math.nan), ratios.get("z^1", math.nan)],
        expected=[[0.0, 4.0]],
        tolerance=tol,
        passed=max_ratio <= 4.0 + tol,
        labels=["max_ratio", "ratio_log_extremal", "ratio_z"],
        notes=notes,
    )


def lower_bound_witness(w: np.ndarray) -> np.ndarray:
    """2 conj(w) (1 - |w|^2)^2 / (1 - conj(w)^2)^2."""
    r = np.abs(w)
    w_bar = np.conj(w)
    return 2.0 * w_bar * ((1.0 - r) * (1.0 + r)) ** 2 / (1.0 - w_bar * w_bar) ** 2


@timed
def check_lower_bound(
    tol: float = DEFAULT_TOLERANCES["lower_bound"],
    scan: ScanSpec | None = None,
    kernel_points: Iterable[tuple[float, complex]] = (
        (0.5, 0.3), (0.5, 0.5 + 0.2j), (0.9, 0.3), (0.9, 0.5 + 0.2j),
    ),
) -> CheckReport:
    """Witness Bloch norm 1, the sup 2 of the limiting kernel, and I_r against its closed form."""
    g = LogExtremal()
    norm = bloch_norm(g, scan)
    norm_ok = 1.0 - tol <= norm <= 1.0 + BRACKET_SLACK

    sup = weighted_sup(lower_bound_witness, 0.0, scan)
    grid_max = float(np.max(np.abs(lower_bound_witness(sample_grid(scan)))))
    sup_ok = 1.99 <= sup.value <= 2.0 + BRACKET_SLACK and grid_max <= 2.0 + BRACKET_SLACK

    kernel_errors = []
    for r, w in kernel_points:
        truncated = truncated_kernel_integral(g, w, r)
        kernel_errors.append(
            abs(truncated.value - truncated.closed_form) / max(1.0, abs(truncated.closed_form))
        )
    kernel_ok = max(kernel_errors) <= tol

    return CheckReport(
        name="lower_bound",
        anchor=ANCHORS["lower_bound"],
        computed=[norm, sup.value, grid_max, max(kernel_errors)],
        expected=[[1.0 - tol, 1.0], [1.99, 2.0], [0.0, 2.0], 0.0],
        tolerance=tol,
        passed=norm_ok and sup_ok and kernel_ok,
        labels=["bloch_norm", "kernel_sup", "kernel_grid_max", "max_kernel_error"],
        notes=[f"kernel sup approached at boundary offset {sup.boundary_offset:.2e}"],
    )


def growth_value(n: int, alpha: float) -> float:
    """|P* g_{z_n}^n (z_n)| = (1/C_n)(1 - z_n^2)^(-alpha) z_n S_n(z_n^2), z_n = 1 - 1/n."""
    z = 1.0 - 1.0 / n
    one_minus_sq = (1.0 / n) * (2.0 - 1.0 / n)
    return one_minus_sq ** (-alpha) * z * geom_partial_closed(n, z * z) / cn(n)


def growth_table(alpha: float, n_grid: Iterable[int] = GROWTH_N) -> list[tuple[int, float]]:
    n_grid = list(n_grid)
    if any(n < 2 or n > 100_000 for n in n_grid):
        raise ValueError("Growth grid must lie in [2, 1e5]: n = 1 puts z_n at 0 and the closed form stops at 1e5")
    if len(set(n_grid)) < 2:
        raise ValueError(f"Fitting a growth slope needs at least two distinct n, got {n_grid}")
    return [(n, growth_value(n, alpha)) for n in n_grid]


def fitted_slope(table: list[tuple[int, float]]) -> float:
    """Least-squares slope of log value against log n."""
    n = np.array([row[0] for row in table], dtype=float)
    values = np.array([row[1] for row in table])
    return float(np.polyfit(np.log(n), np.log(values), 1)[0])


@timed
def check_growth(
    alphas: float | Iterable[float] = (-1.0, -1.5),
    n_grid: Iterable[int] = GROWTH_N,
    window: float = DEFAULT_TOLERANCES["growth"],
) -> CheckReport:
    """Fitted growth exponent of the adjoint images of g_z^n against 2 + alpha."""
    alphas = [alphas] if isinstance(alphas, (int, float)) else list(alphas)
    n_grid = list(n_grid)
    slopes = [fitted_slope(growth_table(alpha, n_grid)) for alpha in alphas]
    passed = all(abs(s - (2.0 + a)) <= window for s, a in zip(slopes, alphas))

    return CheckReport(
        name="growth",
        anchor=ANCHORS["growth"],
        computed=slopes,
        expected=[2.0 + a for a in alphas],
        tolerance=window,
        passed=passed,
        labels=[f"slope_alpha{a}" for a in alphas],
        notes=[f"n from {min(n_grid)} to {max(n_grid)}"],
    )


def default_duality_cases() -> list[tuple[CompactMonomial, AnalyticFn, float]]:
    z = Polynomial((0, 1))
    return [
        (CompactMonomial(1, 2, 0.9), z, -2.0),
        (CompactMonomial(2, 1, 0.9), z, -2.0),
        (CompactMonomial(0, 0, 0.5), Polynomial((0, 0, 1)), -2.0),
        (CompactMonomial(1, 3, 0.8), Polynomial((0, 0.5, 1j, 0.25)), -1.5),
    ]


@timed
def check_duality(
    cases: list[tuple[CompactMonomial, AnalyticFn, float]] | None = None,
    closed_tol: float = DEFAULT_TOLERANCES["duality"],
    quad_tol: float = DEFAULT_TOLERANCES["duality_quad"],
) -> CheckReport:
    """Both sides of the P / P* duality in closed form and by quadrature."""
    cases = cases if cases is not None else default_duality_cases()
    computed, expected, labels, notes = [], [], [], []
    passed = True

    for i, (fm, g, alpha) in enumerate(cases):
        report = duality_check(fm, g, AdjointForm.from_alpha(alpha),
                               closed_tol=closed_tol, quad_tol=quad_tol)
        passed = passed and report.passed
        computed.extend(report.computed)
        expected.extend(report.expected)
        labels.extend(f"case{i}.{label}" for label in report.labels)
        notes.extend(f"case{i}: {note}" for note in report.notes)

    return CheckReport(
        name="duality",
        anchor=ANCHORS["duality"],
        computed=computed,
        expected=expected,
        tolerance=closed_tol,
        passed=passed,
        labels=labels,
        notes=notes,
    )


@timed
def check_gzn_bloch(
    samples: Iterable[tuple[int, complex]] = GZN_SAMPLES,
    tol: float = DEFAULT_TOLERANCES["gzn_bloch"],
    strict: bool = False,
    scan: ScanSpec | None = None,
) -> CheckReport:
    """Bloch seminorm of g_z^n against 1; informational unless strict."""
    samples = list(samples)
    values = []
    for n, base in samples:
        if n > 500:
            raise ValueError(f"n = {n} exceeds the sampled range 500")
        values.append(bloch_seminorm(gzn_build(n, base), scan).value)

    return CheckReport(
        name="gzn_bloch",
        anchor=ANCHORS["gzn_bloch"],
        computed=values,
        expected=[[0.0, 1.0]] * len(values),
        tolerance=tol,
        passed=all(v <= 1.0 + tol for v in values),
        labels=[f"n{n}_base{complex(b)}" for n, b in samples],
        informational=not strict,
    )


def _runners(config: VerifyConfig) -> dict[str, Callable[[], CheckReport]]:
    return {
        "eq7": lambda: check_eq7(tol=config.tolerance("eq7")),
        "identity": lambda: check_identity(tol=config.tolerance("identity"), seed=config.seed,
                                           g_list=default_identity_functions(config.seed, config.identity_polynomials)),
        "lemma5": lambda: check_lemma5(default_lemma5_suite(config.seed, config.lemma5_random),
                                       tol=config.tolerance("lemma5")),
        "lower_bound": lambda: check_lower_bound(tol=config.tolerance("lower_bound")),
        "growth": lambda: check_growth(config.alphas, window=config.tolerance("growth")),
        "duality": lambda: check_duality(closed_tol=config.tolerance("duality"),
                                         quad_tol=config.tolerance("duality_quad")),
        "gzn_bloch": lambda: check_gzn_bloch(tol=config.tolerance("gzn_bloch"), strict=config.strict_gzn),
    }


def _failed(name: str, error: Exception, tol: float) -> CheckReport:
    return CheckReport(
        name=name,
        anchor=ANCHORS[name],
        computed=[],
        expected=[],
        tolerance=tol,
        passed=False,
        notes=[f"{type(error).__name__}: {error}"],
    )


def run_all(config: VerifyConfig | None = None, show_progress: bool = True) -> list[CheckReport]:
    """
    Run the selected checks in fixed order.

    A check that raises is reported as failed with the error in its notes;
    the remaining checks still run.
    """
    config = config or VerifyConfig()
    runners = _runners(config)
    names = config.selected()
    reports = []

    with Progress(console=console, disable=not show_progress, transient=True) as progress:
        task = progress.add_task("Verifying...", total=len(names))
        for name in names:
            progress.update(task, description=f"Running {name}")
            started = time.perf_counter()
            try:
                report = runners[name]()
            except Exception as e:
                report = _failed(name, e, config.tolerance(name))
                report.runtime = time.perf_counter() - started
            reports.append(report)
            progress.advance(task)

    return reports
