import math

from pydantic import ValidationError
from pytest import approx, mark, raises

from src import verify
from src.funcspace import CompactMonomial, LogExtremal, MobiusAtom, Polynomial, cn
from src.reports import aggregate_passed
from src.verify import (
    CHECK_NAMES,
    VerifyConfig,
    check_duality,
    check_eq7,
    check_growth,
    check_gzn_bloch,
    check_identity,
    check_lemma5,
    check_lower_bound,
    default_lemma5_suite,
    fitted_slope,
    growth_table,
    growth_value,
    polar_grid,
    run_all,
)


def test_eq7_check_passes():
    report = check_eq7()
    assert report.passed
    assert report.computed[0] <= 1e-10
    assert report.runtime > 0


def test_eq7_check_with_zero_tolerance_fails():
    assert not check_eq7(tol=0.0).passed


def test_identity_check_on_a_small_grid():
    functions = [
        ("z", Polynomial((0, 1))),
        ("quartic", Polynomial((0.5, -1j, 0.25, 0.3, 0.1j))),
        ("log_extremal", LogExtremal()),
    ]
    report = check_identity(functions, polar_grid((0.3, 0.8), 4))
    assert report.passed, report.notes
    assert report.computed[0] <= 1e-6


def test_lemma5_check_on_a_small_suite(quick_scan):
    suite = [("z^1", Polynomial((0, 1))), ("log_extremal", LogExtremal()),
             ("mobius", MobiusAtom(0.6j)), ("constant", Polynomial((1,)))]
    report = check_lemma5(suite, scan=quick_scan)
    assert report.passed
    max_ratio, ratio_log, ratio_z = report.computed
    assert ratio_log == approx(2.0, abs=1e-3)
    assert ratio_z == approx(2 * (4 / 5) ** 2 / math.sqrt(5), rel=1e-6)
    assert max_ratio >= ratio_log
    assert any("constant" in note for note in report.notes)


def test_lemma5_suite_contents():
    suite = dict(default_lemma5_suite(count=3))
    assert "z^12" in suite and "log_extremal" in suite
    assert len(suite) == 12 + 3 + 1 + 3


def test_lower_bound_check():
    report = check_lower_bound()
    assert report.passed, report.computed
    norm, sup, grid_max, kernel_error = report.computed
    assert norm == approx(1.0, abs=1e-6)
    assert 1.99 <= sup <= 2.0 + 1e-12
    assert kernel_error <= 1e-6


def test_growth_values():
    n = 64
    z = 1 - 1 / n
    direct = sum((k + 1) * (k + 2) * z ** (2 * k) for k in range(n + 1))
    expected = (1 - z * z) * z * direct / cn(n)
    assert growth_value(n, -1.0) == approx(expected, rel=1e-10)


@mark.parametrize("alpha", (-1.0, -1.5, -1.9))
def test_growth_slopes(alpha):
    slope = fitted_slope(growth_table(alpha))
    assert abs(slope - (2 + alpha)) <= 0.15


def test_growth_check_and_grid_limits():
    report = check_growth([-1.0, -1.5])
    assert report.passed
    assert report.expected == [1.0, 0.5]
    with raises(ValueError):
        growth_table(-1.0, [64, 200_000])


@mark.parametrize("grid", ([1, 2, 4], [64], [64, 64], []))
def test_growth_table_needs_two_usable_points(grid):
    with raises(ValueError):
        growth_table(-1.0, grid)


def test_duality_check():
    report = check_duality()
    assert report.passed, report.computed
    assert len(report.computed) == 16


def test_duality_check_labels_each_case():
    cases = [(CompactMonomial(1, 2, 0.9), Polynomial((0, 1)), -2.0)]
    report = check_duality(cases)
    assert report.passed
    assert report.labels == ["case0.closed_left", "case0.closed_right", "case0.quad_left", "case0.quad_right"]


def test_gzn_bloch_is_informational_by_default(quick_scan):
    report = check_gzn_bloch(((0, 0.5), (5, 0j)), scan=quick_scan)
    assert report.informational
    assert report.computed[0] == approx(1.0, abs=1e-9)
    assert report.computed[1] == approx(1 / cn(5), abs=1e-9)
    strict = check_gzn_bloch(((0, 0.5),), strict=True, scan=quick_scan)
    assert not strict.informational


def test_verify_config_validation():
    with raises(ValidationError):
        VerifyConfig(unknown=1)
    with raises(ValidationError):
        VerifyConfig(only=["nonsense"])
    with raises(ValidationError):
        VerifyConfig(tolerances={"eq7": -1.0})
    with raises(ValidationError):
        VerifyConfig(alphas=[-0.5])
    assert VerifyConfig().selected() == list(CHECK_NAMES)
    assert VerifyConfig(only=["growth", "eq7"]).selected() == ["eq7", "growth"]


def test_empty_selection_runs_nothing():
    reports = run_all(VerifyConfig(only=[]), show_progress=False)
    assert reports == []
    assert aggregate_passed(reports)


def test_selected_checks_run_in_order():
    config = VerifyConfig(only=["growth", "eq7"], alphas=[-1.0])
    reports = run_all(config, show_progress=False)
    assert [r.name for r in reports] == ["eq7", "growth"]
    assert aggregate_passed(reports)


def test_tolerance_override_fails_the_run():
    reports = run_all(VerifyConfig(only=["eq7"], tolerances={"eq7": 0.0}), show_progress=False)
    assert not aggregate_passed(reports)


def test_runs_are_deterministic():
    config = VerifyConfig(only=["eq7", "growth"])
    first = run_all(config, show_progress=False)
    second = run_all(config, show_progress=False)
    assert [r.to_record() for r in first] == [r.to_record() for r in second]


def test_a_raising_check_is_reported_as_failed(monkeypatch):
    def broken(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(verify, "check_growth", broken)
    reports = run_all(VerifyConfig(only=["growth", "eq7"]), show_progress=False)
    assert [r.name for r in reports] == ["eq7", "growth"]
    assert reports[0].passed
    assert not reports[1].passed
    assert "boom" in reports[1].notes[0]


@mark.slow
def test_full_suite_passes():
    reports = run_all(show_progress=False)
    assert [r.name for r in reports] == list(CHECK_NAMES)
    assert aggregate_passed(reports), [(r.name, r.computed) for r in reports if not r.passed]
