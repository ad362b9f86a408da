import cmath

import numpy as np
from hypothesis import given, settings
from hypothesis.strategies import floats, lists
from pytest import approx, mark, raises

from config import settings as config_settings
from src.diskquad import QuadratureSpec, stabilize
from src.funcspace import (
    CompactMonomial,
    DiskDomainError,
    GznFamily,
    LogExtremal,
    MobiusAtom,
    Polynomial,
    cn,
    geom_partial_direct,
)
from src.operators import (
    AdjointForm,
    adjoint_quad,
    adjoint_radius,
    adjoint_series,
    besov_pairing,
    duality_check,
    log_extremal_kernel_closed,
    project,
    project_monomial_closed,
    project_series,
    project_series_coeffs,
    reproduce_weighted,
    truncated_kernel_integral,
)
from src.verify import random_polynomial


WHOLE = QuadratureSpec(radial_nodes=16, angular_nodes=64)
BETA2 = AdjointForm(2.0)


@mark.parametrize("a b radius z".split(), (
    (1, 2, 0.9, 0.5),
    (0, 3, 0.7, 0.2 - 0.4j),
    (2, 1, 0.9, 0.5),
    (0, 0, 0.6, 0.3j),
))
def test_projection_of_compact_monomials(a, b, radius, z):
    closed = project_monomial_closed(a, b, radius, z)
    quad = project(CompactMonomial(a, b, radius), z)
    assert abs(quad.value - closed) <= 1e-8 * max(1.0, abs(closed))


def test_projection_closed_form_examples():
    assert project_monomial_closed(2, 1, 0.9, 0.5) == 0
    assert project_monomial_closed(0, 0, 0.6, 0j) == approx(0.36)
    assert project_monomial_closed(1, 2, 0.9, 0.5) == approx(2 * 0.5 * 0.9 ** 6 / 3)


def test_adjoint_form_range():
    assert AdjointForm.from_alpha(-1.5).beta == 1.5
    with raises(ValueError):
        AdjointForm(0.5)
    with raises(ValueError):
        AdjointForm.from_alpha(-2.5)


def test_adjoint_of_the_identity():
    z = Polynomial((0, 1))
    assert adjoint_series(z, BETA2, 0.5) == approx(0.5625)
    quad = adjoint_quad(z, BETA2, 0.5, WHOLE)
    assert quad.converged
    assert quad.value == approx(0.5625, abs=1e-9)
    assert adjoint_quad(z, BETA2, 0j, WHOLE).value == 0


def test_adjoint_series_on_arrays():
    g = Polynomial((0, 1, 0.5j))
    zs = np.array([0.1, 0.4j, -0.7])
    values = adjoint_series(g, BETA2, zs)
    assert values.shape == (3,)
    assert values[1] == approx(adjoint_series(g, BETA2, 0.4j))


def test_adjoint_of_the_witness_by_quadrature():
    g = LogExtremal()
    spec = QuadratureSpec.from_settings(outer_radius=0.99)
    quad = adjoint_quad(g, BETA2, 0.6, spec)
    series = adjoint_series(g, BETA2, 0.6)
    assert series == approx((1 - 0.36) ** 2 * 1.2 / (1 - 0.36) ** 2)
    assert quad.value == approx(series, rel=1e-6)


def test_adjoint_quad_needs_point_inside_radius():
    spec = QuadratureSpec.from_settings(outer_radius=0.9)
    with raises(DiskDomainError):
        adjoint_quad(LogExtremal(), BETA2, 0.95, spec)


@mark.parametrize("z", (0.5, 0.9, 0.6 + 0.6j))
def test_adjoint_quad_stabilizes_over_the_limit_radii(z):
    g = LogExtremal()
    sweep = stabilize(
        lambda r: adjoint_quad(g, BETA2, z, QuadratureSpec.from_settings(outer_radius=r))
    )
    assert sweep.radii == tuple(config_settings.limit_radii)
    assert sweep.spread <= 1e-8 * abs(sweep.value)
    assert sweep.value == approx(adjoint_series(g, BETA2, z), rel=1e-8)


def test_adjoint_radius():
    assert adjoint_radius(Polynomial((0, 1, 2)), 0.995) == 1.0
    assert adjoint_radius(LogExtremal(), 0.5) == min(config_settings.limit_radii)
    radius = adjoint_radius(LogExtremal(), 0.995)
    assert 0.995 < radius < 1.0
    assert radius == approx(0.995 ** 0.5)


def test_adjoint_quad_close_to_the_boundary():
    g = LogExtremal()
    z = 0.995
    spec = QuadratureSpec.from_settings(outer_radius=adjoint_radius(g, z), rel_tol=1e-7)
    quad = adjoint_quad(g, BETA2, z, spec)
    assert adjoint_series(g, BETA2, z) == approx(2 * z)
    assert quad.value == approx(2 * z, rel=1e-5)


@mark.parametrize("seed", range(5))
def test_adjoint_quad_agrees_with_series(seed):
    rng = np.random.default_rng(seed)
    g = random_polynomial(rng, int(rng.integers(1, 13)))
    for z in (0.1, 0.5 + 0.3j, -0.8j, 0.9 * cmath.exp(2j)):
        quad = adjoint_quad(g, BETA2, z, WHOLE)
        series = adjoint_series(g, BETA2, z)
        assert abs(quad.value - series) <= 1e-8 * (1 + abs(series))


@mark.parametrize("beta", (1.0, 1.5, 2.0))
def test_adjoint_of_gzn_at_its_base(beta):
    base = 0.6 + 0.2j
    n = 30
    s = abs(base) ** 2
    expected = (1 - s) ** beta * base * geom_partial_direct(n, s) / cn(n)
    value = adjoint_series(GznFamily(n, base), AdjointForm(beta), base)
    assert value == approx(expected, rel=1e-12)


@settings(deadline=None)
@given(
    floats(min_value=-3, max_value=3),
    floats(min_value=-3, max_value=3),
    lists(floats(min_value=-1, max_value=1), min_size=4, max_size=4),
)
def test_adjoint_is_linear(a, b, coeffs):
    g1 = Polynomial(tuple(coeffs))
    g2 = MobiusAtom(0.4j)
    z = 0.35 - 0.5j
    combined = adjoint_series(a * g1 + (1j * b) * g2, BETA2, z)
    separate = a * adjoint_series(g1, BETA2, z) + 1j * b * adjoint_series(g2, BETA2, z)
    assert abs(combined - separate) <= 1e-12 * (1 + abs(a) + abs(b)) * 10


def test_truncated_kernel_integral_examples():
    g = LogExtremal()
    at_origin = truncated_kernel_integral(g, 0j, 0.5)
    assert at_origin.value == approx(0.25, rel=1e-10)
    assert at_origin.closed_form == approx(0.25)

    inner = truncated_kernel_integral(g, 0.5, 0.9)
    assert inner.value == approx(log_extremal_kernel_closed(0.5, 0.9), rel=1e-6)

    plain = truncated_kernel_integral(Polynomial((0, 1)), 0.3, 0.5)
    assert plain.closed_form is None
    assert plain.value == approx(0.25, rel=1e-10)


def test_truncated_kernel_integral_stabilizes_toward_the_kernel():
    g = LogExtremal()
    w = 0.5
    spec = QuadratureSpec.from_settings(rel_tol=1e-8)
    sweep = stabilize(lambda r: truncated_kernel_integral(g, w, r, spec).value)
    limit = 1 / (1 - w * w) ** 2
    distances = [abs(v - limit) for v in sweep.values]
    assert distances == sorted(distances, reverse=True)
    assert sweep.differences[-1] < sweep.differences[0]
    for r, v in zip(sweep.radii, sweep.values):
        assert v == approx(log_extremal_kernel_closed(w, r), rel=1e-6)


def test_besov_pairing_examples():
    z = Polynomial((0, 1))
    z2 = Polynomial((0, 0, 1))
    assert besov_pairing(z, z, WHOLE).value == approx(1.0, abs=1e-12)
    assert besov_pairing(z, z2, WHOLE).value == approx(0.0, abs=1e-12)
    assert besov_pairing(z2, z2, WHOLE).value == approx(2.0, abs=1e-12)


@settings(deadline=None)
@given(lists(floats(min_value=-10, max_value=10), min_size=1, max_size=9))
def test_series_projection_reproduces_polynomials_exactly(coeffs):
    p = Polynomial(tuple(complex(c, -c / 2) for c in coeffs))
    assert project_series_coeffs(p).coeffs == p.coeffs


def test_series_projection_evaluates():
    p = Polynomial((1, 2j, -0.5))
    assert project_series(p, 0.3) == approx(p.value(0.3))


@mark.parametrize("z", (0j, 0.3, 0.2 - 0.4j, 0.5j))
def test_quadrature_projection_reproduces_on_a_truncated_disk(z):
    p = Polynomial((0.25, -0.25j, 0.1, 0.2, 0.05j, 0.25, -0.1, 0.1j, 0.2))
    spec = QuadratureSpec.from_settings(outer_radius=0.999, rel_tol=1e-6)
    result = reproduce_weighted(p, 0.0, z, spec)
    assert abs(result.value - p.value(z)) <= 5e-3


@mark.parametrize("alpha", (0.0, 1.0, -0.5))
def test_weighted_projection_reproduces_on_the_whole_disk(alpha):
    p = Polynomial((1, 0.5j, -0.25, 0.1))
    result = reproduce_weighted(p, alpha, 0.4 + 0.2j, WHOLE)
    assert result.value == approx(p.value(0.4 + 0.2j), rel=1e-9)


def test_weighted_projection_needs_alpha_above_minus_one():
    with raises(ValueError):
        reproduce_weighted(Polynomial((1,)), -1.0, 0.1)


@mark.parametrize("fm g prediction".split(), (
    (CompactMonomial(1, 2, 0.9), Polynomial((0, 1)), 2 * 0.9 ** 6 / 3),
    (CompactMonomial(2, 1, 0.9), Polynomial((0, 1)), 0.0),
    (CompactMonomial(0, 0, 0.5), Polynomial((0, 0, 1)), 0.0),
))
def test_duality_cases(fm, g, prediction):
    report = duality_check(fm, g, BETA2)
    assert report.passed, report.computed
    assert report.expected[0] == approx(prediction, abs=1e-15)
    closed_left, closed_right, quad_left, quad_right = report.computed
    assert closed_left == approx(prediction, abs=1e-12)
    assert closed_right == approx(prediction, abs=1e-12)
    assert quad_left == approx(prediction, abs=1e-5)


def test_duality_with_a_weighted_form():
    report = duality_check(CompactMonomial(1, 3, 0.8), Polynomial((0, 0.5, 1j, 0.25)), AdjointForm(1.5))
    assert report.passed


def test_duality_rejects_non_polynomial_g():
    with raises(ValueError):
        duality_check(CompactMonomial(1, 2, 0.9), LogExtremal(), BETA2)
