import numpy as np
from pytest import approx, mark, raises

from src.diskquad import (
    MeasureSpec,
    QuadratureNaNError,
    QuadratureSpec,
    angular_floor,
    integrate_disk,
    monomial_moment,
    stabilize,
)
from src.funcspace import MobiusAtom


SMALL = QuadratureSpec(radial_nodes=8, angular_nodes=16)


def test_unit_mass():
    result = integrate_disk(lambda w: 1.0, spec=SMALL)
    assert result.value == approx(1.0, abs=1e-14)
    assert result.converged


def test_mass_of_a_smaller_disk():
    result = integrate_disk(lambda w: 1.0, spec=SMALL.with_radius(0.7))
    assert result.value == approx(0.49, rel=1e-13)


def test_radial_power():
    result = integrate_disk(lambda w: np.abs(w) ** 6, spec=SMALL)
    assert result.value == approx(0.25, rel=1e-13)


@mark.parametrize("alpha expected".split(), ((1.0, 0.5), (-0.5, 2.0), (2.0, 1 / 3)))
def test_weighted_mass(alpha, expected):
    result = integrate_disk(lambda w: 1.0, MeasureSpec(alpha), SMALL)
    assert result.value == approx(expected, rel=1e-12)


def test_monomial_moment_examples():
    assert monomial_moment(0, 0) == 1.0
    assert monomial_moment(2, 2) == approx(1 / 3)
    assert monomial_moment(1, 2) == 0.0
    assert monomial_moment(1, 1, 0.5) == approx(0.5 ** 4 / 2)
    with raises(ValueError):
        monomial_moment(-1, 0)


@mark.parametrize("p", range(6))
@mark.parametrize("q", range(6))
def test_monomials_are_integrated_exactly(p, q):
    result = integrate_disk(lambda w: np.conj(w) ** p * w ** q, spec=SMALL)
    assert abs(result.value - monomial_moment(p, q)) <= 1e-12


@mark.parametrize("radius", (0.5, 0.9))
def test_moments_on_smaller_disks(radius):
    spec = SMALL.with_radius(radius)
    result = integrate_disk(lambda w: np.abs(w) ** 4, spec=spec)
    assert result.value == approx(monomial_moment(2, 2, radius), rel=1e-12)


def test_conjugating_the_integrand_conjugates_the_integral():
    def f(w):
        return np.exp(w) * (1 + 2j * np.conj(w))

    a = integrate_disk(f, spec=SMALL).value
    b = integrate_disk(lambda w: np.conj(f(w)), spec=SMALL).value
    assert abs(b - np.conj(a)) <= 1e-15


def test_invariant_measure_is_mobius_invariant():
    def bump(w):
        return np.maximum(0.0, 1.0 - np.abs(w) ** 2 / 0.81) ** 8

    phi = MobiusAtom(0.3)
    spec = QuadratureSpec(radial_nodes=128, angular_nodes=512, outer_radius=0.97,
                          rel_tol=1e-9, max_refinements=3)
    invariant = MeasureSpec(-2.0)
    plain = integrate_disk(bump, invariant, spec)
    moved = integrate_disk(lambda z: bump(phi.value(z)), invariant, spec)
    assert moved.value == approx(plain.value, rel=1e-6)


def test_whole_disk_needs_integrable_weight():
    with raises(ValueError):
        integrate_disk(lambda w: 1.0, MeasureSpec(-1.0), SMALL)
    with raises(ValueError):
        MeasureSpec(-2.5)


def test_non_finite_integrand_names_the_node():
    with raises(QuadratureNaNError, match="node"):
        integrate_disk(lambda w: np.where(np.abs(w) > 0.5, np.nan, 1.0), spec=SMALL)


def test_reports_non_convergence():
    spec = QuadratureSpec(radial_nodes=8, angular_nodes=16, rel_tol=1e-16, abs_tol=0.0, max_refinements=1)
    result = integrate_disk(lambda w: np.abs(w) ** 0.5, spec=spec)
    assert not result.converged
    assert result.refinements_used == 1
    assert result.error_estimate > 0
    assert result.value == approx(0.8, rel=1e-2)


def test_quadrature_spec_validation():
    with raises(ValueError):
        QuadratureSpec(angular_nodes=7)
    with raises(ValueError):
        QuadratureSpec(outer_radius=1.5)
    with raises(ValueError):
        QuadratureSpec(radial_nodes=0)


def test_angular_floor():
    assert angular_floor(1.0, 1e-9) == 2
    assert angular_floor(0.99, 1e-9) == 4096
    assert angular_floor(0.5, 1e-9) == 32


def test_stabilize_sweeps_radii():
    sweep = stabilize(lambda r: r ** 2, (0.9, 0.95, 0.99))
    assert sweep.value == approx(0.99 ** 2)
    assert sweep.differences[1] < sweep.differences[0] + 1e-12
    sweep = stabilize(
        lambda r: integrate_disk(lambda w: 1.0, spec=SMALL.with_radius(r)), (0.5, 0.9)
    )
    assert sweep.values[0] == approx(0.25)
