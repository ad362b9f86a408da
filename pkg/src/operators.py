"""The Bergman projection, its adjoint P*, the truncated kernel integral and the invariant pairing."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from config import settings
from src.diskquad import (
    IntegralResult,
    MeasureSpec,
    QuadratureSpec,
    integrate_disk,
    monomial_moment,
)
from src.funcspace import (
    AnalyticFn,
    CompactMonomial,
    DiskDomainError,
    LogExtremal,
    Polynomial,
    check_disk,
    eval_pderiv,
    to_polynomial,
)
from src.reports import CheckReport


DUALITY_ANCHOR = "∫ f conj(P*g) dλ_α = ∫ (Pf)′ conj(g′) dA"


@dataclass(frozen=True)
class AdjointForm:
    """Weight exponent beta of the prefactor (1 - |z|^2)^beta in P*g."""
    beta: float = 2.0

    def __post_init__(self):
        if not 1.0 <= self.beta <= 2.0:
            raise ValueError(f"beta = {self.beta} must lie in [1, 2]")

    @classmethod
    def from_alpha(cls, alpha: float) -> AdjointForm:
        """P* acting on L^1(D, dλ_α) carries beta = -alpha."""
        return cls(beta=-alpha)


@dataclass(frozen=True)
class TruncatedIntegral:
    """Quadrature of I_r plus its closed form when one is known."""
    result: IntegralResult
    closed_form: complex | None

    @property
    def value(self) -> complex:
        return self.result.value


def _point(z) -> complex:
    return complex(check_disk(z))


def _one_minus_sq(z):
    r = np.abs(z)
    return (1.0 - r) * (1.0 + r)


def _scaled(result: IntegralResult, factor: complex) -> IntegralResult:
    return IntegralResult(
        value=factor * result.value,
        error_estimate=abs(factor) * result.error_estimate,
        refinements_used=result.refinements_used,
        converged=result.converged,
    )


def project(f: CompactMonomial, z, spec: QuadratureSpec | None = None) -> IntegralResult:
    """Pf(z) = integral over the support of f(w) / (1 - z conj(w))^2 dA(w)."""
    z = _point(z)
    spec = (spec or QuadratureSpec.from_settings()).with_radius(f.radius)

    def integrand(w):
        w_bar = np.conj(w)
        return w_bar ** f.a * w ** f.b / (1.0 - z * w_bar) ** 2

    return integrate_disk(integrand, MeasureSpec(0.0), spec)


def project_monomial_closed(a: int, b: int, radius: float, z):
    """
    Closed form of P applied to conj(w)^a w^b on radius*D.

    Expanding (1 - z conj(w))^-2 = sum (l+1) z^l conj(w)^l, only l = b - a
    survives orthogonality: (b-a+1) z^(b-a) R^(2b+2) / (b+1), or 0 if b < a.
    """
    zs = check_disk(z)
    f = CompactMonomial(a, b, radius)
    m = f.b - f.a
    if m < 0:
        value = np.zeros_like(zs)
    else:
        value = (m + 1) * zs ** m * radius ** (2 * b + 2) / (b + 1)
    return complex(value) if np.ndim(z) == 0 else value


def project_monomial_closed_deriv(a: int, b: int, radius: float, z):
    """(Pf)' for the compact monomial, by differentiating the closed form."""
    zs = check_disk(z)
    f = CompactMonomial(a, b, radius)
    m = f.b - f.a
    if m < 1:
        value = np.zeros_like(zs)
    else:
        value = (m + 1) * m * zs ** (m - 1) * radius ** (2 * b + 2) / (b + 1)
    return complex(value) if np.ndim(z) == 0 else value


def adjoint_series(g: AnalyticFn, form: AdjointForm, z):
    """P*g(z) = (1 - |z|^2)^beta (z^2 g'(z))'."""
    zs = check_disk(z)
    value = _one_minus_sq(zs) ** form.beta * eval_pderiv(g, zs)
    return complex(value) if np.ndim(z) == 0 else value


def adjoint_radius(g: AnalyticFn, z) -> float:
    """
    Outer radius for adjoint_quad at z.

    Polynomials use the whole disk. Other functions use the smallest limit
    radius, or sqrt(|z|) once z gets closer to the boundary, which keeps the
    kernel pole R^2/|z| and the singularities of g on the unit circle equally far
    from the nodes.
    """
    z = _point(z)
    if to_polynomial(g) is not None:
        return 1.0
    return max(min(settings.limit_radii), math.sqrt(abs(z)))


def adjoint_quad(
    g: AnalyticFn, form: AdjointForm, z, spec: QuadratureSpec | None = None
) -> IntegralResult:
    """
    P*g(z) = 2 (1 - |z|^2)^beta z  integral over D of g'(w) / (1 - z conj(w))^3 dA(w).

    The disk integral is taken over R*D with R = spec.outer_radius through
    the dilation identity, exact for analytic g and |z| < R:

        integral_D g'(w) (1 - z conj(w))^-3 dA = R^-2 integral_{RD} g'(w) (1 - (z/R^2) conj(w))^-3 dA

    so R = 1 is the literal formula and R < 1 keeps g' bounded on the nodes.
    """
    z = _point(z)
    spec = spec or QuadratureSpec.from_settings()
    radius = spec.outer_radius
    if abs(z) >= radius:
        raise DiskDomainError(f"|z| = {abs(z)} must be below the quadrature radius {radius}")

    zeta = z / radius ** 2

    def integrand(w):
        return g.deriv(w) / (1.0 - zeta * np.conj(w)) ** 3

    integral = integrate_disk(integrand, MeasureSpec(0.0), spec)
    prefactor = 2.0 * float(_one_minus_sq(z)) ** form.beta * z / radius ** 2
    return _scaled(integral, prefactor)


def log_extremal_kernel_closed(w, r: float) -> complex:
    """I_r for the witness g = 1/2 log((1+z)/(1-z)): r^2 / (1 - r^4 conj(w)^2)^2."""
    w = _point(w)
    w_bar = w.conjugate()
    return r * r / (1.0 - r ** 4 * w_bar * w_bar) ** 2


def truncated_kernel_integral(
    g: AnalyticFn, w, r: float, spec: QuadratureSpec | None = None
) -> TruncatedIntegral:
    """I_r = integral over rD of conj(g'(z)) / (1 - z conj(w))^3 dA(z)."""
    w = _point(w)
    if not 0.0 < r < 1.0:
        raise ValueError(f"Truncation radius r = {r} must lie in (0, 1)")
    spec = (spec or QuadratureSpec.from_settings()).with_radius(r)
    w_bar = w.conjugate()

    def integrand(z):
        return np.conj(g.deriv(z)) / (1.0 - z * w_bar) ** 3

    result = integrate_disk(integrand, MeasureSpec(0.0), spec)
    closed = log_extremal_kernel_closed(w, r) if isinstance(g, LogExtremal) else None
    return TruncatedIntegral(result, closed)


def besov_pairing(f: AnalyticFn, g: AnalyticFn, spec: QuadratureSpec | None = None) -> IntegralResult:
    """<f, g> = integral of f'(z) conj(g'(z)) dA(z)."""
    spec = spec or QuadratureSpec.from_settings()

    def integrand(z):
        return f.deriv(z) * np.conj(g.deriv(z))

    return integrate_disk(integrand, MeasureSpec(0.0), spec)


def project_series_coeffs(p: Polynomial) -> Polynomial:
    """
    Coefficients of P p by orthogonality: p_k (k+1) times the moment of |w|^(2k).

    Reproduces p exactly up to rounding of (k+1) * 1/(k+1).
    """
    coeffs = [c * ((k + 1) * monomial_moment(k, k, 1.0)) for k, c in enumerate(p.coeffs)]
    return Polynomial(tuple(coeffs))


def project_series(p: Polynomial, z):
    zs = check_disk(z)
    value = project_series_coeffs(p).value(zs)
    return complex(value) if np.ndim(z) == 0 else value


def reproduce_weighted(
    p: AnalyticFn, alpha: float, z, spec: QuadratureSpec | None = None
) -> IntegralResult:
    """
    P_alpha p(z) = integral of p(w) (1 - z conj(w))^-(2+alpha) (alpha+1) (1 - |w|^2)^alpha dA(w).

    Reproduces analytic p for alpha > -1; the weight is carried exactly on the
    whole disk and folded into the radial rule on smaller disks.
    """
    if alpha <= -1.0:
        raise ValueError(f"The weighted projection needs alpha > -1, got {alpha}")
    z = _point(z)
    spec = spec or QuadratureSpec.from_settings()
    power = 2.0 + alpha

    def integrand(w):
        return p.value(w) / (1.0 - z * np.conj(w)) ** power

    return _scaled(integrate_disk(integrand, MeasureSpec(alpha), spec), alpha + 1.0)


def _derivative_coeffs(g: AnalyticFn) -> np.ndarray:
    poly = to_polynomial(g)
    if poly is None:
        raise ValueError(f"Duality checks need a polynomial g, got {type(g).__name__}")
    k = np.arange(1, poly.degree + 1)
    return poly.coefficient_array[1:] * k


def duality_check(
    fm: CompactMonomial,
    g: AnalyticFn,
    form: AdjointForm,
    spec: QuadratureSpec | None = None,
    closed_tol: float = 1e-12,
    quad_tol: float = 1e-5,
) -> CheckReport:
    """
    Compare both sides of the duality between P and P* on (fm, g).

    With beta = -alpha the weights cancel, so the left side is
    integral f conj((z^2 g')') dA over the support and the right side is
    integral (Pf)' conj(g') dA over D. Both equal
    conj(c_{m-1}) (m+1) R^(2b+2) / (b+1), m = b - a, where g' = sum c_k z^k,
    and vanish when m - 1 is out of range.
    """
    started = time.perf_counter()
    spec = spec or QuadratureSpec.from_settings()
    c = _derivative_coeffs(g)
    a, b, radius = fm.a, fm.b, fm.radius
    m = b - a
    scale = radius ** (2 * b + 2) / (b + 1)

    if 0 <= m - 1 < len(c):
        prediction = complex(np.conj(c[m - 1]) * (m + 1) * scale)
    else:
        prediction = 0j

    left_terms = [
        np.conj(ck) * (k + 2) * monomial_moment(a + k + 1, b, radius)
        for k, ck in enumerate(c)
    ]
    closed_left = complex(sum(left_terms, 0j))

    if m >= 1:
        pf_coef = (m + 1) * m * scale
        right_terms = [np.conj(ck) * pf_coef * monomial_moment(k, m - 1, 1.0) for k, ck in enumerate(c)]
        closed_right = complex(sum(right_terms, 0j))
    else:
        closed_right = 0j

    def pstar(z):
        return _one_minus_sq(z) ** form.beta * (2.0 * z * g.deriv(z) + z * z * g.second_deriv(z))

    left = integrate_disk(
        lambda z: np.conj(z) ** a * z ** b * np.conj(pstar(z)),
        MeasureSpec(-form.beta),
        spec.with_radius(radius),
    )
    right = integrate_disk(
        lambda z: project_monomial_closed_deriv(a, b, radius, z) * np.conj(g.deriv(z)),
        MeasureSpec(0.0),
        spec.with_radius(1.0),
    )

    closed_scale = max(1.0, abs(prediction))
    closed_ok = (
        abs(closed_left - closed_right) <= closed_tol * closed_scale
        and abs(closed_left - prediction) <= closed_tol * closed_scale
    )
    quad_ok = (
        abs(left.value - closed_left) <= quad_tol * closed_scale
        and abs(right.value - closed_right) <= quad_tol * closed_scale
    )

    notes = []
    if not (left.converged and right.converged):
        notes.append("quadrature did not reach its tolerance")

    return CheckReport(
        name="duality",
        anchor=DUALITY_ANCHOR,
        computed=[closed_left, closed_right, left.value, right.value],
        expected=[prediction],
        tolerance=closed_tol,
        passed=closed_ok and quad_ok,
        runtime=time.perf_counter() - started,
        labels=["closed_left", "closed_right", "quad_left", "quad_right"],
        notes=notes,
    )
