"""Analytic functions on the unit disk and the explicit test families."""

from __future__ import annotations

import cmath
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly


MAX_DEGREE = 100_000

# Below this distance from 1 the closed form of S_n is replaced by direct summation
CLOSED_FORM_CUTOFF = 1e-4


class DiskDomainError(ValueError):
    """A point (or parameter) lies outside the open unit disk."""


def check_disk(z) -> np.ndarray:
    """Return ``z`` as a complex array, rejecting non-finite points and |z| >= 1."""
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DiskDomainError(f"Non-finite point in {z!r}")
    outside = np.abs(arr) >= 1.0
    if np.any(outside):
        bad = complex(arr[outside].flat[0])
        raise DiskDomainError(f"Point {bad} is not in the open unit disk")
    return arr


def _check_parameter(lam: complex, name: str) -> complex:
    lam = complex(lam)
    if not (math.isfinite(lam.real) and math.isfinite(lam.imag)) or abs(lam) >= 1.0:
        raise DiskDomainError(f"{name} = {lam} must satisfy |{name}| < 1")
    return lam


def _shaped(z, values: np.ndarray):
    """Scalars in, Python complex out; arrays in, arrays out."""
    if np.ndim(z) == 0:
        return complex(values)
    return values


class AnalyticFn(ABC):
    """
    An analytic function on the unit disk with exact derivatives.

    Subclasses evaluate on complex numpy arrays without domain checks;
    the module-level ``eval_*`` functions add the checks.
    """

    @abstractmethod
    def value(self, z: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def deriv(self, z: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def second_deriv(self, z: np.ndarray) -> np.ndarray:
        ...

    def __mul__(self, scalar) -> LinearCombo:
        return LinearCombo(((complex(scalar), self),))

    __rmul__ = __mul__

    def __add__(self, other: AnalyticFn) -> LinearCombo:
        return LinearCombo(((1.0, self), (1.0, other)))


@dataclass(frozen=True)
class Polynomial(AnalyticFn):
    """Dense polynomial, coefficients in ascending powers."""
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("Polynomial needs at least one coefficient")
        if len(coeffs) - 1 > MAX_DEGREE:
            raise ValueError(f"Degree {len(coeffs) - 1} exceeds the cap {MAX_DEGREE}")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in coeffs):
            raise ValueError("Polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @cached_property
    def coefficient_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    @cached_property
    def _d1(self) -> np.ndarray:
        if self.degree == 0:
            return np.zeros(1, dtype=complex)
        return npoly.polyder(self.coefficient_array)

    @cached_property
    def _d2(self) -> np.ndarray:
        if self.degree <= 1:
            return np.zeros(1, dtype=complex)
        return npoly.polyder(self.coefficient_array, 2)

    def value(self, z):
        return npoly.polyval(z, self.coefficient_array)

    def deriv(self, z):
        return npoly.polyval(z, self._d1)

    def second_deriv(self, z):
        return npoly.polyval(z, self._d2)


@dataclass(frozen=True)
class MobiusAtom(AnalyticFn):
    """The disk automorphism phi_lambda(z) = (z - lambda) / (1 - conj(lambda) z)."""
    lam: complex

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_parameter(self.lam, "lambda"))

    def value(self, z):
        return (z - self.lam) / (1.0 - self.lam.conjugate() * z)

    def deriv(self, z):
        return (1.0 - abs(self.lam) ** 2) / (1.0 - self.lam.conjugate() * z) ** 2

    def second_deriv(self, z):
        lam_bar = self.lam.conjugate()
        return 2.0 * lam_bar * (1.0 - abs(self.lam) ** 2) / (1.0 - lam_bar * z) ** 3


@dataclass(frozen=True)
class LogExtremal(AnalyticFn):
    """
    The witness g(z) = 1/2 log((1+z)/(1-z)).

    Principal branch: (1+z)/(1-z) has positive real part on the disk, so
    g is analytic there with g(0) = 0.
    """

    def value(self, z):
        return 0.5 * np.log((1.0 + z) / (1.0 - z))

    def deriv(self, z):
        return 1.0 / (1.0 - z * z)

    def second_deriv(self, z):
        return 2.0 * z / (1.0 - z * z) ** 2


@dataclass(frozen=True)
class GznFamily(AnalyticFn):
    """g_z^n(w) = (1/C_n) sum_{k=0}^n conj(z)^k w^{k+1}, stored through gzn_build."""
    n: int
    base: complex

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n = {self.n} must be nonnegative")
        object.__setattr__(self, "base", _check_parameter(self.base, "base"))

    @cached_property
    def polynomial(self) -> Polynomial:
        return gzn_build(self.n, self.base)

    def value(self, z):
        return self.polynomial.value(z)

    def deriv(self, z):
        return self.polynomial.deriv(z)

    def second_deriv(self, z):
        return self.polynomial.second_deriv(z)


@dataclass(frozen=True)
class LinearCombo(AnalyticFn):
    """Finite linear combination; derivatives are taken term by term."""
    terms: tuple[tuple[complex, AnalyticFn], ...]

    def __post_init__(self):
        terms = tuple((complex(c), f) for c, f in self.terms)
        if not terms:
            raise ValueError("LinearCombo needs at least one term")
        object.__setattr__(self, "terms", terms)

    def value(self, z):
        return sum(c * f.value(z) for c, f in self.terms)

    def deriv(self, z):
        return sum(c * f.deriv(z) for c, f in self.terms)

    def second_deriv(self, z):
        return sum(c * f.second_deriv(z) for c, f in self.terms)


@dataclass(frozen=True)
class Precomposed(AnalyticFn):
    """z -> outer(e^{i theta} phi_lambda(z)); every disk automorphism has this inner form."""
    outer: AnalyticFn
    lam: complex = 0j
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_parameter(self.lam, "lambda"))

    @cached_property
    def _rotation(self) -> complex:
        return cmath.exp(1j * self.theta)

    def _inner(self, z):
        lam_bar = self.lam.conjugate()
        denom = 1.0 - lam_bar * z
        scale = 1.0 - abs(self.lam) ** 2
        u = self._rotation * (z - self.lam) / denom
        du = self._rotation * scale / denom ** 2
        ddu = self._rotation * 2.0 * lam_bar * scale / denom ** 3
        return u, du, ddu

    def value(self, z):
        u, _, _ = self._inner(z)
        return self.outer.value(u)

    def deriv(self, z):
        u, du, _ = self._inner(z)
        return self.outer.deriv(u) * du

    def second_deriv(self, z):
        u, du, ddu = self._inner(z)
        return self.outer.second_deriv(u) * du ** 2 + self.outer.deriv(u) * ddu


@dataclass(frozen=True)
class CompactMonomial:
    """f(w) = conj(w)^a w^b on |w| <= radius, zero outside."""
    a: int
    b: int
    radius: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError(f"Powers must be nonnegative, got a={self.a}, b={self.b}")
        if not 0.0 < self.radius < 1.0:
            raise ValueError(f"Support radius {self.radius} must lie in (0, 1)")

    def value(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        inside = np.abs(w) <= self.radius
        return np.where(inside, np.conj(w) ** self.a * w ** self.b, 0.0)


def eval_value(f: AnalyticFn, z):
    """f(z) for |z| < 1."""
    arr = check_disk(z)
    return _shaped(z, f.value(arr))


def eval_deriv(f: AnalyticFn, z):
    """f'(z) by the variant's closed form."""
    arr = check_disk(z)
    return _shaped(z, f.deriv(arr))


def eval_second_deriv(f: AnalyticFn, z):
    arr = check_disk(z)
    return _shaped(z, f.second_deriv(arr))


def eval_pderiv(f: AnalyticFn, z):
    """(z^2 f'(z))' = 2z f'(z) + z^2 f''(z)."""
    arr = check_disk(z)
    return _shaped(z, 2.0 * arr * f.deriv(arr) + arr * arr * f.second_deriv(arr))


def to_polynomial(f: AnalyticFn) -> Polynomial | None:
    """Collapse polynomial-valued variants to one Polynomial, or None."""
    if isinstance(f, Polynomial):
        return f
    if isinstance(f, GznFamily):
        return f.polynomial
    if isinstance(f, LinearCombo):
        parts = [(c, to_polynomial(g)) for c, g in f.terms]
        if any(p is None for _, p in parts):
            return None
        size = max(p.degree for _, p in parts) + 1
        total = np.zeros(size, dtype=complex)
        for c, p in parts:
            total[: p.degree + 1] += c * p.coefficient_array
        return Polynomial(tuple(total))
    return None


def cn(n: int) -> float:
    """C_n = 1 + sum_{k=1}^n (k/(k+1))^{k/2}."""
    if n < 0:
        raise ValueError(f"n = {n} must be nonnegative")
    k = np.arange(1, n + 1, dtype=float)
    return 1.0 + math.fsum((k / (k + 1.0)) ** (k / 2.0))


def gzn_build(n: int, base: complex) -> Polynomial:
    """Coefficients of w^{k+1} are conj(base)^k / C_n, k = 0..n; constant term 0."""
    if n < 0:
        raise ValueError(f"n = {n} must be nonnegative")
    base = _check_parameter(base, "base")
    if n + 1 > MAX_DEGREE:
        raise ValueError(f"Degree {n + 1} exceeds the cap {MAX_DEGREE}")
    powers = np.ones(n + 1, dtype=complex)
    if n > 0:
        with np.errstate(under="ignore"):
            powers[1:] = np.cumprod(np.full(n, base.conjugate()))
    coeffs = np.concatenate(([0j], powers / cn(n)))
    return Polynomial(tuple(coeffs))


def _check_unit_interval(s: float) -> float:
    s = float(s)
    if not 0.0 <= s < 1.0:
        raise ValueError(f"s = {s} must lie in [0, 1)")
    return s


def geom_partial_direct(n: int, s: float) -> float:
    """S_n(s) = sum_{k=0}^n (k+1)(k+2) s^k by compensated direct summation."""
    if n < 0:
        raise ValueError(f"n = {n} must be nonnegative")
    s = _check_unit_interval(s)
    k = np.arange(n + 1, dtype=float)
    with np.errstate(under="ignore"):
        terms = (k + 1.0) * (k + 2.0) * s ** k
    return math.fsum(terms)


def closed_form_applies(n: int, s: float) -> bool:
    """Whether geom_partial_closed evaluates the closed form rather than summing."""
    t = 1.0 - s
    return CLOSED_FORM_CUTOFF <= t < 1.0 and (n + 1) * t >= 1.0


def geom_partial_closed(n: int, s: float) -> float:
    """
    Closed form of S_n(s) = sum_{k=0}^n (k+1)(k+2) s^k.

    The textbook right-hand side
        (-2 + s^{n+1} ((n+2)(n+3) - 2(n+1)(n+3) s + (n+1)(n+2) s^2)) / (s-1)^3
    is evaluated with t = 1 - s, where the bracket equals
    2 (1 + (n+1) t + (n+1)(n+2) t^2 / 2), as -2 expm1(L) / t^3 with
    L = (n+1) log1p(-t) + log1p((n+1) t + (n+1)(n+2) t^2 / 2).
    When (n+1) t < 1 or t < 1e-4 the two logarithms cancel and the
    (short) direct sum is used instead.
    """
    if n < 0:
        raise ValueError(f"n = {n} must be nonnegative")
    s = _check_unit_interval(s)
    if not closed_form_applies(n, s):
        return geom_partial_direct(n, s)

    t = 1.0 - s
    m = n + 1.0
    log_ratio = m * math.log1p(-t) + math.log1p(m * t + m * (n + 2.0) * t * t / 2.0)
    return -2.0 * math.expm1(log_ratio) / t ** 3
