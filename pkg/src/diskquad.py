"""Weighted area integrals over disks rD with a polar product rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from config import settings


Integrand = Callable[[np.ndarray], np.ndarray]

MAX_ANGULAR_FLOOR = 2 ** 17
BLOCK_POINTS = 2 ** 20


class QuadratureNaNError(ValueError):
    """The integrand returned a non-finite value at a quadrature node."""


@dataclass(frozen=True)
class MeasureSpec:
    """The measure (1 - |z|^2)^alpha dA(z), with dA normalized to total mass 1."""
    alpha: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha < -2.0:
            raise ValueError(f"Weight exponent alpha = {self.alpha} must be >= -2")


@dataclass(frozen=True)
class QuadratureSpec:
    """Polar product rule parameters plus refinement tolerances."""
    radial_nodes: int = 64
    angular_nodes: int = 128
    outer_radius: float = 1.0
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_refinements: int = 6

    def __post_init__(self):
        if self.radial_nodes < 1:
            raise ValueError(f"radial_nodes = {self.radial_nodes} must be positive")
        if self.angular_nodes < 2 or self.angular_nodes % 2:
            raise ValueError(f"angular_nodes = {self.angular_nodes} must be even and positive")
        if not 0.0 < self.outer_radius <= 1.0:
            raise ValueError(f"outer_radius = {self.outer_radius} must lie in (0, 1]")
        if self.rel_tol < 0 or self.abs_tol < 0:
            raise ValueError("Tolerances must be nonnegative")
        if self.max_refinements < 1:
            raise ValueError(f"max_refinements = {self.max_refinements} must be positive")

    @classmethod
    def from_settings(cls, **overrides) -> QuadratureSpec:
        """Build a spec from the configured defaults; keyword arguments win."""
        values = {
            "radial_nodes": settings.quad_radial_nodes,
            "angular_nodes": settings.quad_angular_nodes,
            "rel_tol": settings.quad_rel_tol,
            "abs_tol": settings.quad_abs_tol,
            "max_refinements": settings.quad_max_refinements,
        }
        values.update(overrides)
        return cls(**values)

    def with_radius(self, outer_radius: float) -> QuadratureSpec:
        return replace(self, outer_radius=outer_radius)


@dataclass(frozen=True)
class IntegralResult:
    """Value of an area integral with its refinement diagnostics."""
    value: complex
    error_estimate: float
    refinements_used: int
    converged: bool


@dataclass(frozen=True)
class Stabilization:
    """Values of a radius-dependent quantity along an r -> 1 sweep."""
    radii: tuple[float, ...]
    values: tuple[complex, ...]

    @property
    def value(self) -> complex:
        return self.values[-1]

    @property
    def differences(self) -> tuple[float, ...]:
        return tuple(abs(b - a) for a, b in zip(self.values, self.values[1:]))

    @property
    def spread(self) -> float:
        return max(self.differences, default=0.0)


@lru_cache(maxsize=128)
def _radial_rule(count: int, alpha: float, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Nodes in u = rho^2 and weights for the integral of (1-u)^alpha F(u) du on [0, radius^2].

    The unit disk is handled by Gauss-Jacobi nodes carrying the weight
    exactly; smaller disks use Gauss-Legendre with the weight folded in.
    """
    if radius < 1.0:
        x, w = roots_legendre(count)
        top = radius * radius
        u = 0.5 * top * (x + 1.0)
        weights = 0.5 * top * w * (1.0 - u) ** alpha
    else:
        if alpha <= -1.0:
            raise ValueError(
                f"Integrating over the whole disk needs alpha > -1, got {alpha}; "
                "use an outer radius below 1"
            )
        if alpha == 0.0:
            x, w = roots_legendre(count)
            weights = 0.5 * w
        else:
            x, w = roots_jacobi(count, alpha, 0.0)
            weights = w * 2.0 ** (-alpha - 1.0)
        u = 0.5 * (x + 1.0)

    u.setflags(write=False)
    weights.setflags(write=False)
    return u, weights


@lru_cache(maxsize=32)
def _angles(count: int) -> np.ndarray:
    t = np.exp(2j * np.pi * np.arange(count) / count)
    t.setflags(write=False)
    return t


def angular_floor(outer_radius: float, rel_tol: float) -> int:
    """
    Smallest power-of-two angle count resolving Fourier modes R^k down to rel_tol.

    Boundary-peaked integrands on RD carry angular modes decaying like R^k.
    """
    if outer_radius >= 1.0:
        return 2
    tol = min(max(rel_tol, 1e-16), 0.5)
    needed = math.log(1.0 / tol) / -math.log(outer_radius)
    return min(2 ** math.ceil(math.log2(max(needed, 2.0))), MAX_ANGULAR_FLOOR)


def _product_rule(
    integrand: Integrand, alpha: float, radius: float, radial: int, angular: int
) -> complex:
    u, weights = _radial_rule(radial, alpha, radius)
    circle = _angles(angular)
    rows = max(1, BLOCK_POINTS // angular)

    total = 0j
    for start in range(0, radial, rows):
        rho = np.sqrt(u[start:start + rows])
        points = rho[:, None] * circle[None, :]
        values = np.asarray(integrand(points), dtype=complex)
        values = np.broadcast_to(values, points.shape)

        finite = np.isfinite(values)
        if not np.all(finite):
            node = complex(points[~finite][0])
            raise QuadratureNaNError(f"Integrand is not finite at node w = {node}")

        total += complex(values.mean(axis=1) @ weights[start:start + rows])
    return total


def integrate_disk(
    integrand: Integrand,
    measure: MeasureSpec | None = None,
    spec: QuadratureSpec | None = None,
) -> IntegralResult:
    """
    Integrate ``integrand`` against (1-|w|^2)^alpha dA over the disk of radius spec.outer_radius.

    Args:
        integrand: Vectorized evaluator mapping a complex array of nodes to values
        measure: Weight exponent; defaults to plain area measure
        spec: Node counts and tolerances; defaults to the configured spec

    Returns:
        IntegralResult whose error_estimate is the last successive difference.
        Both node counts double per refinement; converged is False if the
        tolerance is not met within max_refinements.
    """
    measure = measure or MeasureSpec()
    spec = spec or QuadratureSpec.from_settings()
    if spec.outer_radius >= 1.0 and measure.alpha <= -1.0:
        raise ValueError(
            f"Integrating over the whole disk needs alpha > -1, got {measure.alpha}"
        )

    radial = spec.radial_nodes
    angular = max(spec.angular_nodes, angular_floor(spec.outer_radius, spec.rel_tol))
    previous = _product_rule(integrand, measure.alpha, spec.outer_radius, radial, angular)

    diff = math.inf
    for level in range(1, spec.max_refinements + 1):
        radial *= 2
        angular *= 2
        current = _product_rule(integrand, measure.alpha, spec.outer_radius, radial, angular)
        diff = abs(current - previous)
        if diff <= max(spec.abs_tol, spec.rel_tol * abs(current)):
            return IntegralResult(current, diff, level, True)
        previous = current

    return IntegralResult(previous, diff, spec.max_refinements, False)


def monomial_moment(p: int, q: int, radius: float = 1.0) -> float:
    """Integral of conj(w)^p w^q over radius*D under dA: 0 unless p == q."""
    if p < 0 or q < 0:
        raise ValueError(f"Powers must be nonnegative, got p={p}, q={q}")
    if not 0.0 < radius <= 1.0:
        raise ValueError(f"radius = {radius} must lie in (0, 1]")
    if p != q:
        return 0.0
    return radius ** (2 * p + 2) / (p + 1)


def stabilize(
    fn: Callable[[float], complex | IntegralResult],
    radii: Iterable[float] | None = None,
) -> Stabilization:
    """Evaluate ``fn`` at increasing outer radii to realize an r -> 1 limit."""
    radii = tuple(radii if radii is not None else settings.limit_radii)
    values = []
    for radius in radii:
        result = fn(radius)
        values.append(complex(result.value if isinstance(result, IntegralResult) else result))
    return Stabilization(radii, tuple(values))
