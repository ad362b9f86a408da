"""Bloch and Besov seminorms and weighted sup-functionals over the disk."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from rich.console import Console
from scipy.optimize import minimize_scalar

from config import settings
from src.diskquad import MeasureSpec, QuadratureSpec, integrate_disk
from src.funcspace import AnalyticFn, check_disk, eval_value


console = Console(stderr=True)

Evaluator = Callable[[np.ndarray], np.ndarray]


class UndefinedRatioError(ValueError):
    """The Bloch seminorm in a ratio denominator is zero."""


@dataclass(frozen=True)
class SupEstimate:
    """Supremum of a weighted modulus over the disk, with scan metadata."""
    value: float
    argmax: complex
    grid_levels: int
    boundary_offset: float
    uncertainty: float


@dataclass(frozen=True)
class ScanSpec:
    """
    Boundary-clustered polar scan: rings at radii 1 - 2^(-j / rings_per_octave).

    Ring j carries 2^min(max(min_angular_exp, ceil(j / rings_per_octave) + 4), max_angular_exp)
    equally spaced samples; ring 0 is the origin alone.
    """
    levels: int = 20
    rings_per_octave: int = 1
    min_angular_exp: int = 8
    max_angular_exp: int = 14
    refine_rounds: int = 2
    max_rounds: int = 20
    refine_tol: float = 1e-13

    def __post_init__(self):
        if self.levels < 1 or self.rings_per_octave < 1:
            raise ValueError("A scan needs at least one ring")
        if not 0 <= self.min_angular_exp <= self.max_angular_exp:
            raise ValueError("Angular exponents must satisfy 0 <= min <= max")
        if self.refine_rounds < 0 or self.max_rounds < self.refine_rounds:
            raise ValueError("Refinement rounds must satisfy 0 <= refine_rounds <= max_rounds")

    @classmethod
    def from_settings(cls, **overrides) -> ScanSpec:
        values = {
            "levels": settings.sup_levels,
            "min_angular_exp": settings.sup_min_angular_exp,
            "max_angular_exp": settings.sup_max_angular_exp,
            "refine_rounds": settings.sup_refine_rounds,
        }
        values.update(overrides)
        return cls(**values)

    @classmethod
    def coarse(cls) -> ScanSpec:
        """Cheap scan for inner loops of searches; no local refinement."""
        return cls(levels=12, rings_per_octave=2, min_angular_exp=8, max_angular_exp=10,
                   refine_rounds=0, max_rounds=0)

    @property
    def ring_count(self) -> int:
        return self.levels * self.rings_per_octave + 1


@lru_cache(maxsize=8)
def _rings(scan: ScanSpec) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(scan.ring_count)
    radii = -np.expm1(-j / scan.rings_per_octave * math.log(2.0))
    exps = np.minimum(
        np.maximum(scan.min_angular_exp, np.ceil(j / scan.rings_per_octave) + 4),
        scan.max_angular_exp,
    ).astype(int)
    counts = 2 ** exps
    counts[0] = 1
    radii.setflags(write=False)
    counts.setflags(write=False)
    return radii, counts


@lru_cache(maxsize=8)
def _grid(scan: ScanSpec) -> tuple[np.ndarray, np.ndarray]:
    radii, counts = _rings(scan)
    points, ring_index = [], []
    for j, (r, m) in enumerate(zip(radii, counts)):
        points.append(r * np.exp(2j * np.pi * np.arange(m) / m))
        ring_index.append(np.full(m, j))
    grid = np.concatenate(points)
    index = np.concatenate(ring_index)
    grid.setflags(write=False)
    index.setflags(write=False)
    return grid, index


def sample_grid(scan: ScanSpec | None = None) -> np.ndarray:
    """All scan points, ordered by ring then angle."""
    return _grid(scan or ScanSpec.from_settings())[0]


def _weight(z: np.ndarray, beta: float) -> np.ndarray:
    r = np.abs(z)
    return ((1.0 - r) * (1.0 + r)) ** beta


def _refine(
    objective: Callable[[complex], float],
    start: complex,
    start_value: float,
    ring: int,
    scan: ScanSpec,
) -> tuple[float, complex, int, float]:
    """Alternate bounded Brent searches in radius and angle around ``start``."""
    radii, counts = _rings(scan)
    lo = radii[ring - 1] if ring > 0 else 0.0
    hi = radii[ring + 1] if ring + 1 < len(radii) else 0.5 * (radii[ring] + 1.0)
    dt = 2.0 * np.pi / counts[ring]

    r, t = abs(start), float(np.angle(start))
    best = start_value
    gain = 0.0
    rounds = 0
    options = {"xatol": 1e-12}

    for rounds in range(1, scan.max_rounds + 1):
        before = best

        res = minimize_scalar(
            lambda x: -objective(x * np.exp(1j * t)), bounds=(lo, hi),
            method="bounded", options=options,
        )
        if -res.fun > best:
            best, r = -res.fun, float(res.x)

        res = minimize_scalar(
            lambda s: -objective(r * np.exp(1j * s)), bounds=(t - dt, t + dt),
            method="bounded", options=options,
        )
        if -res.fun > best:
            best, t = -res.fun, float(res.x)

        gain = best - before
        if rounds >= scan.refine_rounds and gain <= scan.refine_tol * max(best, 1e-300):
            break

    return best, complex(r * np.exp(1j * t)), rounds, gain


def weighted_sup(h: Evaluator, beta: float, scan: ScanSpec | None = None) -> SupEstimate:
    """
    sup over the disk of (1 - |z|^2)^beta |h(z)|.

    Args:
        h: Vectorized evaluator on complex arrays (points are always inside the disk)
        beta: Weight exponent
        scan: Grid and refinement parameters; defaults to the configured scan

    Returns:
        SupEstimate at the best grid point after local refinement. Ties on the
        grid go to the smallest radius, then the smallest angle.
    """
    scan = scan or ScanSpec.from_settings()
    grid, ring_index = _grid(scan)
    radii, _ = _rings(scan)

    values = _weight(grid, beta) * np.abs(h(grid))
    values = np.where(np.isfinite(values), values, -np.inf)
    best_index = int(np.argmax(values))
    grid_value = float(values[best_index])
    best_point = complex(grid[best_index])
    ring = int(ring_index[best_index])

    def objective(z: complex) -> float:
        w = np.array([z])
        value = float((_weight(w, beta) * np.abs(h(w)))[0])
        return value if math.isfinite(value) else -math.inf

    boundary_offset = float(1.0 - radii[-1])
    if scan.refine_rounds > 0:
        value, point, _, gain = _refine(objective, best_point, grid_value, ring, scan)
        uncertainty = abs(gain)
        boundary_offset = min(boundary_offset, 1.0 - abs(point))
    else:
        value, point = grid_value, best_point
        inner = values[ring_index < len(radii) - 1]
        uncertainty = abs(grid_value - float(inner.max())) if inner.size else 0.0

    return SupEstimate(
        value=value,
        argmax=point,
        grid_levels=scan.ring_count,
        boundary_offset=boundary_offset,
        uncertainty=uncertainty,
    )


def _pderiv(f: AnalyticFn) -> Evaluator:
    return lambda z: 2.0 * z * f.deriv(z) + z * z * f.second_deriv(z)


def bloch_seminorm(f: AnalyticFn, scan: ScanSpec | None = None) -> SupEstimate:
    """sup (1 - |z|^2) |f'(z)|."""
    return weighted_sup(f.deriv, 1.0, scan)


def bloch_norm(f: AnalyticFn, scan: ScanSpec | None = None) -> float:
    """|f(0)| + Bloch seminorm."""
    return abs(eval_value(f, 0j)) + bloch_seminorm(f, scan).value


def functional_P(f: AnalyticFn, scan: ScanSpec | None = None) -> SupEstimate:
    """sup (1 - |z|^2)^2 |(z^2 f'(z))'|."""
    return weighted_sup(_pderiv(f), 2.0, scan)


def lemma5_estimates(f: AnalyticFn, scan: ScanSpec | None = None) -> tuple[SupEstimate, SupEstimate]:
    """(functional_P, bloch_seminorm) of f under one scan."""
    return functional_P(f, scan), bloch_seminorm(f, scan)


def lemma5_ratio(f: AnalyticFn, scan: ScanSpec | None = None) -> float:
    """functional_P(f) / Bloch seminorm of f; bounded by 4."""
    p_est, b_est = lemma5_estimates(f, scan)
    if b_est.value == 0.0:
        raise UndefinedRatioError(f"Bloch seminorm of {f!r} is zero")
    return p_est.value / b_est.value


def optimal_radius(mod_z: float) -> tuple[float, float]:
    """Maximizer r = sqrt((1 + |z|^2) / 2) of (1 - r^2)(r^2 - |z|^2) and the maximum (1 - |z|^2)^2 / 4."""
    if not 0.0 <= mod_z < 1.0:
        raise ValueError(f"|z| = {mod_z} must lie in [0, 1)")
    s = mod_z * mod_z
    return math.sqrt((1.0 + s) / 2.0), (1.0 - s) ** 2 / 4.0


def lemma5_pointwise_bound(f: AnalyticFn, z, seminorm: float | None = None) -> float:
    """
    Cauchy-estimate bound on (1 - |z|^2)^2 |(z^2 f'(z))'| at one point.

    Integrating over |zeta| = r gives |(z^2 f')'(z)| <= r^3 B / ((1 - r^2)(r^2 - |z|^2));
    at the optimal radius this is 4 r^3 B <= 4 B.
    """
    z = complex(check_disk(z))
    if seminorm is None:
        seminorm = bloch_seminorm(f).value
    r, _ = optimal_radius(abs(z))
    return 4.0 * r ** 3 * seminorm


def besov_seminorm(f: AnalyticFn, p: float, spec: QuadratureSpec | None = None) -> float:
    """
    (integral of (1 - |z|^2)^p |f'|^p dλ)^(1/p).

    The combined weight (1 - |z|^2)^(p-2) has exponent above -1 and is
    integrated exactly over the whole disk.
    """
    if not p > 1.0:
        raise ValueError(f"Besov exponent p = {p} must exceed 1")
    spec = spec or QuadratureSpec.from_settings()
    result = integrate_disk(
        lambda z: np.abs(f.deriv(z)) ** p, MeasureSpec(p - 2.0), spec
    )
    if not result.converged:
        console.print(
            f"[yellow]Besov integral did not converge (error estimate {result.error_estimate:.2e})[/yellow]"
        )
    return max(result.value.real, 0.0) ** (1.0 / p)

