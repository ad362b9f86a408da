"""Search for functions with a large 𝒫(f) / Bloch seminorm ratio."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from rich.console import Console
from scipy.optimize import minimize

from config import settings
from src.funcspace import AnalyticFn, LinearCombo, MobiusAtom, Polynomial
from src.function_specs import to_spec
from src.norms import ScanSpec, functional_P, lemma5_estimates


console = Console(stderr=True)

LEMMA_BOUND = 4.0
BOUND_SLACK = 1e-6
MAX_POLY_DEGREE = 30

Family = Literal["polynomial", "mobius"]


class LemmaBoundViolation(ValueError):
    """An evaluated candidate exceeded the ratio bound 4."""


@dataclass(frozen=True)
class SearchConfig:
    """
    Search parameters.

    ``degree`` is the polynomial degree for the polynomial family and the
    number of atoms for the Möbius family. ``restarts`` counts random starts
    on top of the warm starts; 0 runs the warm starts only.
    """
    family: Family = "polynomial"
    degree: int = 12
    restarts: int = 20
    iterations: int = 2000
    seed: int = 7
    step_init: float = 0.1
    step_tol: float = 1e-8
    workers: int = 1

    def __post_init__(self):
        if self.family not in ("polynomial", "mobius"):
            raise ValueError(f"Unknown search family {self.family!r}")
        if self.degree < 1:
            raise ValueError("Search family needs degree >= 1; constants have zero seminorm")
        if self.family == "polynomial" and self.degree > MAX_POLY_DEGREE:
            raise ValueError(f"Polynomial degree {self.degree} exceeds {MAX_POLY_DEGREE}")
        if self.restarts < 0 or self.iterations < 1 or self.workers < 1:
            raise ValueError("restarts must be >= 0, iterations and workers >= 1")
        if self.step_init <= 0 or self.step_tol <= 0:
            raise ValueError("step_init and step_tol must be positive")

    @classmethod
    def from_settings(cls, **overrides) -> SearchConfig:
        values = {
            "degree": settings.search_degree,
            "restarts": settings.search_restarts,
            "iterations": settings.search_iterations,
            "seed": settings.search_seed,
            "step_init": settings.search_step_init,
            "step_tol": settings.search_step_tol,
            "workers": settings.search_workers,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def dimension(self) -> int:
        return 2 * self.degree if self.family == "polynomial" else 4 * self.degree


@dataclass
class RestartOutcome:
    """End point of one local search."""
    index: int
    label: str
    params: np.ndarray
    value: float
    iterations: int
    history: list[tuple[int, int, float]]
    degenerate: int

    @property
    def improved(self) -> bool:
        """Whether the coarse-scan value rose above the starting value."""
        return self.history[-1][2] > self.history[0][2]


@dataclass
class SearchResult:
    """Best candidate across restarts."""
    best_value: float
    best_params: list[float]
    witness_point: complex
    restarts_run: int
    history: list[tuple[int, int, float]]
    restart_values: list[float] = field(default_factory=list)
    restart_labels: list[str] = field(default_factory=list)
    restart_iterations: list[int] = field(default_factory=list)
    degenerate_evaluations: int = 0
    best_label: str = ""
    notes: list[str] = field(default_factory=list)

    def to_record(self, config: SearchConfig) -> dict:
        return {
            "family": config.family,
            "degree": config.degree,
            "seed": config.seed,
            "best_value": self.best_value,
            "best_params": self.best_params,
            "best_function": to_spec(assemble(self.best_params, config)),
            "witness_point": [self.witness_point.real, self.witness_point.imag],
            "restarts_run": self.restarts_run,
            "restart_values": self.restart_values,
            "restart_labels": self.restart_labels,
            "restart_iterations": self.restart_iterations,
            "degenerate_evaluations": self.degenerate_evaluations,
            "best_label": self.best_label,
            "notes": self.notes,
        }


def assemble(params, config: SearchConfig) -> AnalyticFn:
    """Build the candidate function encoded by ``params``."""
    params = np.asarray(params, dtype=float)
    if params.shape != (config.dimension,):
        raise ValueError(f"Expected {config.dimension} parameters, got {params.shape}")

    if config.family == "polynomial":
        d = config.degree
        coeffs = params[:d] + 1j * params[d:]
        return Polynomial((0j, *coeffs))

    terms = []
    for a_re, a_im, v_re, v_im in params.reshape(-1, 4):
        v = complex(v_re, v_im)
        lam = v / np.sqrt(1.0 + abs(v) ** 2)
        terms.append((complex(a_re, a_im), MobiusAtom(lam)))
    return LinearCombo(tuple(terms))


def rotate_params(params, theta: float, config: SearchConfig) -> np.ndarray:
    """Parameters of z -> f(e^{i theta} z)."""
    params = np.asarray(params, dtype=float)
    rotation = np.exp(1j * theta)

    if config.family == "polynomial":
        d = config.degree
        coeffs = (params[:d] + 1j * params[d:]) * rotation ** np.arange(1, d + 1)
        return np.concatenate([coeffs.real, coeffs.imag])

    atoms = params.reshape(-1, 4).copy()
    a = (atoms[:, 0] + 1j * atoms[:, 1]) * rotation
    v = (atoms[:, 2] + 1j * atoms[:, 3]) / rotation
    return np.column_stack([a.real, a.imag, v.real, v.imag]).ravel()


def _ratio(params, config: SearchConfig, scan: ScanSpec | None) -> tuple[float, bool]:
    p_est, b_est = lemma5_estimates(assemble(params, config), scan)
    if b_est.value == 0.0:
        return 0.0, True
    value = p_est.value / b_est.value
    if value > LEMMA_BOUND + BOUND_SLACK:
        raise LemmaBoundViolation(
            f"Ratio {value!r} exceeds {LEMMA_BOUND} at params {list(params)}"
        )
    return value, False


def objective(params, config: SearchConfig, scan: ScanSpec | None = None) -> float:
    """
    𝒫(f) / Bloch seminorm of the encoded f, the scale-free form of maximizing 𝒫 on the unit sphere.

    Returns 0 for parameters encoding a constant.
    """
    return _ratio(params, config, scan)[0]


def warm_starts(config: SearchConfig) -> list[tuple[str, np.ndarray]]:
    """Identity, truncated witness series and top monomial (polynomials); identity (Möbius)."""
    d = config.degree
    if config.family == "mobius":
        start = np.zeros(config.dimension)
        start[0] = 1.0
        start[2::4] = np.linspace(0.0, 0.5, d)
        return [("identity", start)]

    starts = []
    identity = np.zeros(config.dimension)
    identity[0] = 1.0
    starts.append(("identity", identity))

    if d >= 3:
        witness = np.zeros(config.dimension)
        for k in range(1, d + 1, 2):
            witness[k - 1] = 1.0 / k
        starts.append(("witness", witness))

    if d >= 2:
        monomial = np.zeros(config.dimension)
        monomial[d - 1] = 1.0
        starts.append(("monomial", monomial))
    return starts


def random_start(config: SearchConfig, index: int) -> np.ndarray:
    """Coefficients uniform in the complex unit box; one stream per restart."""
    rng = np.random.default_rng([config.seed, index])
    return rng.uniform(-1.0, 1.0, config.dimension)


def _run_restart(
    index: int,
    label: str,
    start: np.ndarray,
    config: SearchConfig,
    coarse: ScanSpec,
    full: ScanSpec,
) -> RestartOutcome:
    memo: dict[bytes, float] = {}
    degenerate = 0

    def loss(x: np.ndarray) -> float:
        nonlocal degenerate
        key = x.tobytes()
        if key not in memo:
            value, flat = _ratio(x, config, coarse)
            degenerate += flat
            memo[key] = value
        return -memo[key]

    history: list[tuple[int, int, float]] = []
    best_so_far = -loss(start)
    history.append((index, 0, best_so_far))

    def record(xk: np.ndarray):
        nonlocal best_so_far
        best_so_far = max(best_so_far, -loss(xk))
        history.append((index, len(history), best_so_far))

    simplex = np.vstack([start, start + config.step_init * np.eye(len(start))])
    result = minimize(
        loss,
        start,
        method="Nelder-Mead",
        callback=record,
        options={
            "maxiter": config.iterations,
            "xatol": config.step_tol,
            "fatol": config.step_tol,
            "initial_simplex": simplex,
        },
    )

    end = np.asarray(result.x)
    value, _ = _ratio(end, config, full)
    return RestartOutcome(index, label, end, value, int(result.nit), history, degenerate)


def search(config: SearchConfig | None = None, full_scan: ScanSpec | None = None) -> SearchResult:
    """
    Nelder-Mead ascent of the ratio from warm and seeded random starts.

    Candidates are compared on a coarse scan; each restart's end point is
    re-scored on the full scan. Restarts run on ``config.workers`` threads
    and are merged in restart order, so ties go to the lowest index.
    """
    config = config or SearchConfig.from_settings()
    coarse = ScanSpec.coarse()
    full = full_scan or ScanSpec.from_settings()

    starts = warm_starts(config)
    offset = len(starts)
    starts += [("random", random_start(config, i)) for i in range(config.restarts)]

    def run(item: tuple[int, tuple[str, np.ndarray]]) -> RestartOutcome:
        index, (label, start) = item
        return _run_restart(index, label, start, config, coarse, full)

    console.print(
        f"[blue]Searching {config.family} family (degree {config.degree}): "
        f"{offset} warm + {config.restarts} random starts[/blue]"
    )
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        outcomes = list(pool.map(run, enumerate(starts)))

    best = outcomes[0]
    for outcome in outcomes[1:]:
        if outcome.value > best.value:
            best = outcome

    witness = functional_P(assemble(best.params, config), full).argmax
    history = [entry for outcome in outcomes for entry in outcome.history]
    degenerate = sum(o.degenerate for o in outcomes)

    notes = [f"best candidate came from restart {best.index} ({best.label} start)"]
    if not best.improved:
        notes.append(f"the simplex did not improve the {best.label} start on the coarse scan")
    if degenerate:
        notes.append(f"{degenerate} evaluations hit a constant function and scored 0")

    return SearchResult(
        best_value=best.value,
        best_params=[float(x) for x in best.params],
        witness_point=complex(witness),
        restarts_run=len(outcomes),
        history=history,
        restart_values=[o.value for o in outcomes],
        restart_labels=[o.label for o in outcomes],
        restart_iterations=[o.iterations for o in outcomes],
        degenerate_evaluations=degenerate,
        best_label=best.label,
        notes=notes,
    )


def write_result(result: SearchResult, config: SearchConfig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(result.to_record(config), indent=2) + "\n", encoding="utf-8")
    return path


def write_history(result: SearchResult, path: Path) -> Path:
    """History CSV with columns restart, iteration, value (best so far)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["restart", "iteration", "value"])
        writer.writerows((r, i, repr(v)) for r, i, v in result.history)
    return path
