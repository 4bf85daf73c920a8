"""
Brute-force stability oracle.

The linearized operators are Fourier multipliers, so inf σ(L) = inf_p Φ(p).
The oracle scans Φ on a reduced frequency domain (a ray, a quadrant, or the
(p₁, |p_rest|) half-plane), refines the best coarse minima, decides the sign,
and for negative minima builds a trial function whose Fourier support sits
inside the negativity region and evaluates its quadratic form.
"""
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import ndimage
from scipy.optimize import minimize

from apps.errors import ArgumentError, BracketError, PreconditionError
from apps.worker.analysis.line_search import golden_section
from apps.worker.analysis.scalar_roots import bisect
from apps.worker.spectral.kernels import KernelFamily, embed_reduced
from apps.worker.spectral.linearization import SpectralSymbol
from apps.worker.stability_config import STABILITY_CONFIG

logger = logging.getLogger(__name__)

CONFIG = STABILITY_CONFIG["oracle"]


class Reduction(str, Enum):
    RADIAL_1D = "Radial1D"
    PLANAR_2D = "Planar2D"
    AXIAL_RADIAL_2D = "AxialRadial2D"


class OracleVerdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


REDUCTION_FOR_FAMILY = {
    KernelFamily.EXP_1D: Reduction.RADIAL_1D,
    KernelFamily.GAUSSIAN: Reduction.RADIAL_1D,
    KernelFamily.EXP_3D: Reduction.RADIAL_1D,
    KernelFamily.WINDOW_1D: Reduction.RADIAL_1D,
    KernelFamily.EXP_PRODUCT_2D: Reduction.PLANAR_2D,
    KernelFamily.WINDOW_EXP_2D: Reduction.PLANAR_2D,
    KernelFamily.WINDOW_GAUSS_2D: Reduction.PLANAR_2D,
    KernelFamily.WINDOW_EXP_4D: Reduction.AXIAL_RADIAL_2D,
}


@dataclass(frozen=True)
class SearchSpec:
    reduction: Reduction
    radius: float
    coarse_points: int
    refine_iterations: int = CONFIG["refine_iterations"]

    def __post_init__(self):
        object.__setattr__(self, "reduction", Reduction(self.reduction))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ArgumentError(f"Search radius must be positive, got {self.radius}")
        if self.coarse_points < CONFIG["min_coarse_points"]:
            raise ArgumentError(
                f"coarse_points must be >= {CONFIG['min_coarse_points']}, got {self.coarse_points}"
            )
        if self.refine_iterations < 1:
            raise ArgumentError(f"refine_iterations must be >= 1, got {self.refine_iterations}")

    @property
    def is_planar(self) -> bool:
        return self.reduction is not Reduction.RADIAL_1D


@dataclass(frozen=True)
class OracleReport:
    min_value: float
    argmin: Tuple[float, ...]
    reduced_argmin: Tuple[float, ...]
    negativity_region: Tuple[Tuple[float, float], ...]
    boundary_distance: Optional[float]
    witness_value: Optional[float]
    verdict: OracleVerdict
    tolerance: float
    marginal: bool

    @property
    def unstable(self) -> bool:
        return self.verdict is OracleVerdict.UNSTABLE


@dataclass(frozen=True)
class DiagonalCheck:
    radii: Tuple[float, ...]
    max_violation: float
    max_abs_deviation: float
    worst_radius: float
    diagonal_is_minimum: bool


def negativity_tolerance(symbol: SpectralSymbol) -> float:
    return CONFIG["negativity_tolerance"] * max(1.0, symbol.model.b)


def default_search_spec(symbol: SpectralSymbol, coarse_points: Optional[int] = None) -> SearchSpec:
    reduction = REDUCTION_FOR_FAMILY[symbol.kernel.family]
    if coarse_points is None:
        coarse_points = CONFIG["coarse_points_2d"] if reduction is not Reduction.RADIAL_1D else CONFIG["coarse_points_1d"]
    return SearchSpec(reduction=reduction, radius=symbol.coercivity_radius, coarse_points=coarse_points)


def _reduced_symbol(symbol: SpectralSymbol, spec: SearchSpec):
    kernel = symbol.kernel
    if spec.is_planar:
        return lambda u, v: symbol(embed_reduced(kernel, u, v))
    return lambda u: symbol(embed_reduced(kernel, u))


def _check_reduction(symbol: SpectralSymbol, spec: SearchSpec) -> None:
    expected = REDUCTION_FOR_FAMILY[symbol.kernel.family]
    if spec.reduction is not expected:
        raise ArgumentError(
            f"Reduction {spec.reduction.value} does not fit kernel {symbol.kernel.family.value}; "
            f"use {expected.value}"
        )
    if spec.radius < symbol.coercivity_radius:
        logger.warning(
            f"Search radius {spec.radius} is below the coercivity radius {symbol.coercivity_radius:.6g}; "
            f"negative values beyond it would be missed"
        )


def _local_minima(values: np.ndarray, count: int) -> np.ndarray:
    """Flat indices of the `count` lowest grid-local minima"""
    is_min = ndimage.minimum_filter(values, size=3, mode="nearest") == values
    candidates = np.flatnonzero(is_min)
    order = np.argsort(values.ravel()[candidates], kind="stable")
    return candidates[order[:count]]


def _refine_1d(f, axis: np.ndarray, values: np.ndarray, iterations: int) -> Tuple[float, float]:
    best_value, best_u = math.inf, 0.0
    last = len(axis) - 1
    for idx in _local_minima(values, CONFIG["candidates"]):
        lo, hi = axis[max(idx - 1, 0)], axis[min(idx + 1, last)]
        u, value = golden_section(f, lo, hi, iterations=iterations)
        if value < best_value:
            best_value, best_u = value, u
    return best_u, best_value


def _refine_2d(f, axis: np.ndarray, values: np.ndarray, iterations: int) -> Tuple[Tuple[float, float], float]:
    best_value, best_point = math.inf, (0.0, 0.0)
    last = len(axis) - 1
    for flat in _local_minima(values, CONFIG["candidates"]):
        i, j = np.unravel_index(flat, values.shape)
        start = (axis[i], axis[j])
        bounds = [
            (axis[max(i - 1, 0)], axis[min(i + 1, last)]),
            (axis[max(j - 1, 0)], axis[min(j + 1, last)]),
        ]
        result = minimize(
            lambda x: f(x[0], x[1]),
            x0=np.array(start),
            method="Nelder-Mead",
            bounds=bounds,
            options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 40 * iterations},
        )
        point, value = (float(result.x[0]), float(result.x[1])), float(result.fun)
        coarse_value = float(values[i, j])
        if coarse_value < value:
            point, value = start, coarse_value
        if value < best_value:
            best_value, best_point = value, point
    return best_point, best_value


def _interval_edge(f, axis: np.ndarray, values: np.ndarray, u0: float, step: int) -> Optional[float]:
    """Zero of f between u0 and the first nonnegative grid point in direction `step`"""
    idx = int(np.searchsorted(axis, u0))
    idx = idx if step > 0 else idx - 1
    prev = u0
    while 0 <= idx < len(axis):
        if values[idx] >= 0.0:
            if values[idx] == 0.0:
                return float(axis[idx])
            try:
                return bisect(f, prev, float(axis[idx])).root
            except BracketError:
                return float(axis[idx])
        prev = float(axis[idx])
        idx += step
    return None


def _region_1d(f, axis: np.ndarray, values: np.ndarray, u0: float):
    right = _interval_edge(f, axis, values, u0, +1)
    left = _interval_edge(f, axis, values, u0, -1)
    hi = float(axis[-1]) if right is None else right
    lo = 0.0 if left is None else left
    # Φ is even, so a region touching the origin extends through it
    left_distance = math.inf if left is None else u0 - lo
    right_distance = math.inf if right is None else hi - u0
    return ((lo, hi),), min(left_distance, right_distance)


def _region_2d(axis: np.ndarray, values: np.ndarray, point: Tuple[float, float]):
    step = axis[1] - axis[0]
    i = int(np.clip(round(point[0] / step), 0, len(axis) - 1))
    j = int(np.clip(round(point[1] / step), 0, len(axis) - 1))
    labels, _ = ndimage.label(values < 0.0)
    if labels[i, j] > 0:
        rows, cols = np.nonzero(labels == labels[i, j])
        box = (
            (max(0.0, axis[rows.min()] - step), min(axis[-1], axis[rows.max()] + step)),
            (max(0.0, axis[cols.min()] - step), min(axis[-1], axis[cols.max()] + step)),
        )
    else:
        box = (
            (max(0.0, point[0] - step), point[0] + step),
            (max(0.0, point[1] - step), point[1] + step),
        )

    nonneg = np.argwhere(values >= 0.0)
    if nonneg.size == 0:
        return box, math.inf
    # mirrored quadrants are never closer than their reflection
    du = axis[nonneg[:, 0]] - point[0]
    dv = axis[nonneg[:, 1]] - point[1]
    return box, float(np.sqrt(np.min(du * du + dv * dv)))


def grid_min_symbol(symbol: SpectralSymbol, spec: Optional[SearchSpec] = None) -> OracleReport:
    """Coarse scan plus local refinement of Φ over the reduced domain"""
    spec = spec or default_search_spec(symbol)
    _check_reduction(symbol, spec)
    f = _reduced_symbol(symbol, spec)
    axis = np.linspace(0.0, spec.radius, spec.coarse_points)

    if spec.is_planar:
        uu, vv = np.meshgrid(axis, axis, indexing="ij")
        values = f(uu, vv)
        reduced, min_value = _refine_2d(f, axis, values, spec.refine_iterations)
        argmin = embed_reduced(symbol.kernel, reduced[0], reduced[1])
    else:
        values = f(axis)
        u0, min_value = _refine_1d(f, axis, values, spec.refine_iterations)
        reduced = (u0,)
        argmin = embed_reduced(symbol.kernel, u0)

    tol = negativity_tolerance(symbol)
    unstable = min_value < -tol
    marginal = abs(min_value) <= tol
    region, distance = (), None
    if unstable:
        if spec.is_planar:
            region, distance = _region_2d(axis, values, reduced)
        else:
            region, distance = _region_1d(f, axis, values, reduced[0])

    report = OracleReport(
        min_value=float(min_value),
        argmin=tuple(float(c) for c in argmin),
        reduced_argmin=tuple(float(c) for c in reduced),
        negativity_region=region,
        boundary_distance=distance,
        witness_value=None,
        verdict=OracleVerdict.UNSTABLE if unstable else OracleVerdict.STABLE,
        tolerance=tol,
        marginal=marginal,
    )
    if unstable:
        witness = instability_witness(symbol, report, CONFIG["ball_fraction"])
        report = replace(report, witness_value=witness)

    logger.info(
        f"Oracle {symbol.kernel.family.value}: min {report.min_value:.6g} at {report.reduced_argmin}, "
        f"{report.verdict.value}"
    )
    return report


def _ball_midpoint_rule(center: np.ndarray, radius: float, points: int) -> Tuple[np.ndarray, float]:
    """Cell centres of a tensor midpoint grid on the cube around the ball, kept if inside"""
    dim = center.shape[0]
    per_axis = max(3, int(round(points ** (1.0 / dim)))) | 1
    h = 2.0 * radius / per_axis
    offsets = -radius + h * (np.arange(per_axis) + 0.5)
    mesh = np.stack(np.meshgrid(*([offsets] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    inside = np.sum(mesh * mesh, axis=-1) <= radius * radius
    return center + mesh[inside], h ** dim


def instability_witness(symbol: SpectralSymbol, report: OracleReport, ball_fraction: float) -> float:
    """
    Quadratic form ∫Φ(p)|ψ̂(p)|²dp for ψ̂ the indicator of a ball around the argmin.

    The ball radius is ball_fraction times the reduced-coordinate distance
    from the argmin to the negativity boundary, which bounds the full-space
    distance from below.
    """
    if not report.negativity_region:
        raise PreconditionError("Empty negativity region: the symbol has no witness")
    if not 0 < ball_fraction <= 1:
        raise ArgumentError(f"ball_fraction must be in (0, 1], got {ball_fraction}")

    distance = report.boundary_distance
    if distance is None or distance <= 0:
        raise PreconditionError("Negativity region has no interior around the argmin")
    if not math.isfinite(distance):
        distance = symbol.coercivity_radius
    radius = ball_fraction * distance

    nodes, weight = _ball_midpoint_rule(np.asarray(report.argmin), radius, CONFIG["witness_points"])
    values = symbol(nodes.reshape(-1, symbol.dim))
    witness = float(np.sum(values) * weight)
    logger.debug(f"Witness on ball radius {radius:.6g} with {len(nodes)} nodes: {witness:.6g}")
    return witness


def spectrum_infimum(symbol: SpectralSymbol, spec: Optional[SearchSpec] = None) -> float:
    """inf σ(L) = inf_p Φ(p) for a Fourier multiplier"""
    return grid_min_symbol(symbol, spec).min_value


def diagonal_reduction_check(
    symbol: SpectralSymbol,
    radii: Optional[np.ndarray] = None,
    angles: int = 256,
) -> DiagonalCheck:
    """Compare Φ on circles |p| = r against its value at p₁² = p₂²"""
    if symbol.dim != 2:
        raise ArgumentError(f"Diagonal check needs a planar symbol, got dimension {symbol.dim}")
    if radii is None:
        radii = np.linspace(0.0, symbol.coercivity_radius, 64)
    radii = np.asarray(radii, dtype=float)
    theta = np.linspace(0.0, 2.0 * math.pi, angles, endpoint=False)

    circle = np.stack(
        [radii[:, None] * np.cos(theta)[None, :], radii[:, None] * np.sin(theta)[None, :]], axis=-1
    )
    on_circle = symbol(circle)
    diag = radii / math.sqrt(2.0)
    on_diagonal = symbol(np.stack([diag, diag], axis=-1))

    deviation = on_circle - on_diagonal[:, None]
    violation = on_diagonal - on_circle.min(axis=1)
    worst = int(np.argmax(violation))
    tol = 1e-12 * max(1.0, float(np.max(np.abs(on_diagonal))))

    return DiagonalCheck(
        radii=tuple(float(r) for r in radii),
        max_violation=float(violation[worst]),
        max_abs_deviation=float(np.max(np.abs(deviation))),
        worst_radius=float(radii[worst]),
        diagonal_is_minimum=bool(violation[worst] <= tol),
    )
