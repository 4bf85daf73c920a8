"""
Kernel families for the nonlocal consumption term.

Every family is a product of "blocks": a one-dimensional window factor on the
first coordinate and/or a partner block (1-D exponential, Gaussian, or the
radial 3-D exponential). Densities, closed-form images, normalization
quadrature and numeric transforms are all assembled block by block.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import quad

from apps.errors import ArgumentError
from apps.worker.stability_config import STABILITY_CONFIG

logger = logging.getLogger(__name__)

CONFIG = STABILITY_CONFIG["kernels"]


class KernelFamily(str, Enum):
    EXP_1D = "exp1d"
    EXP_PRODUCT_2D = "expproduct2d"
    GAUSSIAN = "gaussian"
    EXP_3D = "exp3d"
    WINDOW_1D = "window1d"
    WINDOW_EXP_2D = "windowexp2d"
    WINDOW_GAUSS_2D = "windowgauss2d"
    WINDOW_EXP_4D = "windowexp4d"


FIXED_DIMS = {
    KernelFamily.EXP_1D: 1,
    KernelFamily.EXP_PRODUCT_2D: 2,
    KernelFamily.EXP_3D: 3,
    KernelFamily.WINDOW_1D: 1,
    KernelFamily.WINDOW_EXP_2D: 2,
    KernelFamily.WINDOW_GAUSS_2D: 2,
    KernelFamily.WINDOW_EXP_4D: 4,
}

POSITIVE_FAMILIES = frozenset({
    KernelFamily.EXP_1D,
    KernelFamily.EXP_PRODUCT_2D,
    KernelFamily.GAUSSIAN,
    KernelFamily.EXP_3D,
})

WINDOW_FAMILIES = frozenset({
    KernelFamily.WINDOW_1D,
    KernelFamily.WINDOW_EXP_2D,
    KernelFamily.WINDOW_GAUSS_2D,
    KernelFamily.WINDOW_EXP_4D,
})

# Block kinds: (kind, number of coordinates)
_EXP, _GAUSS, _EXP3, _WINDOW = "exp", "gauss", "exp3", "window"


def parse_family(name: str) -> KernelFamily:
    """Parse a CLI/JSON family name such as 'exp1d' or 'WindowExp4D'"""
    key = name.strip().lower().replace("_", "").replace("-", "")
    for family in KernelFamily:
        if family.value == key:
            return family
    raise ArgumentError(f"Unknown kernel family: {name!r}")


@dataclass(frozen=True)
class KernelSpec:
    family: KernelFamily
    alpha: float = 1.0
    window_half_width: Optional[float] = None
    dim: Optional[int] = None

    def __post_init__(self):
        family = KernelFamily(self.family)
        object.__setattr__(self, "family", family)

        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ArgumentError(f"alpha must be positive, got {self.alpha}")

        if family in WINDOW_FAMILIES:
            n_half = self.window_half_width
            if n_half is None or not (math.isfinite(n_half) and n_half > 0):
                raise ArgumentError(f"{family.value} needs a positive window half-width N, got {n_half}")
        elif self.window_half_width is not None:
            raise ArgumentError(f"{family.value} has no window half-width")

        if family is KernelFamily.GAUSSIAN:
            dim = 1 if self.dim is None else int(self.dim)
            if dim < 1:
                raise ArgumentError(f"Gaussian dimension must be >= 1, got {self.dim}")
        else:
            dim = FIXED_DIMS[family]
            if self.dim is not None and int(self.dim) != dim:
                raise ArgumentError(f"{family.value} lives in dimension {dim}, got dim={self.dim}")
        object.__setattr__(self, "dim", dim)

    @property
    def is_window(self) -> bool:
        return self.family in WINDOW_FAMILIES

    @property
    def has_positive_image(self) -> bool:
        return self.family in POSITIVE_FAMILIES

    @property
    def N(self) -> Optional[float]:
        return self.window_half_width

    @property
    def has_decaying_factor(self) -> bool:
        """False only for the bare window"""
        return self.family is not KernelFamily.WINDOW_1D


def _blocks(spec: KernelSpec) -> List[Tuple[str, int]]:
    family = spec.family
    if family is KernelFamily.EXP_1D:
        return [(_EXP, 1)]
    if family is KernelFamily.EXP_PRODUCT_2D:
        return [(_EXP, 1), (_EXP, 1)]
    if family is KernelFamily.GAUSSIAN:
        return [(_GAUSS, spec.dim)]
    if family is KernelFamily.EXP_3D:
        return [(_EXP3, 3)]
    if family is KernelFamily.WINDOW_1D:
        return [(_WINDOW, 1)]
    if family is KernelFamily.WINDOW_EXP_2D:
        return [(_WINDOW, 1), (_EXP, 1)]
    if family is KernelFamily.WINDOW_GAUSS_2D:
        return [(_WINDOW, 1), (_GAUSS, 1)]
    return [(_WINDOW, 1), (_EXP3, 3)]


def as_points(spec: KernelSpec, x) -> Tuple[np.ndarray, bool]:
    """Return (points with trailing axis = dim, scalar_input flag)"""
    arr = np.asarray(x, dtype=float)
    if spec.dim == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., None]
    if arr.shape[-1] != spec.dim:
        raise ArgumentError(f"Expected points of dimension {spec.dim}, got shape {np.shape(x)}")
    return arr, arr.ndim == 1


def _block_norms(spec: KernelSpec, pts: np.ndarray):
    start = 0
    for kind, width in _blocks(spec):
        block = pts[..., start:start + width]
        yield kind, width, np.sqrt(np.sum(block * block, axis=-1))
        start += width


def _block_density(kind: str, width: int, r, alpha: float, n_half: Optional[float]):
    if kind == _EXP:
        return 0.5 * alpha * np.exp(-alpha * r)
    if kind == _GAUSS:
        return (alpha / math.pi) ** (width / 2) * np.exp(-alpha * r * r)
    if kind == _EXP3:
        return alpha ** 3 / (8 * math.pi) * np.exp(-alpha * r)
    return np.where(r <= n_half, 1.0 / (2 * n_half), 0.0)


def sinc(z):
    """sin(z)/z with the removable singularity filled by its Taylor series"""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < CONFIG["sinc_series_cutoff"]
    safe = np.where(small, 1.0, z)
    z2 = z * z
    return np.where(small, 1.0 - z2 / 6.0 + z2 * z2 / 120.0, np.sin(safe) / safe)


def _block_image(kind: str, r, alpha: float, n_half: Optional[float]):
    if kind == _EXP:
        a2 = alpha * alpha
        return a2 / (r * r + a2)
    if kind == _GAUSS:
        return np.exp(-r * r / (4 * alpha))
    if kind == _EXP3:
        a2 = alpha * alpha
        return a2 * a2 / (a2 + r * r) ** 2
    return sinc(r * n_half)


def kernel_density(spec: KernelSpec, x):
    """Density φ(x); Window* families vanish outside the slab |x₁| ≤ N"""
    pts, scalar = as_points(spec, x)
    value = np.ones(pts.shape[:-1])
    for kind, width, r in _block_norms(spec, pts):
        value = value * _block_density(kind, width, r, spec.alpha, spec.N)
    return float(value) if scalar else value


def scaled_fourier_image(spec: KernelSpec, p):
    """(2π)^{n/2}·φ̂(p), the factor multiplying k₂ or c_k² in the symbol; equals 1 at p = 0"""
    pts, scalar = as_points(spec, p)
    value = np.ones(pts.shape[:-1])
    for kind, _, r in _block_norms(spec, pts):
        value = value * _block_image(kind, r, spec.alpha, spec.N)
    return float(value) if scalar else value


def decay_length(spec: KernelSpec) -> float:
    """Length scale of the decaying partner block (N for the bare window)"""
    kinds = {kind for kind, _ in _blocks(spec)}
    if _GAUSS in kinds:
        return 1.0 / math.sqrt(spec.alpha)
    if kinds & {_EXP, _EXP3}:
        return 1.0 / spec.alpha
    return spec.N


def tail_exponent(spec: KernelSpec, radius: float) -> float:
    """
    Smallest exponent x such that a partner block loses mass of order e^{−x}
    beyond `radius`: αR for exponential blocks, αR² for Gaussian ones.
    The bare window has no tail.
    """
    exponents = []
    for kind, _ in _blocks(spec):
        if kind == _GAUSS:
            exponents.append(spec.alpha * radius * radius)
        elif kind != _WINDOW:
            exponents.append(spec.alpha * radius)
    return min(exponents, default=math.inf)


@lru_cache(maxsize=1)
def _legendre_panel():
    return np.polynomial.legendre.leggauss(16)


def _composite_gauss_legendre(lo: float, hi: float, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite 16-point Gauss-Legendre rule with about `points` nodes on [lo, hi]"""
    nodes, weights = _legendre_panel()
    panels = max(4, points // 16)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return x, w


def check_normalization(
    spec: KernelSpec,
    quad_points: Optional[int] = None,
    truncation_radius: Optional[float] = None,
) -> float:
    """
    |∫φ − 1| by tensor-product quadrature on the truncated domain.

    The integrand is split at its kinks (origin, window edges), each smooth
    piece is integrated with composite Gauss-Legendre, and the window factor is
    integrated exactly on its support.
    """
    quad_points = quad_points or CONFIG["normalization_quad_points"]
    if quad_points < CONFIG["min_quad_points"]:
        raise ArgumentError(f"quad_points must be >= {CONFIG['min_quad_points']}, got {quad_points}")

    length = decay_length(spec)
    if truncation_radius is None:
        truncation_radius = CONFIG["normalization_decay_lengths"] * length
    exponent = tail_exponent(spec, truncation_radius)
    if exponent < CONFIG["min_tail_exponent"]:
        raise ArgumentError(
            f"truncation radius {truncation_radius} leaves a tail of order e^-{exponent:.3g}; "
            f"need e^-{CONFIG['min_tail_exponent']} or smaller"
        )

    total = 1.0
    for kind, width in _blocks(spec):
        if kind == _WINDOW:
            x, w = _composite_gauss_legendre(0.0, spec.N, quad_points)
            integral = 2.0 * np.sum(w * _block_density(kind, 1, x, spec.alpha, spec.N))
        else:
            x, w = _composite_gauss_legendre(0.0, truncation_radius, quad_points)
            if kind == _EXP:
                integral = 2.0 * np.sum(w * _block_density(kind, 1, x, spec.alpha, None))
            elif kind == _GAUSS:
                axis = 2.0 * np.sum(w * _block_density(kind, 1, x, spec.alpha, None))
                integral = axis ** width
            else:
                integral = np.sum(w * 4 * math.pi * x * x * _block_density(kind, 3, x, spec.alpha, None))
        total *= float(integral)

    residual = abs(total - 1.0)
    logger.debug(f"Normalization of {spec.family.value}: residual {residual:.3e}")
    return residual


def _numeric_block_transform(kind: str, width: int, block: np.ndarray, alpha: float, n_half: Optional[float]) -> float:
    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    if kind == _WINDOW:
        r = abs(float(block[0]))
        if r == 0.0:
            return 1.0
        return quad(lambda _: 1.0 / n_half, 0.0, n_half, weight="cos", wvar=r, **opts)[0]

    if kind == _EXP:
        r = abs(float(block[0]))
        f = lambda x: alpha * np.exp(-alpha * x)
        if r == 0.0:
            return quad(f, 0.0, np.inf, **opts)[0]
        return quad(f, 0.0, np.inf, weight="cos", wvar=r, **opts)[0]

    if kind == _GAUSS:
        f = lambda x: 2.0 * math.sqrt(alpha / math.pi) * np.exp(-alpha * x * x)
        value = 1.0
        for component in block:
            r = abs(float(component))
            if r == 0.0:
                value *= quad(f, 0.0, np.inf, **opts)[0]
            else:
                value *= quad(f, 0.0, np.inf, weight="cos", wvar=r, **opts)[0]
        return value

    rho = float(np.sqrt(np.sum(block * block)))
    density = lambda r: alpha ** 3 / (8 * math.pi) * np.exp(-alpha * r)
    if rho == 0.0:
        return quad(lambda r: 4 * math.pi * r * r * density(r), 0.0, np.inf, **opts)[0]
    integral = quad(lambda r: 4 * math.pi * r * density(r), 0.0, np.inf, weight="sin", wvar=rho, **opts)[0]
    return integral / rho


def numeric_fourier_image(spec: KernelSpec, p) -> float:
    """∫φ(x)e^{−ip·x}dx by direct quadrature, block by block"""
    pts, scalar = as_points(spec, p)
    if not scalar:
        raise ArgumentError("numeric_fourier_image evaluates one frequency at a time")
    value = 1.0
    start = 0
    for kind, width in _blocks(spec):
        value *= _numeric_block_transform(kind, width, pts[start:start + width], spec.alpha, spec.N)
        start += width
    return value


def embed_reduced(spec: KernelSpec, u, v=None) -> np.ndarray:
    """
    Map reduced coordinates to full frequency vectors: u goes to the first
    coordinate, v (if given) to the first coordinate of the second block.
    """
    u = np.asarray(u, dtype=float)
    if v is not None:
        u, v = np.broadcast_arrays(u, np.asarray(v, dtype=float))
    pts = np.zeros(u.shape + (spec.dim,))
    pts[..., 0] = u
    if v is not None:
        blocks = _blocks(spec)
        if len(blocks) < 2:
            raise ArgumentError(f"{spec.family.value} has a single block; no second reduced coordinate")
        pts[..., blocks[0][1]] = v
    return pts


@dataclass(frozen=True)
class PositivityScan:
    all_nonnegative: bool
    min_value: float
    min_location: Tuple[float, ...]


def fourier_positivity_scan(spec: KernelSpec, radius: float, samples: int) -> PositivityScan:
    """Scan the scaled image on a grid and report whether it ever goes negative"""
    if radius <= 0:
        raise ArgumentError(f"radius must be positive, got {radius}")
    if samples < CONFIG["positivity_min_samples"]:
        raise ArgumentError(f"samples must be >= {CONFIG['positivity_min_samples']}, got {samples}")

    axis = np.linspace(0.0, radius, samples)
    if len(_blocks(spec)) == 1:
        pts = embed_reduced(spec, axis)
    else:
        uu, vv = np.meshgrid(axis, axis, indexing="ij")
        pts = embed_reduced(spec, uu, vv)

    values = scaled_fourier_image(spec, pts.reshape(-1, spec.dim))
    idx = int(np.argmin(values))
    min_value = float(values[idx])
    location = tuple(float(c) for c in pts.reshape(-1, spec.dim)[idx])

    return PositivityScan(
        all_nonnegative=bool(min_value >= 0.0),
        min_value=min_value,
        min_location=location,
    )
