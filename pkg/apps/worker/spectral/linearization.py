"""
Constant stationary states, linearization constants and the spectral symbol.

Problem 1:  u_t = Δu + k u² (1 − a u − b φ*u),   u* = 1/(a+b)
Problem 2:  u_t = dΔu + u² (a − φ*u) − b u,      c_{1,2} = a/2 ± √(a²/4 − b)

The linearized operators are Fourier multipliers; their spectra are the
closure of the range of Φ.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from apps.errors import ArgumentError, DomainError
from apps.worker.spectral.kernels import KernelSpec, as_points, scaled_fourier_image
from apps.worker.stability_config import STABILITY_CONFIG

logger = logging.getLogger(__name__)

DEGENERACY_TOL = STABILITY_CONFIG["linearization"]["degeneracy_tolerance"]


def stationary_p1(a: float, b: float) -> float:
    """u* = 1/(a+b)"""
    if a < 0 or b <= 0 or a + b <= 0:
        raise DomainError(f"Problem 1 needs a >= 0 and b > 0, got a={a}, b={b}")
    return 1.0 / (a + b)


def linearize_p1(k: float, a: float, b: float) -> Tuple[float, float]:
    """(k₁, k₂) = (ka/(a+b)², kb/(a+b)²)"""
    if k <= 0:
        raise DomainError(f"k must be positive, got {k}")
    u_star = stationary_p1(a, b)
    scale = k * u_star * u_star
    return scale * a, scale * b


def stationary_p2(a: float, b: float, tol: float = DEGENERACY_TOL) -> Tuple[float, float, bool]:
    """
    Roots c₁ ≥ c₂ of c² − a c + b = 0 and the degeneracy flag.

    c₂ is taken as b/c₁ so that c₁c₂ = b holds to rounding.
    """
    if a <= 0 or b <= 0:
        raise DomainError(f"Problem 2 needs a, b > 0, got a={a}, b={b}")
    quarter = a * a / 4.0
    gap = quarter - b
    band = tol * max(1.0, quarter)
    if gap < -band:
        raise DomainError(f"No real constant states: a²/4 = {quarter} < b = {b}")
    if gap <= band:
        return a / 2.0, a / 2.0, True
    c1 = a / 2.0 + math.sqrt(gap)
    return c1, b / c1, False


def _discriminant_root(a: float, b: float, degenerate: bool) -> float:
    return 0.0 if degenerate else math.sqrt(a * a / 4.0 - b)


@dataclass(frozen=True)
class ModelP1:
    k: float
    a: float
    b: float

    def __post_init__(self):
        linearize_p1(self.k, self.a, self.b)

    @property
    def u_star(self) -> float:
        return stationary_p1(self.a, self.b)

    @property
    def k1(self) -> float:
        return linearize_p1(self.k, self.a, self.b)[0]

    @property
    def k2(self) -> float:
        return linearize_p1(self.k, self.a, self.b)[1]


@dataclass(frozen=True)
class ModelP2:
    d: float
    a: float
    b: float
    c1: float = field(init=False)
    c2: float = field(init=False)
    degenerate: bool = field(init=False)

    def __post_init__(self):
        if not self.d > 0:
            raise DomainError(f"Diffusion coefficient must be positive, got d={self.d}")
        c1, c2, degenerate = stationary_p2(self.a, self.b)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)
        object.__setattr__(self, "degenerate", degenerate)

    def c(self, branch: int) -> float:
        if branch not in (1, 2):
            raise ArgumentError(f"branch must be 1 or 2, got {branch}")
        return self.c1 if branch == 1 else self.c2

    def c_sq_minus_b(self, branch: int) -> float:
        """c_k² − b via s(2s ± a), exact zero in the degenerate case"""
        self.c(branch)
        s = _discriminant_root(self.a, self.b, self.degenerate)
        if branch == 1:
            return s * (2.0 * s + self.a)
        return -s * (self.a - 2.0 * s)


Model = Union[ModelP1, ModelP2]


@dataclass(frozen=True)
class SpectralSymbol:
    model: Model
    kernel: KernelSpec
    branch: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.model, ModelP2):
            if self.branch not in (1, 2):
                raise ArgumentError(f"Problem 2 symbols need branch 1 or 2, got {self.branch}")
        elif isinstance(self.model, ModelP1):
            if self.branch not in (None, 1):
                raise ArgumentError("Problem 1 has a single constant state")
            object.__setattr__(self, "branch", None)
        else:
            raise ArgumentError(f"Unsupported model type {type(self.model).__name__}")

    @property
    def dim(self) -> int:
        return self.kernel.dim

    @property
    def is_p1(self) -> bool:
        return isinstance(self.model, ModelP1)

    @property
    def diffusion(self) -> float:
        return 1.0 if self.is_p1 else self.model.d

    @property
    def convolution_weight(self) -> float:
        """k₂ or c_k²"""
        if self.is_p1:
            return self.model.k2
        c = self.model.c(self.branch)
        return c * c

    @property
    def base_state(self) -> float:
        return self.model.u_star if self.is_p1 else self.model.c(self.branch)

    @property
    def value_at_origin(self) -> float:
        if self.is_p1:
            return self.model.k1 + self.model.k2
        return self.model.c_sq_minus_b(self.branch)

    @property
    def coercivity_radius(self) -> float:
        """Radius beyond which Φ > 0 follows from |scaled image| ≤ 1"""
        if self.is_p1:
            return math.sqrt(self.model.k2) + 1.0
        c_sq = self.convolution_weight
        return math.sqrt((self.model.b + c_sq) / self.model.d) + 1.0

    def explicit_part(self, p):
        """Φ(p) without its diffusion term"""
        image = scaled_fourier_image(self.kernel, p)
        if self.is_p1:
            return self.model.k1 + self.model.k2 * image
        return self.convolution_weight * image - self.model.b

    def __call__(self, p):
        pts, scalar = as_points(self.kernel, p)
        p_sq = np.sum(pts * pts, axis=-1)
        value = self.diffusion * p_sq + self.explicit_part(pts)
        if self.is_p1:
            return float(value) if scalar else value
        # origin value through the exact c_k² − b
        value = np.where(p_sq == 0.0, self.value_at_origin, value)
        return float(value) if scalar else value

    def radial(self, r):
        """Φ along the first coordinate axis"""
        r = np.asarray(r, dtype=float)
        pts = np.zeros(r.shape + (self.dim,))
        pts[..., 0] = r
        return self(pts)


def build_symbol(model: Model, kernel: KernelSpec, branch: Optional[int] = None) -> SpectralSymbol:
    """Φ(p) = |p|² + k₁ + k₂·image  or  d|p|² + c_k²·image − b"""
    symbol = SpectralSymbol(model=model, kernel=kernel, branch=branch)
    logger.debug(f"Built symbol for {type(model).__name__}, kernel={kernel.family.value}, branch={symbol.branch}")
    return symbol


def make_model(problem: str, a: float, b: float, k: Optional[float] = None, d: Optional[float] = None) -> Model:
    """ModelP1 from (k, a, b) or ModelP2 from (d, a, b); problem is 'p1' or 'p2'"""
    problem = problem.lower()
    if problem == "p1":
        if k is None:
            raise ArgumentError("Problem 1 needs k")
        return ModelP1(k=k, a=a, b=b)
    if problem == "p2":
        if d is None:
            raise ArgumentError("Problem 2 needs d")
        return ModelP2(d=d, a=a, b=b)
    raise ArgumentError(f"problem must be 'p1' or 'p2', got {problem!r}")
