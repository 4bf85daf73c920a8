"""
Bracketed scalar roots and the special roots the stability thresholds use:

- z₁: unique root of tan z = z/3 on (π, 3π/2)
- x*: unique zero of f(x) = 27c₁²x² − (b+2x)³ on (x₁, b)
- s₀: unique zero of g(s) = −s ln s + s − b/c₁² on (0, 1)
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

from apps.errors import BracketError, ConvergenceError, DomainError
from apps.worker.stability_config import STABILITY_CONFIG

logger = logging.getLogger(__name__)

CONFIG = STABILITY_CONFIG["roots"]


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int
    bracket: Tuple[float, float]


@dataclass(frozen=True)
class Lemma7Artifacts:
    x1: float
    x2: float
    x_star: float
    residual: float


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = CONFIG["tolerance"],
    max_iter: int = CONFIG["max_iterations"],
) -> RootResult:
    """
    Bisection keeping a sign change in [lo, hi] at every step.

    Stops when the bracket is narrower than tol, when f hits zero exactly, or
    when the bracket can no longer be split in floating point.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if lo > hi:
        lo, hi = hi, lo
    f_lo, f_hi = f(lo), f(hi)
    if not f_lo * f_hi < 0:
        raise BracketError(f"No sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")

    for iteration in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return RootResult(root=mid, residual=0.0, iterations=iteration, bracket=(lo, hi))
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

        width = hi - lo
        if width <= tol or width <= 4 * math.ulp(max(abs(lo), abs(hi))):
            root = 0.5 * (lo + hi)
            if not lo < root < hi:
                root = lo if abs(f_lo) <= abs(f_hi) else hi
            return RootResult(root=root, residual=f(root), iterations=iteration, bracket=(lo, hi))

    raise ConvergenceError(f"Bisection did not reach width {tol} within {max_iter} iterations")


def _z1_function(z: float) -> float:
    # tan z = z/3 multiplied through by cos z, no pole on the bracket
    return z * math.cos(z) - 3.0 * math.sin(z)


def solve_z1(tol: float = CONFIG["tolerance"]) -> RootResult:
    """Root of tan z = z/3 on (π, 3π/2); the residual reported is tan z₁ − z₁/3"""
    result = bisect(_z1_function, math.pi, 1.5 * math.pi, tol=tol)
    z1 = result.root
    residual = math.tan(z1) - z1 / 3.0
    logger.debug(f"z1 = {z1!r} after {result.iterations} iterations, residual {residual:.3e}")
    return RootResult(root=z1, residual=residual, iterations=result.iterations, bracket=result.bracket)


@lru_cache(maxsize=1)
def z1_root() -> float:
    """Process-wide memo of z₁ (it is parameter-free)"""
    return solve_z1(CONFIG["fine_tolerance"]).root


def theorem1_threshold(N: float) -> float:
    """−N² sin z₁ / z₁³, the critical value of 1/k₂ for window kernels"""
    if not N > 0:
        raise DomainError(f"Window half-width must be positive, got N={N}")
    z1 = z1_root()
    return -N * N * math.sin(z1) / z1 ** 3


def lemma7_function(x: float, c1: float, b: float) -> float:
    return 27.0 * c1 * c1 * x * x - (b + 2.0 * x) ** 3


def lemma7_artifacts(c1: float, b: float, tol: Optional[float] = None) -> Lemma7Artifacts:
    """x₁, x₂ from the closed form and x* = unique zero of f on (x₁, b)"""
    if b <= 0 or c1 * c1 <= b:
        raise DomainError(f"Lemma 7 needs c1² > b > 0, got c1={c1}, b={b}")
    c1_sq = c1 * c1
    root = 3.0 * c1 * math.sqrt(9.0 * c1_sq - 8.0 * b)
    base = 9.0 * c1_sq - 4.0 * b
    x2 = (base + root) / 8.0
    # x₁x₂ = b²/4 avoids cancellation in base − root
    x1 = b * b / (4.0 * x2)

    if tol is None:
        tol = CONFIG["fine_tolerance"] * max(1.0, b)
    result = bisect(lambda x: lemma7_function(x, c1, b), x1, b, tol=tol)
    return Lemma7Artifacts(x1=x1, x2=x2, x_star=result.root, residual=result.residual)


def lemma8_function(s: float, c1: float, b: float) -> float:
    return -s * math.log(s) + s - b / (c1 * c1)


def lemma8_s0(c1: float, b: float, tol: float = CONFIG["fine_tolerance"]) -> RootResult:
    """Unique zero s₀ ∈ (0, 1) of g(s) = −s ln s + s − b/c₁²"""
    if b <= 0 or c1 * c1 <= b:
        raise DomainError(f"Lemma 8 needs c1² > b > 0, got c1={c1}, b={b}")
    return bisect(lambda s: lemma8_function(s, c1, b), CONFIG["lemma8_lower_endpoint"], 1.0, tol=tol)
