"""
Sharp spectral stability classifiers for the constant stationary states.

Problem 1 (window kernels, k₁ = 0):   stable iff 1/k₂ ≥ −N² sin z₁ / z₁³
Problem 1 (positive-image kernels):   always stable
Problem 2, branch 2 (a²/4 > b):       always unstable, Φ₂(0) = c₂² − b < 0
Problem 2, branch 1:                  stable iff d ≥ d*, with d* per kernel

    Exp1D          d* = (c₁ − √(c₁²−b))²/α²       degenerate: b/α²
    ExpProduct2D   d* = x*/α²                      degenerate: a²/(4α²)
    Gaussian       d* = s₀ c₁²/(4α)                degenerate: b/(4α)
    Exp3D          d* = 2x*/α²                     degenerate: a²/(2α²)
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple, Union

from apps.errors import ArgumentError, DomainError
from apps.worker.analysis.scalar_roots import (
    lemma7_artifacts,
    lemma8_function,
    lemma8_s0,
    theorem1_threshold,
    z1_root,
)
from apps.worker.scoring.verdict import (
    DEGENERATE,
    TheoremTag,
    Verdict,
    always_stable,
    always_unstable,
    assign_verdict,
)
from apps.worker.spectral.kernels import KernelFamily, KernelSpec
from apps.worker.spectral.linearization import ModelP1, ModelP2, stationary_p2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThresholdDerivation:
    d1: Optional[float] = None
    d2: Optional[float] = None
    q0: Optional[float] = None
    q00: Optional[float] = None
    p0_norm: Optional[float] = None
    x_star: Optional[float] = None
    s0: Optional[float] = None
    z1: Optional[float] = None
    reduced_min_value: Optional[float] = None


class ClassificationResult(NamedTuple):
    branch1: Verdict
    branch2: Optional[Verdict]
    derivation: ThresholdDerivation

    def select(self, branch: Optional[int] = None) -> Verdict:
        if branch == 2:
            if self.branch2 is None:
                raise ArgumentError("Problem 1 has no second branch")
            return self.branch2
        return self.branch1


# Reduced polynomials from the threshold derivations


def n1_poly(p, d: float, alpha: float, c1: float, b: float):
    """N₁(p) = d p⁴ + (dα² − b) p² + α²(c₁² − b)"""
    p2 = p * p
    return d * p2 * p2 + (d * alpha * alpha - b) * p2 + alpha * alpha * (c1 * c1 - b)


def n2_poly(q, d: float, alpha: float, c1: float, b: float):
    """N₂(q) = (2dq − b)(q + α²)² + c₁²α⁴"""
    a2 = alpha * alpha
    return (2.0 * d * q - b) * (q + a2) ** 2 + c1 * c1 * a2 * a2


def n3_poly(q, d: float, alpha: float, a: float):
    """N₃(q) = (8dq − a²)(q + α²)² + a²α⁴"""
    a2 = alpha * alpha
    return (8.0 * d * q - a * a) * (q + a2) ** 2 + a * a * a2 * a2


def theorem2_min_formula(d: float, alpha: float, c1: float, b: float) -> float:
    """Minimum of N₁ over p² ≥ 0 when d < b/α²"""
    a2 = alpha * alpha
    return a2 / (4.0 * d) * (-a2 * d * d + 4.0 * d * (c1 * c1 - b / 2.0) - b * b / a2)


def theorem2_quadratic(d: float, alpha: float, c1: float, b: float) -> float:
    """−α²d² + 4d(c₁² − b/2) − b²/α², whose roots are d₁ and d₂"""
    a2 = alpha * alpha
    return -a2 * d * d + 4.0 * d * (c1 * c1 - b / 2.0) - b * b / a2


def _theorem3_reduced(d: float, alpha: float, c1: float, b: float) -> Tuple[Optional[float], float]:
    """(q₀, min N₂) for effective diffusion d"""
    a2 = alpha * alpha
    if d * a2 < b:
        q0 = (b - d * a2) / (3.0 * d)
        value = (27.0 * c1 * c1 * a2 * a2 * d * d - (b + 2.0 * d * a2) ** 3) / (27.0 * d * d)
        return q0, value
    return None, n2_poly(0.0, d, alpha, c1, b)


def _theorem3_degenerate_reduced(d: float, alpha: float, a: float) -> Tuple[Optional[float], float]:
    """(q₀,₀, min N₃) for effective diffusion d"""
    a2 = alpha * alpha
    if 4.0 * d * a2 < a * a:
        q00 = (a * a - 4.0 * d * a2) / (12.0 * d)
        return q00, n3_poly(q00, d, alpha, a)
    return None, 0.0


def lemma6_signs(a: float, b: float) -> Tuple[float, float]:
    """(c₁² − b, c₂² − b): (+, −) when a²/4 > b, both zero when a²/4 = b"""
    _, _, degenerate = stationary_p2(a, b)
    if degenerate:
        return 0.0, 0.0
    s = math.sqrt(a * a / 4.0 - b)
    return s * (2.0 * s + a), -s * (a - 2.0 * s)


def _p2_setup(d: float, a: float, b: float, alpha: float) -> ModelP2:
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    return ModelP2(d=d, a=a, b=b)


def _p2_result(
    model: ModelP2, threshold: float, tag: TheoremTag, derivation: ThresholdDerivation
) -> ClassificationResult:
    if model.degenerate:
        verdict = assign_verdict(model.d, threshold, tag, branch=DEGENERATE)
        result = ClassificationResult(verdict, verdict, derivation)
    else:
        result = ClassificationResult(
            assign_verdict(model.d, threshold, tag, branch=1),
            always_unstable(TheoremTag.L6, branch=2),
            derivation,
        )
    logger.info(
        f"{tag.value}: d={model.d!r}, threshold={threshold!r}, "
        f"branch1 {'stable' if result.branch1.stable else 'unstable'}"
        f"{' (degenerate)' if model.degenerate else ''}"
    )
    return result


def classify_theorem1(k2: float, N: float, kernel: KernelSpec) -> Verdict:
    """Window kernels with k₁ = 0: stable iff 1/k₂ ≥ −N² sin z₁ / z₁³"""
    if not kernel.is_window:
        raise ArgumentError(f"Theorem 1 covers window kernels only, got {kernel.family.value}")
    if not k2 > 0:
        raise DomainError(f"k2 must be positive, got {k2}")
    threshold = theorem1_threshold(N)
    return assign_verdict(1.0 / k2, threshold, TheoremTag.T1)


def theorem1_derivation(k2: float, N: float) -> ThresholdDerivation:
    """
    reduced_min_value is Φ(z₁/N) = z₁²/N² + k₂ sin z₁/z₁, not the minimum of Φ.

    z₁/N minimizes Φ only when 1/k₂ equals the threshold, where the value is 0.
    The value decreases in k₂, so its sign always matches the verdict.
    """
    z1 = z1_root()
    return ThresholdDerivation(
        z1=z1,
        reduced_min_value=z1 * z1 / (N * N) + k2 * math.sin(z1) / z1,
    )


def classify_theorem2(d: float, a: float, b: float, alpha: float) -> ClassificationResult:
    """Exp1D kernel"""
    model = _p2_setup(d, a, b, alpha)
    a2 = alpha * alpha
    c1 = model.c1
    if model.degenerate:
        # the roots of the quadratic coincide
        d1 = d2 = b / a2
    else:
        s = math.sqrt(model.c_sq_minus_b(1))
        d1 = (c1 + s) ** 2 / a2
        # (c₁ − s)² = (b/(c₁ + s))²
        d2 = (b / (c1 + s)) ** 2 / a2
    if d * a2 < b:
        reduced = theorem2_min_formula(d, alpha, c1, b)
    else:
        reduced = a2 * model.c_sq_minus_b(1)
    derivation = ThresholdDerivation(d1=d1, d2=d2, reduced_min_value=reduced)
    return _p2_result(model, d2, TheoremTag.T2, derivation)


def classify_theorem3(d: float, a: float, b: float, alpha: float) -> ClassificationResult:
    """ExpProduct2D kernel; the minimum sits on the diagonal p₁² = p₂²"""
    model = _p2_setup(d, a, b, alpha)
    a2 = alpha * alpha
    if model.degenerate:
        q00, reduced = _theorem3_degenerate_reduced(d, alpha, a)
        derivation = ThresholdDerivation(q00=q00, reduced_min_value=reduced)
        return _p2_result(model, a * a / (4.0 * a2), TheoremTag.T3, derivation)

    artifacts = lemma7_artifacts(model.c1, b)
    q0, reduced = _theorem3_reduced(d, alpha, model.c1, b)
    derivation = ThresholdDerivation(q0=q0, x_star=artifacts.x_star, reduced_min_value=reduced)
    return _p2_result(model, artifacts.x_star / a2, TheoremTag.T3, derivation)


def classify_theorem4(d: float, a: float, b: float, alpha: float) -> ClassificationResult:
    """Gaussian kernel in any dimension; Φ depends on |p| only"""
    model = _p2_setup(d, a, b, alpha)
    c1_sq = model.c1 * model.c1
    # c₁² = b makes g(s) = −s ln s + s − 1, whose zero on (0, 1] is s = 1
    s0 = 1.0 if model.degenerate else lemma8_s0(model.c1, b).root
    p0_norm = None
    reduced = model.c_sq_minus_b(1)
    if d < c1_sq / (4.0 * alpha):
        p0_norm = 2.0 * math.sqrt(alpha) * math.sqrt(math.log(c1_sq / (4.0 * alpha * d)))
        reduced = c1_sq * lemma8_function(4.0 * alpha * d / c1_sq, model.c1, b)
    derivation = ThresholdDerivation(s0=s0, p0_norm=p0_norm, reduced_min_value=reduced)
    threshold = b / (4.0 * alpha) if model.degenerate else s0 * c1_sq / (4.0 * alpha)
    return _p2_result(model, threshold, TheoremTag.T4, derivation)


def classify_theorem5(d: float, a: float, b: float, alpha: float) -> ClassificationResult:
    """Exp3D kernel: the ExpProduct2D diagonal problem with d/2"""
    model = _p2_setup(d, a, b, alpha)
    a2 = alpha * alpha
    half_d = d / 2.0
    if model.degenerate:
        q00, reduced = _theorem3_degenerate_reduced(half_d, alpha, a)
        derivation = ThresholdDerivation(q00=q00, reduced_min_value=reduced)
        return _p2_result(model, a * a / (2.0 * a2), TheoremTag.T5, derivation)

    artifacts = lemma7_artifacts(model.c1, b)
    q0, reduced = _theorem3_reduced(half_d, alpha, model.c1, b)
    derivation = ThresholdDerivation(q0=q0, x_star=artifacts.x_star, reduced_min_value=reduced)
    return _p2_result(model, 2.0 * artifacts.x_star / a2, TheoremTag.T5, derivation)


def classify_positive_kernel_p1(kernel: KernelSpec, k1: float, k2: float) -> Verdict:
    """Problem 1 with a kernel whose image is positive everywhere"""
    if not kernel.has_positive_image:
        raise ArgumentError(f"{kernel.family.value} does not have a positive Fourier image")
    if k1 < 0 or not k2 > 0:
        raise DomainError(f"Need k1 >= 0 and k2 > 0, got k1={k1}, k2={k2}")
    return always_stable(TheoremTag.POSITIVE_KERNEL)


_P2_CLASSIFIERS = {
    KernelFamily.EXP_1D: classify_theorem2,
    KernelFamily.EXP_PRODUCT_2D: classify_theorem3,
    KernelFamily.GAUSSIAN: classify_theorem4,
    KernelFamily.EXP_3D: classify_theorem5,
}


def classify(model: Union[ModelP1, ModelP2], kernel: KernelSpec) -> ClassificationResult:
    """Route a (model, kernel) pair to the applicable analytic criterion"""
    if isinstance(model, ModelP1):
        if kernel.has_positive_image:
            verdict = classify_positive_kernel_p1(kernel, model.k1, model.k2)
            return ClassificationResult(verdict, None, ThresholdDerivation())
        if model.k1 > 0:
            raise DomainError(
                "No analytic criterion for k1 > 0 with a sign-indefinite kernel; use the oracle"
            )
        verdict = classify_theorem1(model.k2, kernel.N, kernel)
        return ClassificationResult(verdict, None, theorem1_derivation(model.k2, kernel.N))

    classifier = _P2_CLASSIFIERS.get(kernel.family)
    if classifier is None:
        raise DomainError(f"No analytic criterion for problem 2 with kernel {kernel.family.value}")
    return classifier(model.d, model.a, model.b, kernel.alpha)
