import math

import numpy as np
import pytest

from apps.errors import ArgumentError, DomainError
from apps.worker.analysis.scalar_roots import theorem1_threshold
from apps.worker.scoring.stability_criteria import (
    classify,
    classify_positive_kernel_p1,
    classify_theorem1,
    classify_theorem2,
    classify_theorem3,
    classify_theorem4,
    classify_theorem5,
    lemma6_signs,
    n1_poly,
    n2_poly,
    n3_poly,
    theorem1_derivation,
    theorem2_quadratic,
)
from apps.worker.scoring.verdict import DEGENERATE, TheoremTag, assign_verdict
from apps.worker.spectral.kernels import KernelFamily, KernelSpec
from apps.worker.spectral.linearization import ModelP1, ModelP2, build_symbol

WINDOW = KernelSpec(KernelFamily.WINDOW_1D, window_half_width=1.0)


def _p2_draws(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        b = rng.uniform(0.1, 3.0)
        a = 2.0 * math.sqrt(b) * rng.uniform(1.05, 2.5)
        alpha = rng.uniform(0.5, 2.0)
        yield a, b, alpha


# Theorem 1


def test_theorem1_examples():
    """N = 1: 1/k₂ = 0.012 stable, 1/k₂ = 0.011 unstable"""
    assert classify_theorem1(1.0 / 0.012, 1.0, WINDOW).stable
    assert not classify_theorem1(1.0 / 0.011, 1.0, WINDOW).stable


def test_theorem1_weak_coupling_stable():
    """Tiny k₂ is always stable"""
    verdict = classify_theorem1(1e-9, 1.0, WINDOW)
    assert verdict.stable
    assert verdict.theorem_tag is TheoremTag.T1


def test_theorem1_threshold_inclusive():
    """1/k₂ exactly at the threshold is marginal and stable"""
    threshold = theorem1_threshold(2.0)
    verdict = classify_theorem1(1.0 / threshold, 2.0, KernelSpec(KernelFamily.WINDOW_1D, window_half_width=2.0))
    assert verdict.stable
    assert verdict.marginal
    assert verdict.margin == 0.0


@pytest.mark.parametrize("N", [0.5, 1.0, 2.0])
def test_theorem1_derivation_sign_matches_verdict(N):
    """Φ(z₁/N) is zero at the threshold and has the verdict's sign on either side"""
    kernel = KernelSpec(KernelFamily.WINDOW_1D, window_half_width=N)
    threshold = theorem1_threshold(N)
    at_threshold = theorem1_derivation(1.0 / threshold, N)
    assert at_threshold.z1 == pytest.approx(4.0782, rel=1e-4)
    assert at_threshold.reduced_min_value == pytest.approx(0.0, abs=1e-10 / (N * N))
    for factor in (0.9, 1.1):
        k2 = 1.0 / (factor * threshold)
        value = theorem1_derivation(k2, N).reduced_min_value
        stable = classify_theorem1(k2, N, kernel).stable
        assert (value > 0) == stable
        assert stable == (factor > 1)


def test_theorem1_derivation_from_classify():
    """classify reports the Theorem 1 derivation for window kernels"""
    result = classify(ModelP1(k=1.0 / 0.011, a=0.0, b=1.0), WINDOW)
    assert result.derivation.reduced_min_value < 0
    assert not result.branch1.stable


def test_theorem1_rejects_positive_kernels():
    """Theorem 1 needs a window kernel"""
    with pytest.raises(ArgumentError):
        classify_theorem1(1.0, 1.0, KernelSpec(KernelFamily.EXP_1D))


# Lemma 6


def test_lemma6_example():
    """a = 2.5, b = 1 gives (3, −0.75)"""
    plus, minus = lemma6_signs(2.5, 1.0)
    assert plus == pytest.approx(3.0)
    assert minus == pytest.approx(-0.75)


def test_lemma6_sign_pattern_random():
    """(+, −) for every non-degenerate draw"""
    for a, b, _ in _p2_draws(1000, 61):
        plus, minus = lemma6_signs(a, b)
        assert plus > 0
        assert minus < 0


def test_lemma6_degenerate_and_domain():
    """Both zero at a² = 4b; a²/4 < b raises"""
    assert lemma6_signs(2.0, 1.0) == (0.0, 0.0)
    with pytest.raises(DomainError):
        lemma6_signs(1.0, 1.0)


# Theorem 2 (Exp1D)


def test_theorem2_examples():
    """a = 2.5, b = 1, α = 1: d₂ ≈ 0.0718"""
    stable = classify_theorem2(0.08, 2.5, 1.0, 1.0)
    unstable = classify_theorem2(0.05, 2.5, 1.0, 1.0)
    assert stable.branch1.threshold == pytest.approx(0.07180, rel=1e-3)
    assert stable.branch1.stable
    assert not unstable.branch1.stable
    assert stable.branch1.theorem_tag is TheoremTag.T2


def test_theorem2_branch2_unstable_sentinel():
    """Branch 2 is unstable with a +∞ threshold"""
    result = classify_theorem2(100.0, 2.5, 1.0, 1.0)
    assert not result.branch2.stable
    assert result.branch2.threshold == math.inf
    assert result.branch2.branch == 2
    assert result.branch2.theorem_tag is TheoremTag.L6


def test_theorem2_degenerate():
    """a² = 4b: both branches share the verdict at threshold b/α²"""
    result = classify_theorem2(1.0, 2.0, 1.0, 1.0)
    assert result.branch1 == result.branch2
    assert result.branch1.branch == DEGENERATE
    assert result.branch1.threshold == pytest.approx(1.0)
    assert result.branch1.stable
    assert result.branch1.marginal
    assert result.derivation.d1 == pytest.approx(1.0)
    assert result.derivation.d2 == pytest.approx(1.0)
    assert result.derivation.reduced_min_value == pytest.approx(0.0, abs=1e-15)


def test_theorem2_quadratic_roots_random():
    """d₁, d₂ are the roots of the quadratic with d₂ < b/α² < d₁"""
    for a, b, alpha in _p2_draws(1000, 62):
        derivation = classify_theorem2(1.0, a, b, alpha).derivation
        model = ModelP2(d=1.0, a=a, b=b)
        c1 = model.c1
        a2 = alpha * alpha
        assert 0 < derivation.d2 < b / a2 < derivation.d1
        for root in (derivation.d1, derivation.d2):
            scale = a2 * root * root + 4.0 * root * c1 * c1 + b * b / a2
            assert abs(theorem2_quadratic(root, alpha, c1, b)) <= 1e-10 * scale
        # larger root from the quadratic formula, smaller from Vieta
        larger = ((2.0 * c1 * c1 - b) + 2.0 * c1 * math.sqrt(c1 * c1 - b)) / a2
        assert derivation.d2 == pytest.approx(b * b / (a2 * a2 * larger), rel=1e-12)


def test_theorem2_reduced_minimum():
    """Derivation reports min N₁ over p² ≥ 0"""
    d, a, b, alpha = 0.05, 2.5, 1.0, 1.0
    derivation = classify_theorem2(d, a, b, alpha).derivation
    q_star = (b - d * alpha * alpha) / (2.0 * d)
    assert derivation.reduced_min_value == pytest.approx(n1_poly(math.sqrt(q_star), d, alpha, 2.0, b), rel=1e-12)
    assert derivation.reduced_min_value < 0


def test_threshold_is_inclusive():
    """d exactly at d₂ classifies stable"""
    d2 = classify_theorem2(1.0, 2.5, 1.0, 1.0).derivation.d2
    verdict = classify_theorem2(d2, 2.5, 1.0, 1.0).branch1
    assert verdict.stable
    assert verdict.margin == 0.0


# Theorem 3 (ExpProduct2D)


def test_theorem3_examples():
    """a = 2.5, b = 1, α = 1: d* = x* ≈ 0.1390"""
    assert classify_theorem3(0.15, 2.5, 1.0, 1.0).branch1.stable
    result = classify_theorem3(0.10, 2.5, 1.0, 1.0)
    assert not result.branch1.stable
    assert result.branch1.threshold == pytest.approx(0.1390, rel=1e-3)
    assert result.derivation.x_star == pytest.approx(result.branch1.threshold)


def test_theorem3_reduced_value_matches_n2():
    """Closed form of N₂(q₀) agrees with the polynomial"""
    for a, b, alpha in _p2_draws(200, 63):
        c1 = ModelP2(d=1.0, a=a, b=b).c1
        d = 0.5 * b / (alpha * alpha)
        derivation = classify_theorem3(d, a, b, alpha).derivation
        expected = n2_poly(derivation.q0, d, alpha, c1, b)
        scale = max(1.0, c1 * c1 * alpha ** 4, b * (derivation.q0 + alpha * alpha) ** 2)
        assert abs(derivation.reduced_min_value - expected) <= 1e-10 * scale


def test_theorem3_degenerate():
    """a² = 4b: threshold a²/(4α²) and N₃(0) = 0"""
    result = classify_theorem3(1.0, 2.0, 1.0, 1.0)
    assert result.branch1.threshold == pytest.approx(1.0)
    assert result.branch1.stable
    assert result.branch1.marginal
    assert n3_poly(0.0, 1.0, 1.0, 2.0) == 0.0


# Theorem 4 (Gaussian)


def test_theorem4_examples():
    """a = 2.5, b = 1, α = 1: d* = s₀ ≈ 0.0677"""
    assert classify_theorem4(0.08, 2.5, 1.0, 1.0).branch1.stable
    result = classify_theorem4(0.05, 2.5, 1.0, 1.0)
    assert not result.branch1.stable
    assert result.branch1.threshold == pytest.approx(0.0677, abs=2e-4)


def test_theorem4_critical_radius_is_stationary():
    """Radial derivative of Φ₁ vanishes at |p₀|"""
    for a, b, alpha in _p2_draws(100, 64):
        c1 = ModelP2(d=1.0, a=a, b=b).c1
        d = 0.5 * c1 * c1 / (4.0 * alpha)
        result = classify_theorem4(d, a, b, alpha)
        r0 = result.derivation.p0_norm
        symbol = build_symbol(ModelP2(d=d, a=a, b=b), KernelSpec(KernelFamily.GAUSSIAN, alpha=alpha), 1)
        h = 1e-5
        slope = (symbol.radial(r0 + h) - symbol.radial(r0 - h)) / (2 * h)
        assert abs(slope) <= 1e-6 * max(1.0, c1 * c1)
        assert result.derivation.reduced_min_value == pytest.approx(
            symbol.radial(r0), abs=1e-10 * max(1.0, c1 * c1)
        )


def test_theorem4_degenerate():
    """a² = 4b: threshold b/(4α)"""
    result = classify_theorem4(0.25, 2.0, 1.0, 1.0)
    assert result.branch1.threshold == pytest.approx(0.25)
    assert result.branch1.stable
    assert not classify_theorem4(0.2, 2.0, 1.0, 1.0).branch2.stable
    assert result.derivation.s0 == 1.0
    assert result.derivation.p0_norm is None
    below = classify_theorem4(0.2, 2.0, 1.0, 1.0).derivation
    assert below.s0 == 1.0
    assert below.p0_norm == pytest.approx(2.0 * math.sqrt(math.log(1.25)))
    assert below.reduced_min_value < 0


# Theorem 5 (Exp3D)


def test_theorem5_examples():
    """a = 2.5, b = 1, α = 1: d* = 2x* ≈ 0.2780"""
    assert classify_theorem5(0.30, 2.5, 1.0, 1.0).branch1.stable
    result = classify_theorem5(0.20, 2.5, 1.0, 1.0)
    assert not result.branch1.stable
    assert result.branch1.threshold == pytest.approx(0.2780, rel=1e-3)


def test_theorem5_is_theorem3_with_doubled_threshold():
    """Exp3D threshold is twice the ExpProduct2D one"""
    for a, b, alpha in _p2_draws(50, 65):
        t3 = classify_theorem3(1.0, a, b, alpha).branch1.threshold
        t5 = classify_theorem5(1.0, a, b, alpha).branch1.threshold
        assert t5 == pytest.approx(2.0 * t3, rel=1e-12)


def test_theorem5_degenerate():
    """a² = 4b: threshold a²/(2α²)"""
    result = classify_theorem5(2.0, 2.0, 1.0, 1.0)
    assert result.branch1.threshold == pytest.approx(2.0)
    assert result.branch1.marginal


# Scaling and dispatch


@pytest.mark.parametrize(
    "classifier,factor",
    [(classify_theorem2, 4.0), (classify_theorem3, 4.0), (classify_theorem4, 2.0), (classify_theorem5, 4.0)],
)
def test_threshold_scaling_in_alpha(classifier, factor):
    """Doubling α divides the threshold by 4 (by 2 for the Gaussian)"""
    base = classifier(1.0, 2.5, 1.0, 0.7).branch1.threshold
    scaled = classifier(1.0, 2.5, 1.0, 1.4).branch1.threshold
    assert scaled == pytest.approx(base / factor, rel=1e-10)


def test_threshold_monotone_in_d():
    """Once stable, larger d stays stable"""
    verdicts = [classify_theorem3(d, 2.5, 1.0, 1.0).branch1.stable for d in np.linspace(0.05, 0.5, 40)]
    first_stable = verdicts.index(True)
    assert all(verdicts[first_stable:])
    assert not any(verdicts[:first_stable])


def test_positive_kernel_p1_always_stable():
    """Problem 1 with a positive image is stable"""
    verdict = classify_positive_kernel_p1(KernelSpec(KernelFamily.GAUSSIAN, dim=2), 0.3, 5.0)
    assert verdict.stable
    assert verdict.theorem_tag is TheoremTag.POSITIVE_KERNEL
    with pytest.raises(ArgumentError):
        classify_positive_kernel_p1(WINDOW, 0.0, 1.0)


def test_classify_dispatch():
    """classify routes by problem and kernel family"""
    p2 = classify(ModelP2(d=0.08, a=2.5, b=1.0), KernelSpec(KernelFamily.EXP_1D))
    assert p2.branch1.theorem_tag is TheoremTag.T2
    assert p2.select(2) is p2.branch2

    p1 = classify(ModelP1(k=1.0 / 0.012, a=0.0, b=1.0), WINDOW)
    assert p1.branch1.theorem_tag is TheoremTag.T1
    assert p1.branch2 is None
    with pytest.raises(ArgumentError):
        p1.select(2)


def test_classify_without_analytic_criterion():
    """Window kernels outside Theorem 1 raise DomainError"""
    with pytest.raises(DomainError):
        classify(ModelP1(k=1.0, a=1.0, b=1.0), WINDOW)
    with pytest.raises(DomainError):
        classify(ModelP2(d=1.0, a=2.5, b=1.0), WINDOW)


def test_assign_verdict_margin_sign():
    """margin = parameter − threshold"""
    verdict = assign_verdict(0.3, 0.2, TheoremTag.T2)
    assert verdict.stable
    assert verdict.margin == pytest.approx(0.1)
    assert not assign_verdict(0.1, 0.2, TheoremTag.T2).stable


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
