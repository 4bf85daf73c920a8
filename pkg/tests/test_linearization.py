import math

import numpy as np
import pytest

from apps.errors import ArgumentError, DomainError
from apps.worker.spectral.kernels import KernelFamily, KernelSpec
from apps.worker.spectral.linearization import (
    ModelP1,
    ModelP2,
    build_symbol,
    linearize_p1,
    make_model,
    stationary_p1,
    stationary_p2,
)


def test_stationary_p1():
    """u* = 1/(a+b)"""
    assert stationary_p1(1.0, 1.0) == pytest.approx(0.5)
    assert stationary_p1(0.0, 4.0) == pytest.approx(0.25)


def test_linearize_p1():
    """k₁ = ka/(a+b)², k₂ = kb/(a+b)²"""
    k1, k2 = linearize_p1(4.0, 1.0, 1.0)
    assert k1 == pytest.approx(1.0)
    assert k2 == pytest.approx(1.0)


def test_linearize_p1_rejects_bad_parameters():
    """k ≤ 0, a < 0 or b ≤ 0 are outside the domain"""
    with pytest.raises(DomainError):
        linearize_p1(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        linearize_p1(1.0, -1.0, 1.0)
    with pytest.raises(DomainError):
        linearize_p1(1.0, 1.0, 0.0)


def test_stationary_p2_two_states():
    """a = 2.5, b = 1 gives c₁ = 2, c₂ = 1/2"""
    c1, c2, degenerate = stationary_p2(2.5, 1.0)
    assert c1 == pytest.approx(2.0)
    assert c2 == pytest.approx(0.5)
    assert not degenerate


def test_stationary_p2_degenerate():
    """a² = 4b collapses both states onto a/2"""
    c1, c2, degenerate = stationary_p2(2.0, 1.0)
    assert c1 == c2 == 1.0
    assert degenerate


def test_stationary_p2_no_real_states():
    """a²/4 < b raises DomainError"""
    with pytest.raises(DomainError):
        stationary_p2(1.0, 1.0)


def test_stationary_p2_vieta_random():
    """c₁ + c₂ = a and c₁c₂ = b to rounding"""
    rng = np.random.default_rng(3)
    for _ in range(200):
        b = rng.uniform(0.1, 3.0)
        a = 2.0 * math.sqrt(b) * rng.uniform(1.01, 3.0)
        c1, c2, _ = stationary_p2(a, b)
        assert c1 >= c2 > 0
        assert c1 + c2 == pytest.approx(a, rel=1e-12)
        assert c1 * c2 == pytest.approx(b, rel=1e-12)


def test_c_sq_minus_b_signs():
    """c₁² − b = 3 and c₂² − b = −3/4 for a = 2.5, b = 1"""
    model = ModelP2(d=1.0, a=2.5, b=1.0)
    assert model.c_sq_minus_b(1) == pytest.approx(3.0)
    assert model.c_sq_minus_b(2) == pytest.approx(-0.75)


def test_c_sq_minus_b_degenerate_exact_zero():
    """Degenerate states give exactly zero"""
    model = ModelP2(d=1.0, a=2.0, b=1.0)
    assert model.c_sq_minus_b(1) == 0.0
    assert model.c_sq_minus_b(2) == 0.0


def test_model_p2_requires_positive_d():
    """d ≤ 0 is outside the domain"""
    with pytest.raises(DomainError):
        ModelP2(d=0.0, a=2.5, b=1.0)


def test_symbol_p1_exp1d():
    """Φ(p) = p² + k₁ + k₂α²/(p² + α²)"""
    model = ModelP1(k=4.0, a=1.0, b=1.0)
    kernel = KernelSpec(KernelFamily.EXP_1D, alpha=2.0)
    symbol = build_symbol(model, kernel)
    p = 1.5
    expected = p * p + 1.0 + 1.0 * 4.0 / (p * p + 4.0)
    assert symbol(p) == pytest.approx(expected)
    assert symbol.base_state == pytest.approx(0.5)
    assert symbol.value_at_origin == pytest.approx(2.0)


def test_symbol_p2_branch2_origin():
    """Branch-2 symbol equals c₂² − b at the origin"""
    model = ModelP2(d=1.0, a=2.5, b=1.0)
    symbol = build_symbol(model, KernelSpec(KernelFamily.EXP_1D), branch=2)
    assert symbol(0.0) == pytest.approx(-0.75)


def test_symbol_p2_needs_branch():
    """Problem 2 symbols need branch 1 or 2"""
    model = ModelP2(d=1.0, a=2.5, b=1.0)
    with pytest.raises(ArgumentError):
        build_symbol(model, KernelSpec(KernelFamily.EXP_1D))


def test_symbol_p1_rejects_branch_2():
    """Problem 1 has a single constant state"""
    model = ModelP1(k=1.0, a=1.0, b=1.0)
    with pytest.raises(ArgumentError):
        build_symbol(model, KernelSpec(KernelFamily.EXP_1D), branch=2)


def test_symbol_vectorized_2d():
    """Batched evaluation of a 2-D symbol"""
    model = ModelP2(d=0.5, a=2.5, b=1.0)
    symbol = build_symbol(model, KernelSpec(KernelFamily.EXP_PRODUCT_2D), branch=1)
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    values = symbol(pts)
    assert values.shape == (3,)
    assert values[0] == pytest.approx(3.0)
    assert values[2] == pytest.approx(0.5 * 2.0 + 4.0 * 0.25 - 1.0)


def test_coercivity_radius_bounds_symbol():
    """Φ > 0 everywhere beyond the coercivity radius"""
    rng = np.random.default_rng(5)
    cases = [
        (ModelP2(d=0.05, a=2.5, b=1.0), KernelSpec(KernelFamily.GAUSSIAN, dim=3), 1),
        (ModelP2(d=0.2, a=3.0, b=2.0), KernelSpec(KernelFamily.EXP_3D), 2),
        (ModelP1(k=50.0, a=0.0, b=1.0), KernelSpec(KernelFamily.WINDOW_1D, window_half_width=1.0), None),
    ]
    for model, kernel, branch in cases:
        symbol = build_symbol(model, kernel, branch)
        directions = rng.normal(size=(500, kernel.dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = symbol.coercivity_radius * rng.uniform(1.0, 5.0, size=(500, 1))
        assert np.all(symbol(directions * radii) > 0)


def test_radial_matches_axis_evaluation():
    """radial(r) evaluates Φ at (r, 0, ..., 0)"""
    symbol = build_symbol(ModelP2(d=0.1, a=2.5, b=1.0), KernelSpec(KernelFamily.EXP_3D), 1)
    assert symbol.radial(1.3) == pytest.approx(symbol([1.3, 0.0, 0.0]))


def test_make_model():
    """make_model dispatches on the problem name"""
    assert isinstance(make_model("p1", a=1.0, b=1.0, k=2.0), ModelP1)
    assert isinstance(make_model("P2", a=2.5, b=1.0, d=0.1), ModelP2)
    with pytest.raises(ArgumentError):
        make_model("p2", a=2.5, b=1.0)
    with pytest.raises(ArgumentError):
        make_model("p3", a=2.5, b=1.0, d=0.1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
