"""Seeded parameter draws for agreement checks and property tests"""
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from apps.settings import get_settings

PERTURBATIONS = (0.01, 0.1)


@dataclass(frozen=True)
class P2Draw:
    a: float
    b: float
    alpha: float


@dataclass(frozen=True)
class Theorem1Draw:
    N: float


@dataclass(frozen=True)
class Branch2Draw:
    d: float
    a: float
    b: float
    alpha: float


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    return np.random.default_rng(get_settings().seed if seed is None else seed)


def draw_p2_parameters(
    rng: np.random.Generator,
    count: int,
    min_ratio: float = 1.05,
    max_ratio: float = 2.5,
) -> List[P2Draw]:
    """
    b ~ U(0.3, 3), a = 2√b·r with r ~ U(min_ratio, max_ratio), α ~ U(0.5, 2).

    a²/4 = b·r², so min_ratio > 1 keeps the draws away from the degenerate case.
    """
    b = rng.uniform(0.3, 3.0, size=count)
    ratio = rng.uniform(min_ratio, max_ratio, size=count)
    alpha = rng.uniform(0.5, 2.0, size=count)
    a = 2.0 * np.sqrt(b) * ratio
    return [P2Draw(a=float(x), b=float(y), alpha=float(z)) for x, y, z in zip(a, b, alpha)]


def draw_theorem1_parameters(rng: np.random.Generator, count: int) -> List[Theorem1Draw]:
    """Window half-widths N ~ U(0.5, 3)"""
    return [Theorem1Draw(N=float(n)) for n in rng.uniform(0.5, 3.0, size=count)]


def draw_branch2_parameters(rng: np.random.Generator, count: int) -> List[Branch2Draw]:
    """Non-degenerate draws with d log-uniform on [0.01, 10]"""
    base = draw_p2_parameters(rng, count)
    d = np.exp(rng.uniform(math.log(0.01), math.log(10.0), size=count))
    return [Branch2Draw(d=float(x), a=p.a, b=p.b, alpha=p.alpha) for x, p in zip(d, base)]


def perturbed_values(threshold: float, deltas: Sequence[float] = PERTURBATIONS) -> Iterator[Tuple[float, float]]:
    """(δ, threshold·(1 + δ)) for ±δ"""
    for delta in deltas:
        for signed in (-delta, delta):
            yield signed, threshold * (1.0 + signed)
