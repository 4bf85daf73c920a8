"""Golden-section minimization on a bracket"""
import math
from typing import Callable, Tuple

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section(f: Callable[[float], float], a: float, b: float, iterations: int = 60) -> Tuple[float, float]:
    """
    Minimize a unimodal f on [a, b] with a fixed number of golden-section steps.

    Returns (x_min, f(x_min)); the original endpoints are compared too so a
    minimum sitting on the bracket edge is not lost.
    """
    if a > b:
        a, b = b, a
    edges = [(f(a), a), (f(b), b)]
    dist = b - a
    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc, yd = f(c), f(d)

    for _ in range(iterations):
        if yc < yd:
            b = d
            d, yd = c, yc
            dist = INV_PHI * dist
            c = a + INV_PHI_SQ * dist
            yc = f(c)
        else:
            a = c
            c, yc = d, yd
            dist = INV_PHI * dist
            d = a + INV_PHI * dist
            yd = f(d)

    x_mid = 0.5 * (a + b)
    best_value, best_x = min([(f(x_mid), x_mid), (yc, c), (yd, d)] + edges)
    return best_x, best_value
