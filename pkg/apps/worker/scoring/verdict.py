import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

from apps.worker.stability_config import STABILITY_CONFIG

MARGINAL_TOL = STABILITY_CONFIG["criteria"]["marginal_tolerance"]

Branch = Union[int, str]
DEGENERATE = "degenerate"


class TheoremTag(str, Enum):
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"
    T4 = "T4"
    T5 = "T5"
    L6 = "L6"
    POSITIVE_KERNEL = "PositiveKernel"


@dataclass(frozen=True)
class Verdict:
    stable: bool
    threshold: float
    margin: float
    marginal: bool
    branch: Branch
    theorem_tag: TheoremTag


def assign_verdict(parameter: float, threshold: float, theorem_tag: TheoremTag, branch: Branch = 1) -> Verdict:
    """
    Stable iff parameter >= threshold (inclusive boundary).

    Parameters within MARGINAL_TOL·max(1, |threshold|) of the threshold are
    marginal and classify stable.
    """
    margin = parameter - threshold
    marginal = abs(margin) <= MARGINAL_TOL * max(1.0, abs(threshold))
    return Verdict(
        stable=bool(margin >= 0 or marginal),
        threshold=threshold,
        margin=0.0 if marginal else margin,
        marginal=marginal,
        branch=branch,
        theorem_tag=theorem_tag,
    )


def always_unstable(theorem_tag: TheoremTag, branch: Branch = 2) -> Verdict:
    """Branch without any stable range; threshold is the +inf sentinel"""
    return Verdict(
        stable=False,
        threshold=math.inf,
        margin=-math.inf,
        marginal=False,
        branch=branch,
        theorem_tag=theorem_tag,
    )


def always_stable(theorem_tag: TheoremTag, branch: Branch = 1) -> Verdict:
    return Verdict(
        stable=True,
        threshold=-math.inf,
        margin=math.inf,
        marginal=False,
        branch=branch,
        theorem_tag=theorem_tag,
    )
