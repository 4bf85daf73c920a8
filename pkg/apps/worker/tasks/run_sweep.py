"""
Parameter sweep task

One row per sweep point: analytic verdict, oracle minimum, agreement flag and
(optionally) the simulated growth rate. Rows run in a thread pool capped by
NSL_THREADS and are returned in sweep order.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from apps.errors import ArgumentError, StabilityError
from apps.settings import get_settings
from apps.worker.analysis.oracle import grid_min_symbol
from apps.worker.scoring.stability_criteria import classify
from apps.worker.simulation.spectral_sim import make_sim_config, simulate_nonlinear
from apps.worker.spectral.kernels import KernelSpec
from apps.worker.spectral.linearization import build_symbol, make_model

logger = logging.getLogger(__name__)


class SweepParameter(str, Enum):
    D = "d"
    A = "a"
    B = "b"
    ALPHA = "alpha"
    K = "k"
    K2 = "k2"
    N = "N"


class SweepOutput(str, Enum):
    VERDICT = "verdict"
    THRESHOLD = "threshold"
    ORACLE_MIN = "oracle_min"
    SIM_RATE = "sim_rate"


DEFAULT_OUTPUTS = (SweepOutput.VERDICT, SweepOutput.THRESHOLD, SweepOutput.ORACLE_MIN)


@dataclass(frozen=True)
class SweepSpec:
    problem: str
    kernel: KernelSpec
    parameter: SweepParameter
    lo: float
    hi: float
    steps: int
    log: bool = False
    fixed: Dict[str, float] = field(default_factory=dict)
    outputs: Tuple[SweepOutput, ...] = DEFAULT_OUTPUTS
    branch: int = 1

    def __post_init__(self):
        object.__setattr__(self, "parameter", SweepParameter(self.parameter))
        object.__setattr__(self, "outputs", tuple(SweepOutput(o) for o in self.outputs))
        if self.problem not in ("p1", "p2"):
            raise ArgumentError(f"problem must be 'p1' or 'p2', got {self.problem!r}")
        if not self.lo < self.hi:
            raise ArgumentError(f"Empty sweep range: lo={self.lo} must be below hi={self.hi}")
        if self.steps < 2:
            raise ArgumentError(f"steps must be >= 2, got {self.steps}")
        if self.log and self.lo <= 0:
            raise ArgumentError("A log sweep needs lo > 0")
        if self.parameter in (SweepParameter.K, SweepParameter.K2) and self.problem != "p1":
            raise ArgumentError(f"{self.parameter.value} only applies to problem 1")
        if self.parameter is SweepParameter.D and self.problem != "p2":
            raise ArgumentError("d only applies to problem 2")
        if self.parameter is SweepParameter.N and not self.kernel.is_window:
            raise ArgumentError("N only applies to window kernels")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.steps)
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class SweepRow:
    index: int
    parameter: str
    value: float
    status: str = "ok"
    theorem: Optional[str] = None
    stable: Optional[bool] = None
    marginal: Optional[bool] = None
    threshold: Optional[float] = None
    margin: Optional[float] = None
    oracle_min: Optional[float] = None
    oracle_verdict: Optional[str] = None
    agreement: Optional[bool] = None
    sim_rate: Optional[float] = None
    error: Optional[str] = None


def _point(spec: SweepSpec, value: float):
    """(model, kernel) at one sweep value"""
    params = {"a": 0.0, "b": 1.0, **spec.fixed}
    kernel = spec.kernel
    name = spec.parameter
    if name is SweepParameter.ALPHA:
        kernel = replace(kernel, alpha=value)
    elif name is SweepParameter.N:
        kernel = replace(kernel, window_half_width=value)
    elif name is SweepParameter.K2:
        # k₂ = k b/(a+b)²
        a, b = params["a"], params["b"]
        params["k"] = value * (a + b) ** 2 / b
    else:
        params[name.value] = value
    model = make_model(spec.problem, a=params["a"], b=params["b"], k=params.get("k"), d=params.get("d"))
    return model, kernel


def evaluate_row(spec: SweepSpec, index: int, value: float) -> SweepRow:
    row = SweepRow(index=index, parameter=spec.parameter.value, value=float(value))
    try:
        model, kernel = _point(spec, value)
        branch = None if spec.problem == "p1" else spec.branch
        updates = {}

        if SweepOutput.VERDICT in spec.outputs or SweepOutput.THRESHOLD in spec.outputs:
            verdict = classify(model, kernel).select(branch)
            updates.update(
                theorem=verdict.theorem_tag.value,
                stable=verdict.stable,
                marginal=verdict.marginal,
                threshold=verdict.threshold,
                margin=verdict.margin,
            )

        symbol = build_symbol(model, kernel, branch)
        if SweepOutput.ORACLE_MIN in spec.outputs:
            report = grid_min_symbol(symbol)
            updates.update(oracle_min=report.min_value, oracle_verdict=report.verdict.value)
            if "stable" in updates:
                updates["agreement"] = updates["stable"] == (not report.unstable)

        if SweepOutput.SIM_RATE in spec.outputs:
            updates["sim_rate"] = simulate_nonlinear(make_sim_config(symbol)).measured_rate

        return replace(row, **updates)
    except StabilityError as exc:
        logger.warning(f"Sweep row {index} ({spec.parameter.value}={value!r}) failed: {exc}")
        return replace(row, status="error", error=str(exc))


def run_sweep(spec: SweepSpec, threads: Optional[int] = None) -> List[SweepRow]:
    """Evaluate every sweep point; output is ordered by sweep index"""
    values = spec.values()
    threads = threads or get_settings().threads
    logger.info(
        f"Sweep over {spec.parameter.value} in [{spec.lo}, {spec.hi}] with {spec.steps} points, "
        f"{threads} threads"
    )

    with ThreadPoolExecutor(max_workers=threads) as pool:
        rows = list(pool.map(lambda item: evaluate_row(spec, *item), enumerate(values)))

    disagreements = count_disagreements(rows)
    if disagreements:
        logger.warning(f"Classifier and oracle disagree on {disagreements} sweep rows")
    logger.info(f"Sweep finished: {len(rows)} rows, {sum(r.status == 'error' for r in rows)} errors")
    return rows


def count_disagreements(rows: List[SweepRow]) -> int:
    return sum(1 for r in rows if r.agreement is False)


def verdict_flips(rows: List[SweepRow]) -> List[int]:
    """Indices i where row i and row i+1 carry different verdicts"""
    flips = []
    for left, right in zip(rows, rows[1:]):
        if left.stable is not None and right.stable is not None and left.stable != right.stable:
            flips.append(left.index)
    return flips

