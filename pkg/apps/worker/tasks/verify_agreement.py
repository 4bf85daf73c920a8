"""
Classifier / oracle agreement task

Draws random parameters for one criterion, places the tested parameter at
threshold·(1 ± δ), and checks that the analytic verdict matches the sign of
the oracle minimum. Disagreements are logged, never dropped.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from apps.errors import ArgumentError
from apps.settings import get_settings
from apps.worker.analysis.oracle import grid_min_symbol
from apps.worker.analysis.sampling import (
    PERTURBATIONS,
    draw_branch2_parameters,
    draw_p2_parameters,
    draw_theorem1_parameters,
    make_rng,
    perturbed_values,
)
from apps.worker.analysis.scalar_roots import theorem1_threshold
from apps.worker.scoring.stability_criteria import classify
from apps.worker.scoring.verdict import TheoremTag
from apps.worker.spectral.kernels import KernelFamily, KernelSpec
from apps.worker.spectral.linearization import ModelP1, ModelP2, build_symbol

logger = logging.getLogger(__name__)

P2_FAMILIES = {
    TheoremTag.T2: KernelFamily.EXP_1D,
    TheoremTag.T3: KernelFamily.EXP_PRODUCT_2D,
    TheoremTag.T4: KernelFamily.GAUSSIAN,
    TheoremTag.T5: KernelFamily.EXP_3D,
}


@dataclass(frozen=True)
class AgreementCase:
    theorem: TheoremTag
    model: object
    kernel: KernelSpec
    branch: Optional[int]
    delta: float


@dataclass(frozen=True)
class CaseOutcome:
    case: AgreementCase
    classifier_stable: bool
    oracle_stable: bool
    oracle_min: float

    @property
    def agrees(self) -> bool:
        return self.classifier_stable == self.oracle_stable


@dataclass(frozen=True)
class VerificationSummary:
    theorem: TheoremTag
    seed: int
    cases: int
    agreements: int
    disagreements: Tuple[CaseOutcome, ...]

    @property
    def all_agree(self) -> bool:
        return not self.disagreements


def build_cases(
    theorem: TheoremTag,
    count: int,
    seed: int,
    deltas: Sequence[float] = PERTURBATIONS,
    window_family: KernelFamily = KernelFamily.WINDOW_1D,
    gaussian_dim: int = 1,
) -> List[AgreementCase]:
    rng = make_rng(seed)
    cases = []

    if theorem is TheoremTag.T1:
        # k₁ = 0 needs a = 0; then k₂ = k/b and b = 1 gives k₂ = k
        for draw in draw_theorem1_parameters(rng, count):
            kernel = KernelSpec(window_family, alpha=1.0, window_half_width=draw.N)
            threshold = theorem1_threshold(draw.N)
            for delta, inverse_k2 in perturbed_values(threshold, deltas):
                model = ModelP1(k=1.0 / inverse_k2, a=0.0, b=1.0)
                cases.append(AgreementCase(theorem, model, kernel, None, delta))
        return cases

    if theorem is TheoremTag.L6:
        for draw in draw_branch2_parameters(rng, count):
            kernel = KernelSpec(KernelFamily.EXP_1D, alpha=draw.alpha)
            model = ModelP2(d=draw.d, a=draw.a, b=draw.b)
            cases.append(AgreementCase(theorem, model, kernel, 2, 0.0))
        return cases

    family = P2_FAMILIES.get(theorem)
    if family is None:
        raise ArgumentError(f"No agreement check for {theorem.value}")
    dim = gaussian_dim if family is KernelFamily.GAUSSIAN else None
    for draw in draw_p2_parameters(rng, count):
        kernel = KernelSpec(family, alpha=draw.alpha, dim=dim)
        # the threshold does not depend on d, so any d gives it
        threshold = classify(ModelP2(d=1.0, a=draw.a, b=draw.b), kernel).branch1.threshold
        for delta, d in perturbed_values(threshold, deltas):
            cases.append(AgreementCase(theorem, ModelP2(d=d, a=draw.a, b=draw.b), kernel, 1, delta))
    return cases


def check_case(case: AgreementCase) -> CaseOutcome:
    verdict = classify(case.model, case.kernel).select(case.branch)
    report = grid_min_symbol(build_symbol(case.model, case.kernel, case.branch))
    outcome = CaseOutcome(
        case=case,
        classifier_stable=verdict.stable,
        oracle_stable=not report.unstable,
        oracle_min=report.min_value,
    )
    if not outcome.agrees:
        logger.warning(
            f"{case.theorem.value} disagreement: {case.model}, {case.kernel}, delta={case.delta}: "
            f"classifier {'stable' if verdict.stable else 'unstable'}, oracle min {report.min_value!r}"
        )
    return outcome


def run_verification(
    theorem: TheoremTag,
    count: int,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    **case_options,
) -> VerificationSummary:
    """Agreement counts for `count` random draws, each tested at every ±δ"""
    seed = get_settings().seed if seed is None else seed
    threads = threads or get_settings().threads
    cases = build_cases(theorem, count, seed, **case_options)
    logger.info(f"Verifying {theorem.value}: {len(cases)} cases, seed {seed}, {threads} threads")

    with ThreadPoolExecutor(max_workers=threads) as pool:
        outcomes = list(pool.map(check_case, cases))

    disagreements = tuple(o for o in outcomes if not o.agrees)
    summary = VerificationSummary(
        theorem=theorem,
        seed=seed,
        cases=len(outcomes),
        agreements=len(outcomes) - len(disagreements),
        disagreements=disagreements,
    )
    logger.info(f"{theorem.value}: {summary.agreements}/{summary.cases} agree")
    return summary
