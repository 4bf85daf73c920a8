from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from apps.cli.schemas.common import SCHEMA_VERSION
from apps.cli.schemas.kernels import KernelSchema
from apps.worker.scoring.verdict import TheoremTag
from apps.worker.tasks.run_sweep import DEFAULT_OUTPUTS, SweepOutput, SweepParameter, SweepSpec


class SweepSpecSchema(BaseModel):
    """Sweep request accepted by `scan --spec`"""

    problem: str
    kernel: KernelSchema
    parameter: SweepParameter
    lo: float
    hi: float
    steps: int = Field(..., ge=2)
    log: bool = False
    fixed: Dict[str, float] = {}
    outputs: List[SweepOutput] = list(DEFAULT_OUTPUTS)
    branch: int = Field(1, ge=1, le=2)

    def to_spec(self) -> SweepSpec:
        return SweepSpec(
            problem=self.problem,
            kernel=self.kernel.to_spec(),
            parameter=self.parameter,
            lo=self.lo,
            hi=self.hi,
            steps=self.steps,
            log=self.log,
            fixed=dict(self.fixed),
            outputs=tuple(self.outputs),
            branch=self.branch,
        )


class DisagreementSchema(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    parameters: Dict[str, float]
    delta: float
    classifier_stable: bool
    oracle_stable: bool
    oracle_min: float


class VerifySummary(BaseModel):
    schema_version: str = SCHEMA_VERSION
    theorem: TheoremTag
    seed: int
    cases: int
    agreements: int
    disagreements: List[DisagreementSchema]
    deltas: Tuple[float, ...]
