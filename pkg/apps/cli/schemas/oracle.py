from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from apps.cli.schemas.common import SCHEMA_VERSION, OptionalFinite
from apps.cli.schemas.kernels import KernelSchema
from apps.worker.analysis.oracle import OracleVerdict, Reduction


class SearchSpecSchema(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    reduction: Reduction
    radius: float
    coarse_points: int
    refine_iterations: int


class OracleReportSchema(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    min_value: float
    argmin: List[float]
    reduced_argmin: List[float]
    negativity_region: List[Tuple[float, float]]
    boundary_distance: OptionalFinite = None
    witness_value: Optional[float] = None
    verdict: OracleVerdict
    tolerance: float
    marginal: bool


class OracleOutput(BaseModel):
    schema_version: str = SCHEMA_VERSION
    problem: str
    kernel: KernelSchema
    parameters: Dict[str, float]
    branch: Optional[int] = None
    search: SearchSpecSchema
    report: OracleReportSchema
