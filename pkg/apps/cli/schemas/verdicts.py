from typing import Dict, List, Optional, Tuple, Union

from pydantic import AliasChoices, BaseModel, ConfigDict, Field

from apps.cli.schemas.common import SCHEMA_VERSION, OptionalFinite
from apps.cli.schemas.kernels import KernelSchema
from apps.worker.scoring.verdict import TheoremTag


class VerdictSchema(BaseModel):
    model_config = ConfigDict(from_attributes=True, populate_by_name=True)

    theorem: TheoremTag = Field(validation_alias=AliasChoices("theorem", "theorem_tag"))
    branch: Union[int, str]
    stable: bool
    marginal: bool
    threshold: OptionalFinite = None
    margin: OptionalFinite = None


class DerivationSchema(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    d1: Optional[float] = None
    d2: Optional[float] = None
    q0: Optional[float] = None
    q00: Optional[float] = None
    p0_norm: Optional[float] = None
    x_star: Optional[float] = None
    s0: Optional[float] = None
    z1: Optional[float] = None
    reduced_min_value: Optional[float] = None


class ClassifyOutput(BaseModel):
    schema_version: str = SCHEMA_VERSION
    problem: str
    kernel: KernelSchema
    parameters: Dict[str, float]
    selected_branch: Optional[int] = None
    verdict: VerdictSchema
    verdicts: List[VerdictSchema]
    derivation: DerivationSchema


class RootOutput(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    schema_version: str = SCHEMA_VERSION
    target: str
    root: float
    residual: float
    iterations: Optional[int] = None
    bracket: Tuple[float, float]
    x1: Optional[float] = None
    x2: Optional[float] = None
