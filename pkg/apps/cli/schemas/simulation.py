from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from apps.cli.schemas.common import SCHEMA_VERSION
from apps.cli.schemas.kernels import KernelSchema


class SimConfigSchema(BaseModel):
    """Simulation request accepted by `simulate --config`"""

    problem: str
    kernel: KernelSchema
    parameters: Dict[str, float]
    branch: Optional[int] = None
    seed_frequency: Optional[List[float]] = None
    grid_points: Optional[int] = Field(None, ge=64)
    amplitude_ratio: Optional[float] = Field(None, ge=0)
    dt: Optional[float] = Field(None, gt=0)
    t_final: Optional[float] = Field(None, gt=0)
    box_half_length: Optional[float] = Field(None, gt=0)


class SimSummary(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    schema_version: str = SCHEMA_VERSION
    problem: str
    kernel: KernelSchema
    parameters: Dict[str, float]
    branch: Optional[int] = None
    grid_points: int
    box_half_length: float
    dt: float
    t_final: float
    mode: List[int]
    seed_frequency: List[float]
    predicted_rate: float
    measured_rate: Optional[float] = None
    fit_window: Optional[Tuple[float, float]] = None
    blew_up: bool
    steps: int
    reference_stable: bool
    reference_source: str
    rate_sign_matches: bool
