from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from apps.worker.spectral.kernels import KernelFamily, KernelSpec, parse_family


class KernelSchema(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    family: KernelFamily
    alpha: float = Field(1.0, gt=0)
    window_half_width: Optional[float] = Field(None, gt=0)
    dim: Optional[int] = Field(None, ge=1)

    @field_validator("family", mode="before")
    @classmethod
    def parse_family_name(cls, value):
        if isinstance(value, str):
            return parse_family(value)
        return value

    def to_spec(self) -> KernelSpec:
        return KernelSpec(
            family=self.family,
            alpha=self.alpha,
            window_half_width=self.window_half_width,
            dim=self.dim,
        )
