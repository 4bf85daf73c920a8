import math
from typing import Annotated, Optional

from pydantic import BeforeValidator

from apps.worker.stability_config import STABILITY_CONFIG

SCHEMA_VERSION = STABILITY_CONFIG["cli"]["schema_version"]


def finite_or_none(value):
    """±inf sentinels are carried as None so they serialize to null and re-parse unchanged"""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


OptionalFinite = Annotated[Optional[float], BeforeValidator(finite_or_none)]
