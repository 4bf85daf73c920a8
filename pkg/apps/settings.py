from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings read from NSL_* environment variables or .env"""

    model_config = SettingsConfigDict(env_prefix="NSL_", env_file=".env", extra="ignore")

    threads: int = Field(4, ge=1, le=256)
    fft_workers: int = Field(1, ge=1, le=256)
    log_level: str = "WARNING"
    seed: int = 20240101


@lru_cache
def get_settings() -> Settings:
    return Settings()
