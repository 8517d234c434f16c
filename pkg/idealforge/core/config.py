from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", env_prefix="IDEALFORGE_", extra="ignore"
    )

    # Exact counters
    ie_budget: int = Field(30, gt=0)
    brute_vars: int = Field(24, gt=0)
    enumerate_cap: int = Field(1 << 20, gt=0)

    # Exhaustive alpha search
    oracle_max_universe: int = Field(6, ge=0)
    oracle_max_members: int = Field(4, gt=0)
    oracle_k_limit: int = Field(64, gt=0)

    log_level: str = "WARNING"


settings = Settings()
