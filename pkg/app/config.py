from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    ALPHA: float = 0.05
    ZERO_SUBSTITUTE: float = 0.05
    REPLICATIONS: int = 100_000
    # opt-in reproduction of the published grids
    LONG_REPLICATIONS: int = 10_000_000
    SEED: int = 20240101
    WORKERS: int = 1
    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "outputs"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="PVCOMPARE_")


settings = Settings()
