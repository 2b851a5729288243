from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    ISIC_ENGINE_CACHE: Path | None = None
    ISIC_ENGINE_BUNDLE: Path | None = None
    ISIC_ENGINE_LOG_LEVEL: str = "INFO"
    ISIC_ENGINE_PROVIDER_TIMEOUT: float = 30.0
    ISIC_ENGINE_PROVIDER_API_KEY: str | None = None
    ISIC_ENGINE_EMBED_BATCH: int = 64
    ISIC_ENGINE_EMBED_WORKERS: int = 4

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()
