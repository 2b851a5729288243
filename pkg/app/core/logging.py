import logging

from app.core.config import settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Configure root logging once for CLI and server entry points."""
    logging.basicConfig(
        level=(level or settings.ISIC_ENGINE_LOG_LEVEL).upper(),
        format=LOG_FORMAT,
    )
