"""loguru sinks shared by the CLI and the test session."""
import sys
from typing import Optional
from pathlib import Path

from loguru import logger

from .config import Settings


def configure_logging(settings: Settings, level: Optional[str] = None) -> None:
    """Configure loguru logging."""
    logger.remove()  # Remove default handler

    logging_config = settings.core.logging
    level = level or ("DEBUG" if settings.core.debug else logging_config.level)

    # Console handler
    logger.add(
        sys.stderr,
        format=logging_config.format,
        level=level,
        colorize=True,
    )

    # File handler
    if logging_config.file_path:
        log_path = Path(logging_config.file_path)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            logging_config.file_path,
            format=logging_config.format,
            level=level,
            rotation=logging_config.rotation,
            retention=logging_config.retention,
        )
