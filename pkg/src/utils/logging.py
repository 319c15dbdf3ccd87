"""Logging utilities for linecut."""

import logging
import os
from typing import Optional

from ..config import Settings, get_settings


def setup_logging(settings: Optional[Settings] = None) -> logging.Logger:
    """Set up logging configuration."""
    settings = settings or get_settings()

    handlers = [logging.StreamHandler()]
    if settings.log_file:
        # Create logs directory if it doesn't exist
        log_dir = os.path.dirname(settings.log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(settings.log_file))

    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )

    logger = logging.getLogger('linecut')
    logger.debug("linecut logging initialized")

    return logger
