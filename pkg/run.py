#!/usr/bin/env python3
"""
fkglab - exact verification of FKG-type correlation inequalities
"""
import logging

from fkglab.config import settings
from fkglab.main import app

# Configure logging
logging.basicConfig(
    level=settings.log_level,
    format=settings.log_format,
)

logger = logging.getLogger(__name__)

if __name__ == "__main__":
    logger.info(f"Starting {settings.app_name} {settings.app_version}")
    app(prog_name=settings.app_name)
