import sys
from pathlib import Path

from loguru import logger

from santalo.settings import settings

# `logger.bind(experiment=..., case=..., seed=...)` context lands in {extra}
LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level> | {extra}"
)

logger.remove()

# stderr, so CLI output on stdout stays machine-readable
logger.add(
    sys.stderr,
    level=settings.LOG_LEVEL,
    format=LOG_FORMAT,
    enqueue=True,
    backtrace=False,
    diagnose=False,
)

if settings.LOG_TO_FILE:
    log_dir = Path(settings.LOG_DIR)
    log_dir.mkdir(parents=True, exist_ok=True)
    logger.add(
        log_dir / "santalo.jsonl",
        rotation="10 MB",
        retention="7 days",
        compression="zip",
        level=settings.LOG_LEVEL,
        serialize=True,
        enqueue=True,
    )
