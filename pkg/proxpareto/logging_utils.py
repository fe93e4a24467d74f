"""
The package logger.

Every module logs through `logger`, named `proxpareto`. Operations emit one
`debug` line on entry; fallbacks and precondition notes go out at `info`
or `warning`. The level comes from `PROXPARETO_LOGLEVEL` (default WARNING)
and can be changed later with `set_level`, which the CLI's `--log-level`
option uses.

"""
import logging
import os
from sys import stderr
from typing import Optional, Union

LOG_NAME = "proxpareto"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"
DEFAULT_LOGLEVEL = "WARNING"
LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

logger = logging.getLogger(LOG_NAME)


def _resolve(level: Union[str, int, None]) -> int:
    if isinstance(level, int):
        return level
    name = (level or DEFAULT_LOGLEVEL).strip().upper()
    if name not in LEVELS:
        logger.warning(f"unknown log level {level!r}, using {DEFAULT_LOGLEVEL}")
        name = DEFAULT_LOGLEVEL
    return getattr(logging, name)


def set_level(level: Union[str, int, None]) -> int:
    resolved = _resolve(level)
    logger.setLevel(resolved)
    return resolved


def configure(level: Optional[str] = None) -> logging.Logger:
    """Attach the stderr handler once and apply `level` (or the environment's)."""
    if not any(getattr(h, "_proxpareto", False) for h in logger.handlers):
        handler = logging.StreamHandler(stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._proxpareto = True  # pylint: disable=protected-access
        logger.addHandler(handler)
    set_level(level if level is not None else os.environ.get("PROXPARETO_LOGLEVEL"))
    return logger


configure()
