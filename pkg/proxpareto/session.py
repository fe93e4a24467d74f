"""
Sessions hold the run-wide configuration and hand out runners.

"""
from typing import Any, Optional

from .config import SessionConfig, get_count, get_flag, get_positive_float
from .contexts import ClosingContextMixin
from .exceptions import ConcreteErrorMixin
from .logging_utils import logger
from .runner import Runner, check_closed

__all__ = [
    "SessionConfig",
    "Session",
    "connect",
    "get_positive_float",
    "get_count",
    "get_flag",
]


def connect(config: Optional[SessionConfig] = None, **overrides: Any) -> "Session":
    config = (config or SessionConfig()).updated(**overrides)
    logger.debug(f"connect {config}")
    return Session(config)


class Session(ClosingContextMixin, ConcreteErrorMixin):
    """Run-wide configuration plus the factory for runners."""

    def __init__(self, config: Optional[SessionConfig] = None):
        self._config = config or SessionConfig()
        self._closed = False

    @property
    @check_closed
    def config(self) -> SessionConfig:
        return self._config

    @check_closed
    def runner(self) -> Runner:
        logger.debug(f"runner created for {self.__class__.__name__}")
        return Runner(self)

    @check_closed
    def close(self) -> None:
        logger.debug(f"close {self.__class__.__name__}")
        self._closed = True

    @property
    def closed(self) -> bool:
        return self._closed
