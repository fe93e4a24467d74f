"""
Context support for sessions and runners.

The mixin provides a context manager and a finaliser which close the
object; classes using it implement `close` and the `closed` property.

"""
from abc import ABCMeta, abstractmethod
from types import TracebackType
from typing import Optional, Type, TypeVar

from .logging_utils import logger

ClosingMixinType = TypeVar("ClosingMixinType", bound="ClosingContextMixin")


# pylint: disable=too-few-public-methods
class ClosingContextMixin(metaclass=ABCMeta):
    """
    Closes the object when a `with` block ends or the object is garbage
    collected. Errors raised inside the block propagate.

    """

    @abstractmethod
    def close(self) -> None:
        raise NotImplementedError

    @property
    @abstractmethod
    def closed(self) -> bool:
        raise NotImplementedError

    def __enter__(self: ClosingMixinType) -> ClosingMixinType:
        return self

    def __exit__(
        self,
        error_type: Optional[Type[BaseException]] = None,
        error: Optional[BaseException] = None,
        traceback: Optional[TracebackType] = None,
    ) -> bool:
        """Close the object upon exiting the context manager."""
        if not self.closed:
            self.close()
        return False

    def __del__(self) -> None:
        try:
            if not self.closed:
                logger.debug(f"closing {self.__class__.__name__} on collection")
                self.close()
        except AttributeError:
            # __init__ failed before the state existed
            pass
