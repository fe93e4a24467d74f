"""
Optional extensions of the session/runner surface.

"""
from abc import abstractmethod, ABCMeta
from typing import Iterator, Optional, Type
from .types_definitions import ResultRow


class SessionErrorsMixin(metaclass=ABCMeta):
    # pylint: disable=too-few-public-methods,invalid-name,missing-function-docstring
    """
    Gives access to the toolkit exception types as members of the Session
    class, so callers holding only a session can catch them.

    """

    @property
    @abstractmethod
    def Error(self) -> Type[Exception]:
        raise NotImplementedError

    @property
    @abstractmethod
    def InterfaceError(self) -> Type[Exception]:
        raise NotImplementedError

    @property
    @abstractmethod
    def AnalysisError(self) -> Type[Exception]:
        raise NotImplementedError

    @property
    @abstractmethod
    def DataError(self) -> Type[Exception]:
        raise NotImplementedError

    @property
    @abstractmethod
    def DomainError(self) -> Type[Exception]:
        raise NotImplementedError

    @property
    @abstractmethod
    def SchemaError(self) -> Type[Exception]:
        raise NotImplementedError

    @property
    @abstractmethod
    def CapacityError(self) -> Type[Exception]:
        raise NotImplementedError

    @property
    @abstractmethod
    def PreconditionError(self) -> Type[Exception]:
        raise NotImplementedError

    @property
    @abstractmethod
    def NotSupportedError(self) -> Type[Exception]:
        raise NotImplementedError


class IterableRunnerMixin:
    """
    Turns a runner into an iterator over its result rows.

    This enables code like:

    ```python
    >>> runner.execute("pareto", problem=problem)
    >>> first = next(runner)
    >>> for row in runner:
    ...    print(row)
    ```
    """

    def __next__(self) -> Optional[ResultRow]:
        item = self.fetchone()
        if item is None:
            raise StopIteration
        return item

    def __iter__(self) -> Iterator[ResultRow]:
        return self
