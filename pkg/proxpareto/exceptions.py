"""
Exceptions raised by the proxpareto toolkit.

The hierarchy follows the shape of the DB-API error tree: one `Error`
base, an `InterfaceError` for misuse of the session/runner surface and an
`AnalysisError` branch for everything that goes wrong while computing.

"""
from typing import Any, Optional

from .extensions import SessionErrorsMixin


class Error(Exception):
    """Base error of the toolkit."""


class InterfaceError(Error):
    """
    Interface error.

    Raised for misuse of the session/runner surface, e.g. working with a
    closed runner or asking for an unknown command.

    """


class AnalysisError(Error, RuntimeError):
    """
    Analysis error.

    Raised for errors while evaluating, differentiating or optimizing.

    """


class DataError(AnalysisError, ValueError):
    """
    Data error.

    Raised for invalid numeric input: dimension mismatches, nonpositive
    weights, a regularization vector that is not a unit vector, and so on.

    """


class DomainError(AnalysisError):
    """
    Domain error.

    Raised when a point lies outside dom f or outside a constraint set
    where the operation needs it inside.

    """


class SchemaError(DataError):
    """
    Schema error.

    Raised when a problem or function file does not validate.

    """


class CapacityError(AnalysisError):
    """
    Capacity error.

    Raised when a lattice would exceed the configured point cap.

    """


class PreconditionError(AnalysisError):
    """
    Precondition error.

    Raised when the mathematical standing assumptions of an operation do
    not hold at the given input. `payload` carries the evidence.

    """

    def __init__(self, message: str, payload: Optional[Any] = None):
        super().__init__(message)
        self.payload = payload


class NotLipschitzError(PreconditionError):
    """
    Raised when a function is not locally Lipschitzian at a point; the
    payload is the singular subdifferential found there.

    """


class NotDirectionallyLipschitzError(PreconditionError):
    """Raised when no direction certifies the directional Lipschitz property."""


class BlowUpError(AnalysisError):
    """Raised when a numeric upper limit estimate diverges."""


class UnsupportedAtomError(AnalysisError):
    """
    Raised when exact calculus cannot resolve an expression node at a
    point. Callers fall back to numeric probes.

    """


class NotSupportedError(AnalysisError, NotImplementedError):
    """
    Not supported error.

    Raised when an unsupported operation is attempted.

    """


class ConcreteErrorMixin(SessionErrorsMixin):
    """A concrete implementation of the session error mixin."""

    Error = Error
    InterfaceError = InterfaceError
    AnalysisError = AnalysisError
    DataError = DataError
    DomainError = DomainError
    SchemaError = SchemaError
    CapacityError = CapacityError
    PreconditionError = PreconditionError
    NotSupportedError = NotSupportedError
