"""
Run-wide configuration and coercion of user-supplied option values.

"""
from dataclasses import dataclass, replace
from typing import Any, Union

from .exceptions import DataError

__all__ = ["SessionConfig", "get_positive_float", "get_count", "get_flag"]


def get_positive_float(value: Union[str, int, float], name: str = "value") -> float:
    """Accept floats, ints and numeric strings like "1e-6"."""
    if isinstance(value, bool):
        raise DataError(f"{name} must be a number, got {value!r}")
    if isinstance(value, (int, float)):
        number = float(value)
    elif isinstance(value, str):
        try:
            number = float(value.strip())
        except ValueError:
            raise DataError(f"{name} must be a number, got {value!r}") from None
    else:
        raise DataError(f"{name} must be a number, got {type(value).__name__}")
    if not number > 0 or number == float("inf"):
        raise DataError(f"{name} must be positive and finite, got {number}")
    return number


def get_count(value: Union[str, int], name: str = "value", minimum: int = 0) -> int:
    if isinstance(value, bool):
        raise DataError(f"{name} must be an integer, got {value!r}")
    try:
        count = int(value)
    except (TypeError, ValueError):
        raise DataError(f"{name} must be an integer, got {value!r}") from None
    if isinstance(value, float) and value != count:
        raise DataError(f"{name} must be an integer, got {value!r}")
    if count < minimum:
        raise DataError(f"{name} must be at least {minimum}, got {count}")
    return count


def get_flag(value: Union[str, bool, int]) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value != 0
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise DataError(f"not a boolean: {value!r}")


@dataclass(frozen=True)
class SessionConfig:
    tol: float = 1e-6
    seed: int = 0
    grid_step: float = 1e-3
    paper_literal: bool = False
    threads: int = 1
    grid_cap: int = 10 ** 7

    def __post_init__(self):
        object.__setattr__(self, "tol", get_positive_float(self.tol, "tol"))
        object.__setattr__(self, "seed", get_count(self.seed, "seed"))
        object.__setattr__(self, "grid_step", get_positive_float(self.grid_step, "grid step"))
        object.__setattr__(self, "paper_literal", get_flag(self.paper_literal))
        object.__setattr__(self, "threads", get_count(self.threads, "threads", minimum=1))
        object.__setattr__(self, "grid_cap", get_count(self.grid_cap, "grid cap", minimum=1))

    def updated(self, **changes: Any) -> "SessionConfig":
        """A copy with the non-None `changes` applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})
