"""
Run reports: what was run, on which inputs, with which outputs.

"""
import hashlib
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from .exceptions import SchemaError
from .types_definitions import JSONDict

__all__ = ["RunReport", "plain", "digest"]


def plain(value: Any) -> Any:
    """Nested containers of numpy values as plain JSON-compatible Python."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if value is None or isinstance(value, str):
        return value
    to_dict = getattr(value, "to_dict", None)
    if callable(to_dict):
        return plain(to_dict())
    return str(value)


def digest(inputs: Any) -> str:
    """sha256 of the canonical JSON form of `inputs`."""
    text = json.dumps(plain(inputs), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunReport:
    command: str
    inputs_digest: str
    outputs: Dict[str, Any]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = ""
    seed: int = 0
    verdict: str = "ok"

    def __post_init__(self):
        object.__setattr__(self, "outputs", plain(self.outputs))
        object.__setattr__(self, "rows", plain(self.rows))

    def to_dict(self) -> JSONDict:
        return asdict(self)

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        try:
            data = json.loads(text)
            return cls(**data)
        except (json.JSONDecodeError, TypeError) as exc:
            raise SchemaError(f"not a run report: {exc}") from exc

    def write(self, path: Union[str, Path]) -> Path:
        """Write the report atomically: a temporary file renamed into place."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as handle:
                handle.write(self.to_json())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    @classmethod
    def read(cls, path: Union[str, Path]) -> "RunReport":
        return cls.from_json(Path(path).read_text())
