import re
from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from modules.groebner import Budget
from modules.instances import BUILTINS
from modules.polyring import OrderKind


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


class Subcommand(str, Enum):
    VERIFY = "verify"
    DUAL = "dual"
    CERTIFY = "certify"


_SQUARES = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$")


def parse_squares(text: str) -> List[int]:
    """``"7"`` -> [7], ``"6..8"`` -> [6, 7, 8]."""
    match = _SQUARES.match(text)
    if not match:
        raise ValueError(f"expected t or t1..t2, got {text!r}")
    low = int(match.group(1))
    high = int(match.group(2)) if match.group(2) else low
    if low < 1 or high < low:
        raise ValueError(f"square counts must satisfy 1 <= t1 <= t2, got {text!r}")
    return list(range(low, high + 1))


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    subcommand: Subcommand
    builtin: Optional[str] = None
    file: Optional[Path] = None
    squares: List[int] = Field(default_factory=list)
    order: OrderKind = OrderKind.DEGREVLEX
    budget: Budget = Field(default_factory=Budget)
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.TEXT
    timings: bool = True

    @field_validator("builtin")
    @classmethod
    def known_builtin(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in BUILTINS:
            raise ValueError(f"unknown builtin {value!r}; choose one of {sorted(BUILTINS)}")
        return value

    @field_validator("squares")
    @classmethod
    def positive_squares(cls, value: List[int]) -> List[int]:
        if any(t < 1 for t in value):
            raise ValueError("square counts must be positive")
        return sorted(set(value))

    @model_validator(mode="after")
    def one_source(self) -> "RunConfig":
        if (self.builtin is None) == (self.file is None):
            raise ValueError("give exactly one of --builtin or --file")
        if self.subcommand is Subcommand.CERTIFY and not self.squares:
            raise ValueError("certify needs --squares")
        return self
