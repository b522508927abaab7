"""
Run configuration

Every value comes from command-line flags or tool arguments; nothing is read
from the environment.
"""

from pathlib import Path
from typing import ClassVar, List, Literal, Optional, Tuple

from pydantic import BaseModel, field_validator

from .errors import GuardError

COMMANDS = ("omega", "expand", "wave", "wkb-check", "quantize", "oracle", "certify")


class RunConfig(BaseModel):
    """
    Validated parameters of one run.

    Type errors surface as pydantic `ValidationError`; size limits are
    checked by `check_guards`, which raises `GuardError`.
    """

    MAX_K: ClassVar[int] = 8
    MAX_DEPTH: ClassVar[int] = 40
    MAX_CHI: ClassVar[int] = 6

    command: Literal["omega", "expand", "wave", "wkb-check", "quantize", "oracle", "certify"]
    curve: str = "catalan"
    g: Optional[int] = None
    n: Optional[int] = None
    k: int = 3
    depth: int = 10
    operator: Optional[str] = None
    bounds: Tuple[int, int] = (1, 2)
    output: Optional[Path] = None
    primitive: Literal["principal", "basepoint"] = "principal"
    basepoint: Optional[str] = None
    t: Optional[str] = None
    extension: Optional[int] = None
    convention: Literal["quantum", "displayed"] = "quantum"
    chi_max: int = 4
    timings: bool = False
    only: Optional[List[int]] = None
    oracle: Optional[str] = None
    oracle_args: List[str] = []
    verbosity: int = 0

    @field_validator("bounds", mode="before")
    @classmethod
    def parse_bounds(cls, value):
        if isinstance(value, str):
            parts = value.split(",")
            if len(parts) != 2:
                raise ValueError(f"bounds must look like 'dx,dy', got {value!r}")
            return tuple(int(p) for p in parts)
        return value

    @field_validator("only", mode="before")
    @classmethod
    def parse_only(cls, value):
        if isinstance(value, str):
            return [int(p) for p in value.split(",") if p.strip()]
        return value

    @property
    def pair_is_valid(self) -> bool:
        """(g, n) admissible for `omega` and `expand`."""
        if self.g is None or self.n is None:
            return False
        return self.g >= 0 and self.n >= 1 and 2 * self.g - 2 + self.n >= -1

    def check_guards(self) -> "RunConfig":
        if not 0 <= self.k <= self.MAX_K:
            raise GuardError(f"K must be between 0 and {self.MAX_K}, got {self.k}")
        if not 1 <= self.depth <= self.MAX_DEPTH:
            raise GuardError(f"depth must be between 1 and {self.MAX_DEPTH}, got {self.depth}")
        if min(self.bounds) < 0:
            raise GuardError(f"degree bounds must be >= 0, got {self.bounds}")
        if not 1 <= self.chi_max <= self.MAX_CHI:
            raise GuardError(f"chi-max must be between 1 and {self.MAX_CHI}, got {self.chi_max}")
        if self.only is not None and any(not 1 <= c <= 11 for c in self.only):
            raise GuardError(f"criteria are numbered 1 to 11, got {self.only}")
        if self.primitive == "basepoint" and self.basepoint is None:
            raise GuardError("the basepoint primitive needs --basepoint")
        return self
