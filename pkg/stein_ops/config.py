from enum import IntEnum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from numerics import DEFAULT_QUADRATURE, MeasureKind, QuadratureConfig, UnsupportedSupport

from .functions import TestFunction


class Shift(IntEnum):
    MINUS = -1
    ZERO = 0
    PLUS = 1


def default_shift(measure: MeasureKind) -> Shift:
    return Shift.ZERO if measure == MeasureKind.LEBESGUE else Shift.PLUS


def check_shift(dist, ell) -> int:
    """Shift as a plain int after checking it against the measure of the target"""
    try:
        ell = int(Shift(int(ell)))
    except ValueError as exc:
        raise UnsupportedSupport("shift must be -1, 0 or 1", ell=ell) from exc
    if dist.is_lattice and ell == 0:
        raise UnsupportedSupport("counting targets admit only shifts -1 and +1", target=dist.name)
    if not dist.is_lattice and ell != 0:
        raise UnsupportedSupport("Lebesgue targets admit only the shift 0", target=dist.name, ell=ell)
    return ell


class SteinConfig(BaseModel):
    """Shift choice, expansion shift sequence and standardizing functions"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ell: int = 0
    ells: Optional[List[int]] = None
    standardizers: Optional[List[TestFunction]] = None
    quadrature: QuadratureConfig = Field(default=DEFAULT_QUADRATURE)

    @field_validator('ell')
    @classmethod
    def check_ell(cls, value):
        if value not in (-1, 0, 1):
            raise ValueError("ell must be -1, 0 or 1")
        return value

    @field_validator('ells')
    @classmethod
    def check_ells(cls, value):
        if value is None:
            return value
        if any(v not in (-1, 0, 1) for v in value):
            raise ValueError("every shift must be -1, 0 or 1")
        if 0 in value and any(value):
            raise ValueError("a shift sequence is either all 0 or all in {-1, +1}")
        return value

    @classmethod
    def for_distribution(cls, dist, ell: Optional[int] = None, **kwargs) -> "SteinConfig":
        chosen = int(default_shift(dist.measure)) if ell is None else ell
        check_shift(dist, chosen)
        return cls(ell=chosen, **kwargs)

    def sequence(self, n: int) -> List[int]:
        """First n shifts, repeating ell when no sequence was given"""
        if self.ells is None:
            return [self.ell] * n
        return list(self.ells[:n])

    def standardizer(self, k: int) -> Optional[TestFunction]:
        if not self.standardizers:
            return None
        return self.standardizers[min(k, len(self.standardizers)) - 1]
