import logging
import re
from typing import Dict, List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, model_validator

from numerics import InvalidParameter, ValidationError
from stein_ops import (
    TestFunction,
    clipped,
    constant,
    exponential,
    half_power,
    identity,
    indicator_le,
    polynomial,
    power,
    sine,
    smoothed_indicator,
    table_function,
)

logger = logging.getLogger(__name__)

COMMANDS = ("bounds", "expand", "kernel", "factors", "verify")
MAX_GRID_POINTS = 100_000

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_POWER = re.compile(r"^x\^(\d+)$")
_EXP = re.compile(rf"^exp\(\s*(-?)(?:({_NUMBER})\*?)?x\s*\)$")
_INDICATOR = re.compile(rf"^ind<=({_NUMBER})$")
_SMOOTH = re.compile(rf"^smooth<=({_NUMBER})(?:,({_NUMBER}))?$")
_CLIP = re.compile(rf"^min\(x,\s*({_NUMBER})\)$")
_CONSTANT = re.compile(rf"^{_NUMBER}$")


class GridSpec(BaseModel):
    """``a:b:step``, endpoints included"""

    model_config = ConfigDict(frozen=True)

    lower: float
    upper: float
    step: float = Field(gt=0)

    @model_validator(mode='after')
    def check_range(self):
        if self.upper < self.lower:
            raise ValueError("grid upper end lies below its lower end")
        if (self.upper - self.lower) / self.step > MAX_GRID_POINTS:
            raise ValueError("grid has too many points")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError(f"grid must read a:b:step, got '{text}'")
        lower, upper, step = (float(p) for p in parts)
        return cls(lower=lower, upper=upper, step=step)

    def points(self) -> List[float]:
        count = int(round((self.upper - self.lower) / self.step)) + 1
        return [float(x) for x in np.round(self.lower + self.step * np.arange(count), 12)]


class RunSpec(BaseModel):
    """One CLI invocation"""

    command: Literal["bounds", "expand", "kernel", "factors", "verify"]
    distribution: Optional[str] = None
    function: str = "id"
    ell: Optional[str] = None
    order: int = Field(1, ge=1)
    output: Literal["json", "csv"] = "json"
    grid: Optional[GridSpec] = None
    at: List[float] = []
    seed: int = Field(0, ge=0)
    out: Optional[str] = None
    method: Literal["auto", "family", "lemma", "nested"] = "auto"
    c: Optional[str] = None
    h: Optional[str] = None
    monte_carlo: bool = False
    samples: int = Field(100_000, ge=100)
    quick: bool = False
    exact: bool = False

    @model_validator(mode='after')
    def check_required(self):
        if self.command != "verify" and not self.distribution:
            raise ValueError(f"'{self.command}' needs --dist")
        return self

    @classmethod
    def build(cls, **fields) -> "RunSpec":
        """Validate CLI fields; pydantic failures become ValidationError"""
        try:
            if isinstance(fields.get('grid'), str):
                fields['grid'] = GridSpec.parse(fields['grid'])
            if isinstance(fields.get('at'), str):
                fields['at'] = [float(v) for v in fields['at'].split(',') if v.strip()]
            return cls(**{k: v for k, v in fields.items() if v is not None})
        except (PydanticValidationError, ValueError) as exc:
            raise ValidationError("invalid run specification", detail=str(exc)) from exc


def parse_function(text: str) -> TestFunction:
    """Closed vocabulary: id, x^k, poly:c0,c1,..., exp(-x), exp(a*x), sin, ind<=m,
    smooth<=m[,width], min(x,c), 2^-x, constants and table:<csv with x,f[,df]>"""
    spec = text.strip().replace(' ', '')
    if spec in ("id", "x"):
        return identity()
    if spec == "sin":
        return sine()
    if spec == "2^-x":
        return half_power()
    if spec.startswith("table:"):
        return _table_from_csv(spec[len("table:"):])
    if spec.startswith("poly:"):
        coefficients = [_number(c) for c in spec[len("poly:"):].split(',') if c]
        return polynomial(coefficients).renamed(spec)
    match = _POWER.match(spec)
    if match:
        return power(int(match.group(1)))
    match = _EXP.match(spec)
    if match:
        rate = float(match.group(2)) if match.group(2) else 1.0
        return exponential(-rate if match.group(1) else rate)
    match = _INDICATOR.match(spec)
    if match:
        return indicator_le(float(match.group(1)))
    match = _SMOOTH.match(spec)
    if match:
        width = float(match.group(2)) if match.group(2) else 0.5
        return smoothed_indicator(float(match.group(1)), width)
    match = _CLIP.match(spec)
    if match:
        return clipped(float(match.group(1)))
    if _CONSTANT.match(spec):
        return constant(_number(spec))
    raise InvalidParameter(f"unknown test function '{text}'")


def _number(text: str):
    value = float(text)
    return int(value) if value.is_integer() else value


def _table_from_csv(path: str) -> TestFunction:
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as exc:
        raise InvalidParameter("cannot read function table", path=path, detail=str(exc)) from exc
    return table_function(frame.iloc[:, :3].to_numpy(dtype=float).tolist(), label=f"table:{path}")


class GridReport(BaseModel):
    """Tabulated profile emitted by ``kernel`` and ``factors``"""

    command: str
    distribution: str
    ell: int
    columns: List[str]
    rows: List[List[Optional[float]]]
    summary: Dict[str, float] = {}
    errors: List[Dict] = []

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.columns)


class PropertyResult(BaseModel):
    name: str
    passed: bool
    checks: int = 0
    max_violation: float = 0.0
    detail: str = ""
    errors: List[Dict] = []


class VerifyReport(BaseModel):
    quick: bool
    seed: int
    properties: List[PropertyResult]
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)
