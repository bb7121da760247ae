from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class ShiftSequence(BaseModel):
    """Shifts ℓ_1, ..., ℓ_n of an expansion: all 0, or each ±1"""

    model_config = ConfigDict(frozen=True)

    ells: List[int] = Field(min_length=1)

    @field_validator('ells')
    @classmethod
    def check_homogeneous(cls, value):
        if any(v not in (-1, 0, 1) for v in value):
            raise ValueError("shifts must be -1, 0 or 1")
        if 0 in value and any(value):
            raise ValueError("a shift sequence is either all 0 or all in {-1, +1}")
        return value

    @classmethod
    def parse(cls, text: str) -> "ShiftSequence":
        """'0', '+1', '-1' or a pattern such as '+-+' or '1,-1,1'"""
        text = text.strip()
        if ',' in text:
            return cls(ells=[int(t) for t in text.split(',') if t.strip()])
        if text and set(text) <= {'+', '-'}:
            return cls(ells=[1 if c == '+' else -1 for c in text])
        return cls(ells=[int(text)])

    def __len__(self) -> int:
        return len(self.ells)

    def extended(self, n: int) -> "ShiftSequence":
        """Repeat the last shift until the sequence has length n"""
        if len(self.ells) >= n:
            return self
        return ShiftSequence(ells=self.ells + [self.ells[-1]] * (n - len(self.ells)))

    @property
    def is_lattice(self) -> bool:
        return 0 not in self.ells

    @staticmethod
    def plus_count(ells: List[int]) -> int:
        """a = Σ ℓ_i(ℓ_i+1)/2"""
        return sum(1 for e in ells if e == 1)

    @staticmethod
    def minus_offset(ells: List[int]) -> int:
        """b = Σ ℓ_i(1−ℓ_i)/2, i.e. minus the number of −1 shifts"""
        return -sum(1 for e in ells if e == -1)

    def label(self) -> str:
        if not self.is_lattice:
            return "0"
        return "".join('+' if e == 1 else '-' for e in self.ells)


class Tolerances(BaseModel):
    lower: float
    upper: float


class BoundReport(BaseModel):
    distribution: str
    function: str
    ell: int
    lower: Optional[float] = None
    upper: Optional[float] = None
    oracle_variance: float
    method: str = "klaassen"
    equality: bool = False
    lower_ok: bool = True
    upper_ok: bool = True
    tolerances: Tolerances
    errors: List[Dict] = []


class ExpansionReport(BaseModel):
    distribution: str
    function: str
    ells: List[int]
    terms: List[float]
    partial_sums: List[float]
    oracle_variance: float
    remainder_estimate: float
    sandwich_flags: List[str]
    sandwich_ok: List[bool]
    method: str = "auto"
    truncated_at: Optional[int] = None
    mc_remainder: Optional[float] = None
    mc_stderr: Optional[float] = None
    brackets: Optional[List[float]] = None
    errors: List[Dict] = []


class MatrixBoundReport(BaseModel):
    distribution: str
    functions: List[str]
    ell: int
    lhs: List[List[float]]
    rhs: List[List[float]]
    diff_min_eigenvalue: float
    det_inequality_slack: float
    scalar_slacks: List[float]
    psd_ok: bool
    det_ok: bool


class MatrixCSReport(BaseModel):
    lhs: List[List[float]]
    rhs: List[List[float]]
    residual: List[List[float]]
    residual_min_eigenvalue: float
    identity_error: float
    holds: bool
