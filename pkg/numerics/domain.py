import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from .errors import InvalidParameter


class MeasureKind(str, Enum):
    LEBESGUE = "lebesgue"
    COUNTING = "counting"


@dataclass(frozen=True)
class SupportSpec:
    """Interval [lower, upper] carrying either Lebesgue or counting measure.

    Infinite lattice ends are cut at ``cut_lower``/``cut_upper`` so that sums over the
    support are finite and reproducible. A lattice interval may shrink to a single point
    when it is the result of ``restrict``.
    """

    lower: float
    upper: float
    measure: MeasureKind = MeasureKind.LEBESGUE
    cut_lower: Optional[int] = None
    cut_upper: Optional[int] = None

    def __post_init__(self):
        if self.lower > self.upper or (not self.is_lattice and self.lower == self.upper):
            raise InvalidParameter("support requires lower < upper", lower=self.lower, upper=self.upper)
        if self.is_lattice:
            for end in (self.lower, self.upper):
                if math.isfinite(end) and end != int(end):
                    raise InvalidParameter("lattice support ends must be integers", end=end)

    @property
    def is_lattice(self) -> bool:
        return self.measure == MeasureKind.COUNTING

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def effective_bounds(self):
        """Bounds after truncation of infinite lattice ends"""
        lo, hi = self.lower, self.upper
        if self.is_lattice:
            lo = int(lo) if math.isfinite(lo) else self.cut_lower
            hi = int(hi) if math.isfinite(hi) else self.cut_upper
            if lo is None or hi is None:
                raise InvalidParameter("infinite lattice support needs truncation bounds")
        return lo, hi

    def points(self) -> range:
        """Lattice points of the (truncated) support"""
        if not self.is_lattice:
            raise InvalidParameter("points() is only defined for counting measure")
        lo, hi = self.effective_bounds()
        return range(lo, hi + 1)

    def contains(self, x) -> bool:
        if self.is_lattice and x != math.floor(x):
            return False
        return self.lower <= x <= self.upper

    def restrict(self, lower=None, upper=None) -> Optional["SupportSpec"]:
        """Intersection with [lower, upper]; None when the intersection is null"""
        lo = self.lower if lower is None else max(self.lower, lower)
        hi = self.upper if upper is None else min(self.upper, upper)
        if self.is_lattice:
            lo = math.ceil(lo) if math.isfinite(lo) else lo
            hi = math.floor(hi) if math.isfinite(hi) else hi
            if lo > hi:
                return None
        elif not lo < hi:
            return None
        return replace(
            self,
            lower=lo,
            upper=hi,
            cut_lower=self.cut_lower if not math.isfinite(lo) else None,
            cut_upper=self.cut_upper if not math.isfinite(hi) else None,
        )

    def grid(self, n: int, offset: float = 1e-3) -> np.ndarray:
        """Interior evaluation grid (lattice points for counting measure)"""
        if self.is_lattice:
            pts = np.array(list(self.points()), dtype=float)
            if len(pts) <= n:
                return pts
            idx = np.unique(np.linspace(0, len(pts) - 1, n).round().astype(int))
            return pts[idx]
        if not self.is_finite:
            raise InvalidParameter("grid() on an unbounded interval needs explicit limits")
        width = self.upper - self.lower
        return np.linspace(self.lower + offset * width, self.upper - offset * width, n)

    def to_dict(self):
        return {
            'lower': self.lower,
            'upper': self.upper,
            'measure': self.measure.value,
            'cut_lower': self.cut_lower,
            'cut_upper': self.cut_upper,
        }
