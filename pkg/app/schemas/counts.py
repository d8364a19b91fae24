# app/schemas/counts.py

"""
Data model of the paired design.

Cells are indexed x1..x8 in row-major order: the S=+ row then the S=- row,
and within a row (A+,B+), (A+,B-), (A-,B+), (A-,B-).
"""

import math
from typing import Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

CELL_NAMES = ("x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8")
PROBABILITY_NAMES = ("p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8")


class MarginsMixin:
    """
    Margins derived from the eight cells.

    Works for anything exposing ``x1``..``x8`` that supports arithmetic, so the
    same definitions serve a single table (floats) and a block of simulated
    tables (numpy columns).
    """

    @property
    def n1(self):
        return self.x1 + self.x5

    @property
    def n2(self):
        return self.x2 + self.x6

    @property
    def n3(self):
        return self.x3 + self.x7

    @property
    def n4(self):
        return self.x4 + self.x8

    @property
    def n(self):
        return self.n1 + self.n2 + self.n3 + self.n4

    @property
    def n_A(self):
        return self.n1 + self.n2

    @property
    def n_B(self):
        return self.n1 + self.n3

    @property
    def nbar_A(self):
        return self.n3 + self.n4

    @property
    def nbar_B(self):
        return self.n2 + self.n4

    @property
    def x_A(self):
        return self.x1 + self.x2

    @property
    def x_B(self):
        return self.x1 + self.x3

    @property
    def xbar_A(self):
        return self.x7 + self.x8

    @property
    def xbar_B(self):
        return self.x6 + self.x8

    @property
    def diseased(self):
        return self.x1 + self.x2 + self.x3 + self.x4


class PairedCounts(MarginsMixin, BaseModel):
    """The eight observed cell counts; real-valued so adjusted tables fit the same type."""

    x1: float = Field(ge=0)
    x2: float = Field(ge=0)
    x3: float = Field(ge=0)
    x4: float = Field(ge=0)
    x5: float = Field(ge=0)
    x6: float = Field(ge=0)
    x7: float = Field(ge=0)
    x8: float = Field(ge=0)

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "PairedCounts":
        if len(values) != 8:
            raise ValueError(f"Expected 8 cell counts, got {len(values)}")
        return cls(**dict(zip(CELL_NAMES, values)))

    @property
    def values(self) -> Tuple[float, ...]:
        return tuple(getattr(self, name) for name in CELL_NAMES)

    def reindex(self, order: Sequence[int]) -> "PairedCounts":
        """New table whose i-th cell is this table's cell ``order[i]`` (0-based)."""
        values = self.values
        return PairedCounts.from_sequence([values[i] for i in order])

    def shifted(self, amount: float) -> "PairedCounts":
        return PairedCounts.from_sequence([value + amount for value in self.values])


class CellProbabilities(BaseModel):
    """Multinomial cell probabilities p1..p8 of the paired design."""

    p1: float = Field(ge=0)
    p2: float = Field(ge=0)
    p3: float = Field(ge=0)
    p4: float = Field(ge=0)
    p5: float = Field(ge=0)
    p6: float = Field(ge=0)
    p7: float = Field(ge=0)
    p8: float = Field(ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def sums_to_one(self):
        total = math.fsum(self.values)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"cell probabilities must sum to 1 (got {total!r})")
        return self

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "CellProbabilities":
        if len(values) != 8:
            raise ValueError(f"Expected 8 cell probabilities, got {len(values)}")
        return cls(**dict(zip(PROBABILITY_NAMES, values)))

    @property
    def values(self) -> Tuple[float, ...]:
        return tuple(getattr(self, name) for name in PROBABILITY_NAMES)

    @property
    def t1(self) -> float:
        return self.p1 + self.p5

    @property
    def t2(self) -> float:
        return self.p2 + self.p6

    @property
    def t3(self) -> float:
        return self.p3 + self.p7

    @property
    def t4(self) -> float:
        return self.p4 + self.p8

    @property
    def t_A(self) -> float:
        return self.t1 + self.t2

    @property
    def t_B(self) -> float:
        return self.t1 + self.t3

    @property
    def tbar_A(self) -> float:
        return self.t3 + self.t4

    @property
    def tbar_B(self) -> float:
        return self.t2 + self.t4

    @property
    def prevalence(self) -> float:
        return self.p1 + self.p2 + self.p3 + self.p4


class PredictiveEstimates(BaseModel):
    """Estimated predictive values and the four comparison parameters."""

    P_A_hat: float = Field(ge=0, le=1)
    P_B_hat: float = Field(ge=0, le=1)
    N_A_hat: float = Field(ge=0, le=1)
    N_B_hat: float = Field(ge=0, le=1)
    d_hat: float
    dbar_hat: float
    # None when the denominator predictive value is zero
    R_hat: Optional[float] = None
    Rbar_hat: Optional[float] = None

    model_config = ConfigDict(frozen=True)
