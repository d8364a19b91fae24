# app/schemas/simulation.py

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.schemas.design import Scenario
from app.schemas.inference import CI_METHODS, MethodId, Target


class Metric(str, Enum):
    COVERAGE_WIDTH = "coverage-width"
    SIZE = "size"
    POWER = "power"
    GLOBAL_SIZE = "global-size"
    GLOBAL_POWER = "global-power"

    @property
    def is_global(self) -> bool:
        return self in (Metric.GLOBAL_SIZE, Metric.GLOBAL_POWER)


class SimulationSpec(BaseModel):
    """One line of a simulation table: a scenario, a sample size and the methods to evaluate."""

    scenario: Scenario
    n: int = Field(ge=1)
    replications: int = Field(default=100_000, ge=1, alias="N")
    alpha: float = Field(default=0.05, gt=0, lt=1)
    methods: List[MethodId]
    metric: Metric
    seed: int = Field(default=20240101, ge=0, lt=2**64)
    target: Target = Target.POSITIVE

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @field_validator("methods")
    @classmethod
    def methods_not_empty(cls, v):
        if not v:
            raise ValueError("at least one method is required")
        return v

    @model_validator(mode="after")
    def methods_fit_metric(self):
        if self.metric == Metric.COVERAGE_WIDTH:
            invalid = [m.value for m in self.methods if m not in CI_METHODS]
            if invalid:
                raise ValueError(f"methods {invalid} do not define confidence intervals")
        if self.target == Target.GLOBAL:
            raise ValueError("target must be positive or negative; global metrics select df-2 tests")
        return self


class MetricRow(BaseModel):
    """Monte Carlo estimates for one method; percentages are in [0, 100]."""

    method: MethodId
    coverage: Optional[float] = Field(default=None, ge=0, le=100)
    width: Optional[float] = None
    width_median: Optional[float] = None
    width_se: Optional[float] = None
    rate: Optional[float] = Field(default=None, ge=0, le=100)
    mc_se: float = Field(ge=0)
    undefined: int = Field(default=0, ge=0)

    model_config = ConfigDict(frozen=True)


class GridRow(BaseModel):
    spec_id: int
    spec: SimulationSpec
    rows: List[MetricRow] = Field(default_factory=list)
    error: Optional[str] = None

    model_config = ConfigDict(frozen=True)


class SummaryRow(BaseModel):
    """Minimum / maximum / average of one quantity across the grid lines of one metric."""

    metric: Metric
    quantity: str
    method: MethodId
    minimum: float
    maximum: float
    average: float
    lines: int

    model_config = ConfigDict(frozen=True)


class GridReport(BaseModel):
    results: List[GridRow] = Field(default_factory=list)
    summary: List[SummaryRow] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    @property
    def errors(self) -> List[str]:
        return [f"spec {row.spec_id}: {row.error}" for row in self.results if row.error]
