# app/schemas/report.py

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.bennett import BennettStatistics
from app.schemas.counts import PairedCounts, PredictiveEstimates
from app.schemas.inference import Interval, MethodId, Target, TestResult
from app.schemas.variance import DifferenceCovariance, PooledEstimates, RatioCovariance


class IntervalEntry(BaseModel):
    method: MethodId
    target: Target
    interval: Optional[Interval] = None
    error: Optional[str] = None

    model_config = ConfigDict(frozen=True)


class TestEntry(BaseModel):
    __test__ = False

    method: MethodId
    target: Target
    result: Optional[TestResult] = None
    error: Optional[str] = None

    model_config = ConfigDict(frozen=True)


class BennettEntry(BaseModel):
    target: Target
    statistics: Optional[BennettStatistics] = None
    # z²_{d(p)} recovered by the null-estimated Bennett statistic
    equivalent_to_pooled: Optional[bool] = None
    error: Optional[str] = None

    model_config = ConfigDict(frozen=True)


class AnalysisReport(BaseModel):
    """Everything ``analyze`` computes for one table; entries that fail carry their error."""

    counts: PairedCounts
    alpha: float = Field(gt=0, lt=1)
    zero_substituted: bool = False
    estimates: PredictiveEstimates
    difference_covariance: Optional[DifferenceCovariance] = None
    ratio_covariance: Optional[RatioCovariance] = None
    # Cov(R̂, R̄̂) on the direct ratio scale
    ratio_scale_covariance: Optional[float] = None
    pooled: Optional[PooledEstimates] = None
    intervals: List[IntervalEntry] = Field(default_factory=list)
    tests: List[TestEntry] = Field(default_factory=list)
    global_tests: List[TestEntry] = Field(default_factory=list)
    bennett: List[BennettEntry] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    @property
    def errors(self) -> List[str]:
        entries = [*self.intervals, *self.tests, *self.global_tests, *self.bennett]
        return [entry.error for entry in entries if entry.error]
