# app/schemas/__init__.py

from .counts import CellProbabilities, PairedCounts, PredictiveEstimates
from .design import SampleSizeInputs, SampleSizeResult, Scenario
from .inference import Family, Interval, MethodId, NonInferiorityResult, Target, TestResult, Variant
from .simulation import GridReport, Metric, MetricRow, SimulationSpec
from .variance import DifferenceCovariance, Matrix2, PooledEstimates, RatioCovariance

__all__ = [
    "CellProbabilities",
    "PairedCounts",
    "PredictiveEstimates",
    "SampleSizeInputs",
    "SampleSizeResult",
    "Scenario",
    "Family",
    "Interval",
    "MethodId",
    "NonInferiorityResult",
    "Target",
    "TestResult",
    "Variant",
    "GridReport",
    "Metric",
    "MetricRow",
    "SimulationSpec",
    "DifferenceCovariance",
    "Matrix2",
    "PooledEstimates",
    "RatioCovariance",
]
