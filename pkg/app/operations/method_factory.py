# app/operations/method_factory.py

"""
One strategy per inference family and a factory resolving method labels.

A strategy knows the family's scale: which variance kernel it uses, how a
point estimate is displaced from a hypothesised value, and how an interval is
built from the variance. The methods are written with numpy ufuncs so that
the same strategy evaluates one table or a simulated block.
"""

from abc import ABC, abstractmethod
from typing import Dict, Tuple

import numpy as np

from app.exceptions import InvalidMethodError
from app.operations.variance import (
    difference_cross,
    difference_variance,
    log_ratio_cross,
    log_ratio_variance,
)
from app.schemas.inference import Family, MethodId


class InferenceStrategy(ABC):
    """Abstract base class for the three inference families."""

    family: Family
    scale: str
    # value of the parameter under homogeneity
    null_value: float

    def variance(self, counts, pa, pb):
        """Positive-side variance at plug-in values (pa, pb)."""
        return self._variance_kernel(counts, pa, pb)

    def cross_covariance(self, counts, pa, pb, na, nb):
        return self._cross_kernel(counts, pa, pb, na, nb)

    @abstractmethod
    def _variance_kernel(self, counts, pa, pb):
        pass

    @abstractmethod
    def _cross_kernel(self, counts, pa, pb, na, nb):
        pass

    @abstractmethod
    def point(self, pa, pb):
        """Point estimate of the compared parameter (d or R)."""
        pass

    @abstractmethod
    def displacement(self, point, value):
        """Coordinate of the global quadratic form for hypothesised value ``value``."""
        pass

    @abstractmethod
    def signed_statistic(self, point, variance, value):
        """Signed root of the df-1 statistic against ``value``."""
        pass

    @abstractmethod
    def interval(self, point, variance, z) -> Tuple:
        pass

    def valid_margin(self, margin: float) -> bool:
        """Non-inferiority margins lie strictly on the unfavourable side of the null value."""
        return margin < self.null_value


class DifferenceStrategy(InferenceStrategy):
    family = Family.DIFFERENCE
    scale = "difference"
    null_value = 0.0

    def _variance_kernel(self, counts, pa, pb):
        return difference_variance(counts, pa, pb)

    def _cross_kernel(self, counts, pa, pb, na, nb):
        return difference_cross(counts, pa, pb, na, nb)

    def point(self, pa, pb):
        return pa - pb

    def displacement(self, point, value):
        return point - value

    def signed_statistic(self, point, variance, value):
        return (point - value) / np.sqrt(variance)

    def interval(self, point, variance, z):
        half = z * np.sqrt(variance)
        return point - half, point + half


class _RatioStrategy(InferenceStrategy):
    """Shared pieces of the two ratio families: both use the log-ratio covariance."""

    scale = "ratio"
    null_value = 1.0

    def _variance_kernel(self, counts, pa, pb):
        return log_ratio_variance(counts, pa, pb)

    def _cross_kernel(self, counts, pa, pb, na, nb):
        return log_ratio_cross(counts, pa, pb, na, nb)

    def point(self, pa, pb):
        return pa / pb

    def valid_margin(self, margin: float) -> bool:
        return 0.0 < margin < 1.0


class LogRatioStrategy(_RatioStrategy):
    family = Family.LOG_RATIO

    def displacement(self, point, value):
        return np.log(point) - np.log(value)

    def signed_statistic(self, point, variance, value):
        return (np.log(point) - np.log(value)) / np.sqrt(variance)

    def interval(self, point, variance, z):
        half = z * np.sqrt(variance)
        return point * np.exp(-half), point * np.exp(half)


class DirectRatioStrategy(_RatioStrategy):
    family = Family.DIRECT_RATIO

    def displacement(self, point, value):
        return (point - value) / np.sqrt(point * value)

    def signed_statistic(self, point, variance, value):
        return (point - value) / np.sqrt(value * point * variance)

    def interval(self, point, variance, z):
        y = 1.0 + z * z * variance / 2.0
        root = np.sqrt(y * y - 1.0)
        # (y - root) written as 1 / (y + root)
        return point / (y + root), point * (y + root)


class MethodFactory:
    """Factory resolving method labels to MethodId and families to strategies."""

    _strategies = {
        Family.DIFFERENCE: DifferenceStrategy,
        Family.LOG_RATIO: LogRatioStrategy,
        Family.DIRECT_RATIO: DirectRatioStrategy,
    }

    _aliases: Dict[str, MethodId] = {
        "difference": MethodId.D,
        "wald": MethodId.D,
        "adjusted-difference": MethodId.D_ADJUSTED,
        "pooled-difference": MethodId.D_POOLED,
        "log-ratio": MethodId.LR,
        "adjusted-log-ratio": MethodId.LR_ADJUSTED,
        "pooled-log-ratio": MethodId.LR_POOLED,
        "ratio": MethodId.R,
        "direct-ratio": MethodId.R,
        "adjusted-ratio": MethodId.R_ADJUSTED,
        "pooled-ratio": MethodId.R_POOLED,
    }
    for _method in MethodId:
        for _label in (
            _method.value,
            _method.value.lower(),
            _method.value.replace("(", "_").replace(")", ""),
            _method.value.replace("(", "_").replace(")", "").lower(),
        ):
            _aliases.setdefault(_label, _method)
    del _method, _label

    @classmethod
    def resolve(cls, label) -> MethodId:
        """
        Resolve a label such as ``"d(a)"``, ``"lr_p"`` or ``"pooled-ratio"`` to a MethodId.

        Raises:
            InvalidMethodError: if the label is unknown.
        """
        if isinstance(label, MethodId):
            return label
        method = cls._aliases.get(str(label).strip())
        if method is None:
            raise InvalidMethodError(str(label))
        return method

    @classmethod
    def create_strategy(cls, family: Family) -> InferenceStrategy:
        strategy_class = cls._strategies.get(Family(family))
        if strategy_class is None:
            raise InvalidMethodError(str(family))
        return strategy_class()

    @classmethod
    def strategy_for(cls, method) -> InferenceStrategy:
        return cls.create_strategy(cls.resolve(method).family)
