# app/schemas/inference.py

from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Family(str, Enum):
    DIFFERENCE = "difference"
    LOG_RATIO = "log-ratio"
    DIRECT_RATIO = "direct-ratio"


class Variant(str, Enum):
    CLASSIC = "classic"
    ADJUSTED = "adjusted"
    POOLED = "pooled"


class Target(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    GLOBAL = "global"


_FAMILY_PREFIX = {
    Family.DIFFERENCE: "d",
    Family.LOG_RATIO: "LR",
    Family.DIRECT_RATIO: "R",
}
_VARIANT_SUFFIX = {
    Variant.CLASSIC: "",
    Variant.ADJUSTED: "(a)",
    Variant.POOLED: "(p)",
}


class MethodId(str, Enum):
    """The nine inference methods: a family crossed with a variant."""

    D = "d"
    D_ADJUSTED = "d(a)"
    D_POOLED = "d(p)"
    LR = "LR"
    LR_ADJUSTED = "LR(a)"
    LR_POOLED = "LR(p)"
    R = "R"
    R_ADJUSTED = "R(a)"
    R_POOLED = "R(p)"

    @classmethod
    def of(cls, family: Family, variant: Variant) -> "MethodId":
        return cls(_FAMILY_PREFIX[family] + _VARIANT_SUFFIX[variant])

    @property
    def family(self) -> Family:
        prefix = self.value.split("(")[0]
        return next(family for family, label in _FAMILY_PREFIX.items() if label == prefix)

    @property
    def variant(self) -> Variant:
        if self.value.endswith("(a)"):
            return Variant.ADJUSTED
        if self.value.endswith("(p)"):
            return Variant.POOLED
        return Variant.CLASSIC


# the six methods that define confidence intervals
CI_METHODS = (
    MethodId.D,
    MethodId.D_ADJUSTED,
    MethodId.LR,
    MethodId.LR_ADJUSTED,
    MethodId.R,
    MethodId.R_ADJUSTED,
)


class Interval(BaseModel):
    lower: float
    upper: float
    scale: Literal["difference", "ratio"]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def ordered_bounds(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        if self.scale == "ratio" and self.lower <= 0:
            raise ValueError("ratio-scale bounds must be positive")
        return self

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


class TestResult(BaseModel):
    """A chi-square type statistic with its p-value (p_value = chisq_sf(statistic, df))."""

    # keeps pytest from collecting the model as a test class
    __test__ = False

    statistic: float = Field(ge=0)
    df: Literal[1, 2]
    p_value: float = Field(ge=0, le=1)
    method: MethodId
    target: Target

    model_config = ConfigDict(frozen=True)


class NonInferiorityResult(BaseModel):
    """One-sided test of H: parameter = margin against K: parameter > margin."""

    test: TestResult
    margin: float
    z: float
    critical_value: float
    one_sided_p_value: float = Field(ge=0, le=1)
    alpha: float
    reject: bool

    model_config = ConfigDict(frozen=True)
