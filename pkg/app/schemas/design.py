# app/schemas/design.py

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Scenario(BaseModel):
    """Population setting of a simulation: predictive values, prevalence and within-stratum odds ratios."""

    P_A: float = Field(gt=0, lt=1)
    P_B: float = Field(gt=0, lt=1)
    N_A: float = Field(gt=0, lt=1)
    N_B: float = Field(gt=0, lt=1)
    pi: float = Field(gt=0, lt=1)
    O_plus: float = Field(gt=0)
    O_minus: float = Field(gt=0)

    model_config = ConfigDict(frozen=True)

    @property
    def d(self) -> float:
        return self.P_A - self.P_B

    @property
    def dbar(self) -> float:
        return self.N_A - self.N_B

    @property
    def R(self) -> float:
        return self.P_A / self.P_B

    @property
    def Rbar(self) -> float:
        return self.N_A / self.N_B

    def label(self) -> str:
        return (
            f"P_A={self.P_A:g} P_B={self.P_B:g} N_A={self.N_A:g} N_B={self.N_B:g} "
            f"pi={self.pi:g} O+={self.O_plus:g} O-={self.O_minus:g}"
        )


class SampleSizeInputs(BaseModel):
    """Design parameters for the one-sided non-inferiority sample size."""

    P_A: float = Field(gt=0, lt=1)
    P_B: float = Field(gt=0, lt=1)
    t_A: float = Field(gt=0, lt=1)
    t_B: float = Field(gt=0, lt=1)
    p1: float = Field(ge=0, le=1)
    p5: float = Field(ge=0, le=1)
    delta: Optional[float] = None
    delta1: Optional[float] = None
    rho: Optional[float] = Field(default=None, gt=0)
    rho1: Optional[float] = Field(default=None, gt=0)
    alpha: float = Field(default=0.05, gt=0, lt=1)
    beta: float = Field(default=0.2, gt=0, lt=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def cells_fit_margins(self):
        # p1 and p5 are parts of t_A*P_A (resp. t_A*(1-P_A)) and of t_B*P_B (resp. t_B*(1-P_B))
        if self.p1 > min(self.t_A * self.P_A, self.t_B * self.P_B) + 1e-12:
            raise ValueError("p1 cannot exceed t_A*P_A or t_B*P_B")
        if self.p5 > min(self.t_A * (1 - self.P_A), self.t_B * (1 - self.P_B)) + 1e-12:
            raise ValueError("p5 cannot exceed t_A*(1-P_A) or t_B*(1-P_B)")
        return self


class SampleSizeResult(BaseModel):
    n: int
    n_raw: float
    variance_factor: float
    scale: str
    inputs: SampleSizeInputs

    model_config = ConfigDict(frozen=True)
