from pydantic import BaseModel, ConfigDict, Field


class Matrix2(BaseModel):
    """A 2x2 real matrix; symmetric when it holds a covariance."""

    a11: float
    a12: float
    a21: float
    a22: float

    model_config = ConfigDict(frozen=True)

    @classmethod
    def symmetric(cls, var1: float, var2: float, cov: float) -> "Matrix2":
        return cls(a11=var1, a12=cov, a21=cov, a22=var2)

    @classmethod
    def identity(cls) -> "Matrix2":
        return cls(a11=1.0, a12=0.0, a21=0.0, a22=1.0)

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def is_symmetric(self) -> bool:
        return abs(self.a12 - self.a21) <= 1e-12


class DifferenceCovariance(BaseModel):
    """Covariance of (d̂, d̄̂): variances of the two differences and their covariance."""

    sigma_d_sq: float
    sigma_dbar_sq: float
    sigma_d_dbar: float

    model_config = ConfigDict(frozen=True)

    @property
    def matrix(self) -> Matrix2:
        return Matrix2.symmetric(self.sigma_d_sq, self.sigma_dbar_sq, self.sigma_d_dbar)


class RatioCovariance(BaseModel):
    """Covariance of (ln R̂, ln R̄̂)."""

    sigma_R_sq: float
    sigma_Rbar_sq: float
    sigma_R_Rbar: float

    model_config = ConfigDict(frozen=True)

    @property
    def matrix(self) -> Matrix2:
        return Matrix2.symmetric(self.sigma_R_sq, self.sigma_Rbar_sq, self.sigma_R_Rbar)


class PooledEstimates(BaseModel):
    """Predictive values estimated under the null hypothesis of equality."""

    P_hat: float = Field(ge=0, le=1)
    N_hat: float = Field(ge=0, le=1)

    model_config = ConfigDict(frozen=True)
