from pydantic import BaseModel, ConfigDict, Field

from app.schemas.inference import Target


class BennettComponents(BaseModel):
    """Count-scale pieces of the Bennett function statistics."""

    a: float
    b0: float = Field(ge=0)
    b1: float = Field(ge=0)
    M: float
    F: float = Field(ge=0)
    pi_hat: float = Field(ge=0, le=1)
    n: float
    target: Target

    model_config = ConfigDict(frozen=True)


class BennettStatistics(BaseModel):
    z_B_sq: float = Field(ge=0)
    z_Bprime_sq: float
    z_W_sq: float
    target: Target

    model_config = ConfigDict(frozen=True)
