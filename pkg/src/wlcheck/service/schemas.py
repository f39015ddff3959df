"""Request models for the HTTP service (and the in-process CLI client)."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class Margins(BaseModel):
    """Sampling-domain knobs: positions in [-box, box], speeds at most
    s_max with 1 - |v|^2 >= speed_margin, and |v3 - pole| >= v3_margin
    around each declared pole of the law."""

    model_config = ConfigDict(extra="forbid")

    box: float = Field(default=1.0, gt=0.0)
    s_max: float = Field(default=0.9, ge=0.0, lt=1.0)
    speed_margin: float = Field(default=0.05, ge=0.0, lt=1.0)
    v3_margin: float = Field(default=0.1, ge=0.0)


class LawFields(BaseModel):
    """Common law selection: a named closed-form family (with params and
    profile sources) or explicit component expressions; law2 gives the
    second particle's components for a two-particle expression law."""

    model_config = ConfigDict(extra="forbid")

    family: Optional[str] = None
    params: dict[str, float] = Field(default_factory=dict)
    profiles: dict[str, str] = Field(default_factory=dict)
    law: Optional[list[str]] = Field(default=None, min_length=3,
                                     max_length=3)
    law2: Optional[list[str]] = Field(default=None, min_length=3,
                                      max_length=3)
    beta: Optional[float] = None


class CheckRequest(LawFields):
    group: str
    samples: int = Field(default=100, ge=1, le=100000)
    seed: int = 42
    tol: float = Field(default=1e-9, gt=0.0)
    margins: Margins = Field(default_factory=Margins)


class ConditionsRequest(LawFields):
    kinematics: str = Field(default="galilean",
                            pattern="^(galilean|poincare)$")
    samples: int = Field(default=100, ge=1, le=100000)
    seed: int = 42
    tol: float = Field(default=1e-9, gt=0.0)
    margins: Margins = Field(default_factory=Margins)


class TransformSpec(BaseModel):
    """One kinematic transform; which fields matter depends on kind.

    kinds: space-translation (a), time-translation (s), rotation (axis as a
    3-vector, angle), galilean-boost (u as a 3-vector), lorentz-boost (axis
    as 1|2|3, u as a speed below 1).
    """

    model_config = ConfigDict(extra="forbid")

    kind: str
    a: Optional[list[float]] = None
    s: Optional[float] = None
    axis: Optional[object] = None
    angle: Optional[float] = None
    u: Optional[object] = None

    def to_dict(self):
        return {k: v for k, v in self.model_dump().items() if v is not None}


class CovarianceRequest(LawFields):
    kinematics: Optional[str] = Field(default=None,
                                      pattern="^(galilean|poincare)$")
    transform: TransformSpec
    x0: list[list[float]]
    v0: list[list[float]]
    t0: float = 0.0
    t1: float = 1.0
    dt: float = Field(default=1e-3, gt=0.0)
    tol: float = Field(default=1e-6, gt=0.0)
    csv: bool = False
