# spherekde/schemas.py
# Pydantic schemas for every JSON boundary: selection reports, bench configs and bench reports.

from typing import Dict, List, Literal, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

REPORT_SCHEMA = "spherekde-report/1"

Method = Literal["SPCO", "CV2", "Oracle"]
BenchMode = Literal["mise", "lambda-sweep", "risk-curves", "reconstruction", "rate"]

DEFAULT_LAMBDA_GRID = [-1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0]
DEFAULT_N_GRID = [100, 500, 2000]


class CriterionRow(BaseModel):
    h: float
    value: float


class SelectionReport(BaseModel):
    """Outcome of one bandwidth selector on one sample."""

    model_config = ConfigDict(populate_by_name=True)

    method: Method
    lam: Optional[float] = Field(default=None, alias="lambda")
    chosen_h: float
    h_min: float
    n: int
    d: int
    kernel: str = "vonmises"
    seed: Optional[int] = None
    table: List[CriterionRow]
    diagnostics: Dict[str, List[float]] = Field(default_factory=dict)

    @property
    def bandwidths(self) -> List[float]:
        return [row.h for row in self.table]

    @property
    def values(self) -> List[float]:
        return [row.value for row in self.table]

    def value_at(self, h: float) -> float:
        for row in self.table:
            if row.h == h:
                return row.value
        raise KeyError(h)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SelectionReport":
        return cls.model_validate_json(text)


class TargetComponentSpec(BaseModel):
    kappa: float = Field(gt=0)
    mu: List[float] = Field(min_length=3, max_length=3)
    weight: float = Field(default=1.0, gt=0, le=1)


class BenchConfig(BaseModel):
    """One benchmark run. Mirrors the JSON config files under configs/."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    mode: BenchMode = "mise"
    target_id: Optional[str] = "f1vm"
    target: Optional[List[TargetComponentSpec]] = None
    n: int = Field(default=500, ge=1)
    reps: int = Field(default=100, ge=1)
    methods: List[Method] = Field(default_factory=lambda: ["Oracle", "SPCO", "CV2"])
    lam: float = Field(default=1.0, alias="lambda")
    lambda_grid: Optional[List[float]] = None
    base_seed: int = 0
    single_seed: Optional[int] = None
    n_grid: Optional[List[int]] = None
    kernel: str = "vonmises"
    quad_nt: int = Field(default=64, ge=2)
    quad_nphi: int = Field(default=64, ge=2)
    mesh_ntheta: int = Field(default=181, ge=2)
    mesh_nphi: int = Field(default=360, ge=1)
    # Worker count never reaches the report: results do not depend on it.
    workers: Optional[int] = Field(default=None, ge=1, exclude=True)
    record_timing: bool = False
    quadrature_check: bool = True

    @field_validator("methods")
    @classmethod
    def _methods_nonempty(cls, methods: List[str]) -> List[str]:
        if not methods:
            raise ValueError("at least one method is required")
        if len(set(methods)) != len(methods):
            raise ValueError("methods must not repeat")
        return methods

    @field_validator("lambda_grid")
    @classmethod
    def _lambda_grid_nonempty(cls, grid: Optional[List[float]]) -> Optional[List[float]]:
        if grid is not None and not grid:
            raise ValueError("lambda_grid must not be empty")
        return grid

    @field_validator("n_grid")
    @classmethod
    def _n_grid_valid(cls, grid: Optional[List[int]]) -> Optional[List[int]]:
        if grid is not None and (not grid or min(grid) < 1):
            raise ValueError("n_grid must be a nonempty list of positive sizes")
        return grid

    @model_validator(mode="after")
    def _check_consistency(self) -> "BenchConfig":
        sizes = self.sizes if self.mode == "rate" else [self.n]
        if "CV2" in self.methods and min(sizes) < 2:
            raise ValueError("CV2 needs n >= 2")
        if self.target is None and self.target_id is None:
            raise ValueError("either target_id or target must be given")
        return self

    @property
    def seed_for_single_draw(self) -> int:
        return self.base_seed if self.single_seed is None else self.single_seed

    @property
    def lambdas(self) -> List[float]:
        return list(self.lambda_grid) if self.lambda_grid is not None else list(DEFAULT_LAMBDA_GRID)

    @property
    def sizes(self) -> List[int]:
        return list(self.n_grid) if self.n_grid is not None else list(DEFAULT_N_GRID)


class ReplicationRow(BaseModel):
    method: Method
    rep: int
    seed: int
    chosen_h: float
    risk: float


class MethodSummary(BaseModel):
    method: Method
    mean_mise: float
    std_error: float
    risks: List[float]
    chosen_h: List[float]


class QuadratureCheck(BaseModel):
    rep: int
    method: Method
    h: float
    exact_risk: float
    quadrature_risk: float
    abs_diff: float


class _Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: Literal["spherekde-report/1"] = REPORT_SCHEMA
    config: BenchConfig
    wall_clock_seconds: Optional[float] = None

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True, indent=2)

    def to_frame(self) -> Optional[pd.DataFrame]:
        """Sibling CSV table, if the report kind has one."""
        return None


class MiseReport(_Report):
    kind: Literal["mise"] = "mise"
    target: str
    h_min: float
    grid_size: int
    seeds: List[int]
    methods: List[MethodSummary]
    quadrature_check: Optional[QuadratureCheck] = None

    def summary(self, method: str) -> MethodSummary:
        for entry in self.methods:
            if entry.method == method:
                return entry
        raise KeyError(method)

    def rows(self) -> List[ReplicationRow]:
        return [
            ReplicationRow(method=entry.method, rep=rep, seed=seed, chosen_h=h, risk=risk)
            for entry in self.methods
            for rep, (seed, h, risk) in enumerate(zip(self.seeds, entry.chosen_h, entry.risks))
        ]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([row.model_dump() for row in self.rows()])
        return frame[["method", "rep", "seed", "chosen_h", "risk"]]


class LambdaSweepRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(alias="lambda")
    mean_risk: float
    std_error: float
    mean_h: float
    fraction_at_h_min: float
    fraction_within_2h_min: float


class LambdaSweepReport(_Report):
    kind: Literal["lambda-sweep"] = "lambda-sweep"
    target: str
    h_min: float
    seeds: List[int]
    rows: List[LambdaSweepRow]
    dimension_jump_lambda: Optional[float] = None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump(by_alias=True) for row in self.rows])


class RiskCurveRow(BaseModel):
    h: float
    r_oracle: float
    r_spco: float
    cv2: float
    risk: float


class RiskCurvesReport(_Report):
    kind: Literal["risk-curves"] = "risk-curves"
    target: str
    seed: int
    h_min: float
    rows: List[RiskCurveRow]
    argmin: Dict[str, float]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.rows])


class ReconstructionRow(BaseModel):
    theta: float
    phi: float
    f: float
    fhat_oracle: float
    fhat_spco: float
    fhat_cv2: float


class ReconstructionReport(_Report):
    kind: Literal["reconstruction"] = "reconstruction"
    target: str
    seed: int
    chosen_h: Dict[str, float]
    mesh_shape: List[int]
    mesh_mass: Dict[str, float]
    # Mesh values go to the sibling CSV only.
    mesh: List[ReconstructionRow] = Field(default_factory=list, exclude=True)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.mesh])


class RateRow(BaseModel):
    n: int
    method: Method
    mean_mise: float
    std_error: float


class RateReport(_Report):
    kind: Literal["rate"] = "rate"
    target: str
    rows: List[RateRow]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.rows])
