"""
Command-line run configuration
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.errors import InvalidConfig
from app.models import ModelParams
from app.schemas.options import QuadratureOpts, SolverOpts

class GridSpec(BaseModel):
    """Scan grid: `count` points from `start` to `stop`"""
    model_config = ConfigDict(frozen=True)

    start: float
    stop: float
    count: int = Field(default=21, ge=2)
    scale: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def check_log_bounds(self) -> "GridSpec":
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log grids need positive start and stop")
        return self

    def values(self) -> List[float]:
        if self.scale == "log":
            grid = np.logspace(np.log10(self.start), np.log10(self.stop), self.count)
        else:
            grid = np.linspace(self.start, self.stop, self.count)
        return [float(x) for x in grid]

class RunConfig(BaseModel):
    """Everything one CLI invocation needs; config-file values sit under explicit flags"""
    model_config = ConfigDict(extra="forbid")

    command: Literal["solve", "phase", "entropy", "corr", "exponents", "oracle"]
    delta: float = 0.1
    epsilon: float = 0.0
    k_ising: float = 0.0
    alpha: float = 0.0
    s: float = 1.0
    omega_c: float = 1.0

    grid: Optional[GridSpec] = None
    axis: Literal["delta", "k_ising"] = "delta"
    s_values: List[float] = []
    k_values: List[float] = []
    delta_values: List[float] = []

    chi: bool = False
    pinned: bool = False
    branches: bool = False
    data: bool = False

    n_modes: int = Field(default=4, ge=1, le=8)
    n_max: int = Field(default=6, ge=1)
    total_cap: Optional[int] = None
    sweep: List[int] = []

    output: Optional[str] = None
    format: Literal["csv", "json"] = "csv"

    quad_rel_tol: Optional[float] = Field(default=None, gt=0)
    quad_abs_tol: Optional[float] = Field(default=None, gt=0)
    quad_max_subdivisions: Optional[int] = Field(default=None, ge=1)
    max_iter: Optional[int] = Field(default=None, ge=1)
    fp_tol: Optional[float] = Field(default=None, gt=0)
    damping: Optional[float] = Field(default=None, gt=0, le=1)
    threads: Optional[int] = Field(default=None, ge=1)

    def params(self) -> ModelParams:
        return ModelParams(delta=self.delta, epsilon=self.epsilon, k_ising=self.k_ising,
                           alpha=self.alpha, s=self.s, omega_c=self.omega_c)

    def solver_opts(self) -> SolverOpts:
        quadrature = {key: value for key, value in {
            "rel_tol": self.quad_rel_tol,
            "abs_tol": self.quad_abs_tol,
            "max_subdivisions": self.quad_max_subdivisions,
        }.items() if value is not None}
        solver = {key: value for key, value in {
            "max_iter": self.max_iter,
            "fp_tol": self.fp_tol,
            "damping": self.damping,
        }.items() if value is not None}
        return SolverOpts(quadrature=QuadratureOpts(**quadrature), **solver)

    @classmethod
    def build(cls, flags: Dict[str, Any], config_path: Optional[str] = None) -> "RunConfig":
        """Merge a JSON config file with the flags that were given; flags win"""
        merged: Dict[str, Any] = {}
        if config_path:
            try:
                merged.update(json.loads(Path(config_path).read_text()))
            except (OSError, json.JSONDecodeError) as exc:
                raise InvalidConfig(f"cannot read config file {config_path}: {exc}", field="config") from exc
        merged.update({key: value for key, value in flags.items() if value is not None})
        try:
            return cls.model_validate(merged)
        except ValidationError as exc:
            first = exc.errors()[0]
            field = ".".join(str(part) for part in first["loc"]) or None
            raise InvalidConfig(f"{field}: {first['msg']}", field=field,
                                details=[error["msg"] for error in exc.errors()]) from exc
