"""
Numerical option schemas
"""

from typing import Annotated, Literal, Optional, Union
from pydantic import BaseModel, ConfigDict, Field

from app.core.config import settings
from app.models.state import AnsatzState

class QuadratureOpts(BaseModel):
    """Tolerances for the bath integrals"""
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=settings.QUAD_REL_TOL, gt=0)
    abs_tol: float = Field(default=settings.QUAD_ABS_TOL, gt=0)
    max_subdivisions: int = Field(default=settings.QUAD_MAX_SUBDIVISIONS, ge=1)

    def halved(self) -> "QuadratureOpts":
        return QuadratureOpts(rel_tol=self.rel_tol / 2, abs_tol=self.abs_tol / 2,
                              max_subdivisions=self.max_subdivisions)

class Decoupled(BaseModel):
    """Start from the bath-free solution"""
    model_config = ConfigDict(frozen=True)
    kind: Literal["decoupled"] = "decoupled"

class LocalizedStart(BaseModel):
    """Start from a large gap, approaching the localized branch from above"""
    model_config = ConfigDict(frozen=True)
    kind: Literal["localized"] = "localized"

class WarmStart(BaseModel):
    """Continue from a previously converged state"""
    model_config = ConfigDict(frozen=True)
    kind: Literal["warm"] = "warm"
    state: AnsatzState

InitialGuess = Annotated[Union[Decoupled, LocalizedStart, WarmStart], Field(discriminator="kind")]

class SolverOpts(BaseModel):
    """Self-consistency options"""
    model_config = ConfigDict(frozen=True)

    max_iter: int = Field(default=settings.SOLVER_MAX_ITER, ge=1)
    fp_tol: float = Field(default=settings.SOLVER_FP_TOL, gt=0)
    damping: float = Field(default=settings.SOLVER_DAMPING, gt=0, le=1)
    init: InitialGuess = Decoupled()
    quadrature: QuadratureOpts = QuadratureOpts()

    def starting_from(self, init: Optional[Union[Decoupled, LocalizedStart, WarmStart]]) -> "SolverOpts":
        return self.model_copy(update={"init": init or Decoupled()})

class TruncationSpec(BaseModel):
    """Boson Fock-space truncation for exact diagonalization"""
    model_config = ConfigDict(frozen=True)

    n_modes: int = Field(ge=1, le=8)
    n_max: int = Field(default=4, ge=1)
    total_cap: Optional[int] = Field(default=None, ge=0)

    @property
    def dimension(self) -> int:
        return 4 * (self.n_max + 1) ** self.n_modes
