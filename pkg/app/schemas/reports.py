"""
Result schemas returned by the services
"""

from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.models.state import AnsatzState

Branch = Literal["Delocalized", "Localized"]

class SolveReport(BaseModel):
    """Outcome of one self-consistent solve"""
    model_config = ConfigDict(frozen=True)

    state: AnsatzState
    iterations: int
    residual: float
    branch: Branch
    validity: bool
    validity_notes: Tuple[str, ...] = ()
    sigma0_detached: bool = False
    pinned_sigma0: bool = False

class ReducedDensityMatrix(BaseModel):
    """Two-qubit reduced density matrix, 16 entries row-major.

    Basis: |uu>, (|ud>+|du>)/sqrt2, |dd>, (|ud>-|du>)/sqrt2.
    """
    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float).reshape(4, 4)

    def active_block(self) -> np.ndarray:
        return self.as_array()[:3, :3]

    @classmethod
    def from_array(cls, matrix: np.ndarray) -> "ReducedDensityMatrix":
        return cls(values=tuple(float(x) for x in np.asarray(matrix, dtype=float).ravel()))

class GroundStateReport(BaseModel):
    """Ground-state observables of one converged solve"""
    e_g: float
    sx: float
    sz: float
    chi: Optional[float] = None
    entropy: float
    c12: float
    rho: ReducedDensityMatrix
    branch: Branch
    validity: bool
    sigma0: float
    eps_prime: float
    e_g_pinned: Optional[float] = None
    energy_gain: Optional[float] = None

    def flat(self) -> Dict[str, object]:
        """Flat JSON-ready mapping; rho as a 16-element list"""
        data = self.model_dump()
        data["rho"] = list(self.rho.values)
        return data

class CriticalPoint(BaseModel):
    """Located zero of the localization criterion along one parameter axis.

    `value` is the critical value of `axis`; `alpha` is the coupling at the
    point, so for the alpha axis both coincide.
    """
    model_config = ConfigDict(frozen=True)

    axis: Literal["alpha", "delta", "k_ising"] = "alpha"
    value: float
    alpha: float
    bracket: Tuple[float, float]
    criterion_residual: float
    asymptotic: bool = False

    @property
    def alpha_c(self) -> float:
        return self.alpha

class ScalingLimitPrediction(BaseModel):
    """Critical coupling in the limit delta/omega_c -> 0"""
    s: float
    alpha_c: Optional[float]
    always_delocalized: bool = False

class ExponentFit(BaseModel):
    """Power law fitted on log10-log10 axes"""
    name: str = ""
    value: float
    slope: float
    intercept: float
    r_squared: float
    window: Tuple[float, float]
    n_points: int
    accepted: bool
    decade_slopes: List[float] = []

class ExponentSamples(BaseModel):
    """Raw (x, y) points behind one log-log fit"""
    x_label: str
    y_label: str
    x: List[float]
    y: List[float]

class ExponentSuite(BaseModel):
    """The five critical exponents at one bath exponent"""
    s: float
    delta: float
    k_ising: float
    alpha_c: float
    delta_c: float
    k_c: float
    fits: Dict[str, ExponentFit]
    samples: Dict[str, ExponentSamples] = {}

    def values(self) -> Dict[str, float]:
        return {name: fit.value for name, fit in self.fits.items()}

class ExactGround(BaseModel):
    """Lowest eigenpair summary from exact diagonalization"""
    energy: float
    sz: float
    sx: float
    dimension: int
    residual: float

class TruncationSweep(BaseModel):
    """Ground energy versus boson cutoff"""
    n_max: List[int]
    energies: List[float]
    estimate: float
    converged: bool
