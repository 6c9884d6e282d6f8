"""
Hamiltonian parameters
"""

from pydantic import BaseModel, ConfigDict

from app.models.bath import ContinuumBath

class ModelParams(BaseModel):
    """Six parameters of the two-qubit Hamiltonian, energies in units of omega_c"""
    model_config = ConfigDict(frozen=True)

    delta: float
    epsilon: float = 0.0
    k_ising: float = 0.0
    alpha: float = 0.0
    s: float = 1.0
    omega_c: float = 1.0

    def continuum_bath(self) -> ContinuumBath:
        """Bath described by (alpha, s, omega_c)"""
        return ContinuumBath(alpha=self.alpha, s=self.s, omega_c=self.omega_c)

    def replace(self, **changes) -> "ModelParams":
        """Copy with some fields changed"""
        return self.model_copy(update=changes)
