"""
Self-consistent variables of the ansatz
"""

import math
from typing import Dict

from pydantic import BaseModel, ConfigDict

class AnsatzState(BaseModel):
    """Converged (or intermediate) variables of the variational ground state"""
    model_config = ConfigDict(frozen=True)

    eta: float
    v_ind: float
    f_stat: float
    w: float
    u: float
    v: float
    sigma_cap: float
    theta: float
    sigma0: float
    eps_prime: float

    @property
    def cos_theta(self) -> float:
        return math.cos(self.theta)

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta)

    def components(self) -> Dict[str, float]:
        return self.model_dump()
