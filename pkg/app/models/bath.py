"""
Bosonic bath descriptions
"""

from typing import Annotated, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

class ContinuumBath(BaseModel):
    """Power-law spectral density J = 2 alpha w^s wc^(1-s) with a hard cutoff at wc"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["continuum"] = "continuum"
    alpha: float
    s: float
    omega_c: float = 1.0

class DiscreteBath(BaseModel):
    """Explicit list of (coupling g, frequency omega) modes"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["discrete"] = "discrete"
    modes: Tuple[Tuple[float, float], ...]

    @property
    def couplings(self) -> np.ndarray:
        return np.array([g for g, _ in self.modes], dtype=float)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([w for _, w in self.modes], dtype=float)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

BathSpec = Annotated[Union[ContinuumBath, DiscreteBath], Field(discriminator="kind")]
