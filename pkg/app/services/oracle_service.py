"""
Exact diagonalization of the two-qubit Hamiltonian with a small discrete bath
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from app.core.errors import DimensionTooLarge, NotConverged, ValidationFailed
from app.models import DiscreteBath, ModelParams
from app.schemas.options import TruncationSpec
from app.schemas.reports import ExactGround, TruncationSweep

logger = logging.getLogger(__name__)

MAX_DIMENSION = 4_000_000
RESIDUAL_TOL = 1e-10
SWEEP_TOL = 1e-8

# spin index 0 is up (sigma^z = +1)
_SZ = np.array([1.0, -1.0])


class _Hamiltonian:
    """Matrix-free H on a (2, 2, n+1, ..., n+1) tensor"""

    def __init__(self, params: ModelParams, bath: DiscreteBath, trunc: TruncationSpec):
        self.params = params
        self.couplings = bath.couplings
        self.n_modes = bath.n_modes
        self.shape = (2, 2) + (trunc.n_max + 1,) * self.n_modes
        self.dimension = int(np.prod(self.shape))

        levels = np.arange(trunc.n_max + 1, dtype=float)
        ladder = np.diag(np.sqrt(levels[1:]), 1)
        self.position = ladder + ladder.T

        spin_axes = (2, 2) + (1,) * self.n_modes
        sz1 = _SZ.reshape(2, 1)
        sz2 = _SZ.reshape(1, 2)
        self.sz_sum = (sz1 + sz2).reshape(spin_axes)

        diagonal = np.broadcast_to((-params.epsilon / 2.0 * (sz1 + sz2) + params.k_ising * sz1 * sz2)
                                   .reshape(spin_axes), self.shape).copy()
        occupation = np.zeros(self.shape[2:])
        for mode, omega in enumerate(bath.frequencies):
            axis_shape = [1] * self.n_modes
            axis_shape[mode] = trunc.n_max + 1
            occupation = occupation + levels.reshape(axis_shape)
            diagonal += omega * levels.reshape((1, 1) + tuple(axis_shape))

        self.allowed = None
        if trunc.total_cap is not None:
            self.allowed = np.broadcast_to(occupation <= trunc.total_cap, self.shape)
            # states above the cap are pushed far above the spectrum
            penalty = 10.0 * (float(np.abs(diagonal).max()) + params.delta + float(np.abs(self.couplings).sum())
                              * math.sqrt(trunc.n_max + 1) + 1.0)
            diagonal = np.where(self.allowed, diagonal, penalty)
        self.diagonal = diagonal

    def apply(self, vector: np.ndarray) -> np.ndarray:
        psi = vector.reshape(self.shape)
        if self.allowed is not None:
            psi = np.where(self.allowed, psi, 0.0)
        out = self.diagonal * psi
        out -= self.params.delta / 2.0 * (psi[::-1, :] + psi[:, ::-1])
        for mode, g in enumerate(self.couplings):
            if g == 0:
                continue
            axis = 2 + mode
            displaced = np.moveaxis(np.tensordot(self.position, psi, axes=([1], [axis])), 0, axis)
            out += g / 2.0 * self.sz_sum * displaced
        if self.allowed is not None:
            out = np.where(self.allowed, out, self.diagonal * vector.reshape(self.shape))
        return out.reshape(-1)

    def operator(self) -> LinearOperator:
        return LinearOperator((self.dimension, self.dimension), matvec=self.apply, dtype=float)


class OracleService:
    """Service for brute-force reference ground states"""

    @staticmethod
    def exact_ground(params: ModelParams, bath: DiscreteBath, trunc: Optional[TruncationSpec] = None,
                     n_max: int = 4) -> ExactGround:
        """Lowest eigenpair of H by Lanczos (ARPACK) on matrix-vector products only"""
        if trunc is None:
            trunc = TruncationSpec(n_modes=bath.n_modes, n_max=n_max)
        if trunc.n_modes != bath.n_modes:
            raise ValidationFailed(
                f"truncation has {trunc.n_modes} modes, bath has {bath.n_modes}", field="n_modes")
        if trunc.dimension > MAX_DIMENSION:
            raise DimensionTooLarge(f"dimension {trunc.dimension} exceeds {MAX_DIMENSION}", field="n_max")

        hamiltonian = _Hamiltonian(params, bath, trunc)
        start = np.random.default_rng(0).standard_normal(hamiltonian.dimension)
        try:
            values, vectors = eigsh(hamiltonian.operator(), k=1, which="SA", v0=start, tol=1e-13,
                                    maxiter=100 * hamiltonian.dimension)
        except ArpackNoConvergence as exc:
            raise NotConverged("Lanczos iteration did not converge", details=str(exc)) from exc

        energy = float(values[0])
        vector = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
        residual = float(np.linalg.norm(hamiltonian.apply(vector) - energy * vector))
        if residual > RESIDUAL_TOL:
            raise NotConverged(f"Rayleigh residual {residual:.3e} above {RESIDUAL_TOL}",
                               details={"energy": energy, "residual": residual})

        psi = vector.reshape(hamiltonian.shape)
        weight = psi ** 2
        sz1 = float(np.sum(weight * _SZ.reshape((2, 1) + (1,) * bath.n_modes)))
        sz2 = float(np.sum(weight * _SZ.reshape((1, 2) + (1,) * bath.n_modes)))
        sx1 = float(np.sum(psi * psi[::-1, :]))
        sx2 = float(np.sum(psi * psi[:, ::-1]))
        logger.debug("exact ground %.15g (dimension %d, residual %.2e)", energy, hamiltonian.dimension, residual)
        return ExactGround(energy=energy, sz=(sz1 + sz2) / 2.0, sx=(sx1 + sx2) / 2.0,
                           dimension=hamiltonian.dimension, residual=residual)

    @staticmethod
    def truncation_sweep(params: ModelParams, bath: DiscreteBath, n_max_values: Sequence[int]) -> TruncationSweep:
        """Exact ground energy for growing boson cutoffs with an Aitken-extrapolated estimate"""
        n_max_values = sorted(int(n) for n in n_max_values)
        energies = [
            OracleService.exact_ground(params, bath, TruncationSpec(n_modes=bath.n_modes, n_max=n)).energy
            for n in n_max_values
        ]
        estimate = energies[-1]
        if len(energies) >= 3:
            e0, e1, e2 = energies[-3:]
            curvature = e2 - 2.0 * e1 + e0
            if curvature != 0 and abs(e2 - e1) < abs(e1 - e0):
                estimate = e2 - (e2 - e1) ** 2 / curvature
        converged = len(energies) >= 2 and abs(energies[-1] - energies[-2]) <= SWEEP_TOL
        if not converged:
            logger.warning("ground energy not converged in n_max up to %d", n_max_values[-1])
        return TruncationSweep(n_max=n_max_values, energies=energies, estimate=estimate, converged=converged)

    @staticmethod
    def sweep_table(sweep: TruncationSweep) -> pd.DataFrame:
        table = pd.DataFrame({"n_max": sweep.n_max, "energy": sweep.energies})
        table["change"] = table["energy"].diff()
        return table
