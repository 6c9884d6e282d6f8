"""
Ground-state observables of a converged ansatz state
"""

import logging
import math
from typing import Optional, Union

import numpy as np
from scipy.special import entr

from app.core.errors import NegativeEigenvalueBeyondTolerance, NotInDelocalizedPhase
from app.models import AnsatzState, ContinuumBath, DiscreteBath, ModelParams
from app.schemas.options import SolverOpts
from app.schemas.reports import GroundStateReport, ReducedDensityMatrix, SolveReport
from app.services.solver_service import SolverService

logger = logging.getLogger(__name__)

NEGATIVE_EIGENVALUE_TOL = 1e-10
CHI_BIASES = (1e-8, 1e-7)
CHI_AGREEMENT = 1e-3

Bath = Union[ContinuumBath, DiscreteBath]


class ObservablesService:
    """Service for energies, magnetizations and entanglement measures"""

    @staticmethod
    def ground_energy(state: AnsatzState, params: ModelParams, sigma0: Optional[float] = None) -> float:
        """E_g = -(W + V - K + Sigma)/2 - V + F sigma0^2/4.

        With `sigma0` given, the energy is re-evaluated at the same xi profile
        (eta, V, F, W, u frozen) with eps' = eps + F sigma0 and Sigma rebuilt.
        """
        if sigma0 is None:
            sigma0, sigma_cap = state.sigma0, state.sigma_cap
        else:
            eps_prime = params.epsilon + state.f_stat * sigma0
            d = SolverService.gap_d(state.eta, params.delta, state.w, state.v_ind, params.k_ising)
            sigma_cap = math.hypot(d, 2.0 * eps_prime * state.u)
        return (-(state.w + state.v_ind - params.k_ising + sigma_cap) / 2.0
                - state.v_ind + state.f_stat * sigma0 ** 2 / 4.0)

    @staticmethod
    def sigma_x_avg(state: AnsatzState, params: ModelParams) -> float:
        return state.eta ** 2 * params.delta * state.cos_theta ** 2 / state.w

    @staticmethod
    def sigma_z_avg(state: AnsatzState) -> float:
        """u sin(2 theta), which equals sigma0/2"""
        return state.u * math.sin(2.0 * state.theta)

    @staticmethod
    def chi_closed_form(params: ModelParams, bath: Optional[Bath] = None,
                        opts: Optional[SolverOpts] = None) -> float:
        """2u^2/(W - V + K - 4u^2F) on the zero-bias delocalized branch"""
        report = SolverService.solve_delocalized_branch(params, bath, opts)
        state = report.state
        d = SolverService.gap_d(state.eta, params.delta, state.w, state.v_ind, params.k_ising)
        denominator = d - 4.0 * state.u ** 2 * state.f_stat
        if denominator <= 0:
            raise NotInDelocalizedPhase(
                f"alpha={params.alpha} is not in the delocalized phase", field="alpha")
        return 2.0 * state.u ** 2 / denominator

    @staticmethod
    def susceptibility(params: ModelParams, bath: Optional[Bath] = None,
                       opts: Optional[SolverOpts] = None) -> float:
        """Static susceptibility lim <sigma^z>/eps, extrapolated from two small biases"""
        closed = ObservablesService.chi_closed_form(params, bath, opts)
        small, large = CHI_BIASES
        ratios = []
        for bias in (small, large):
            report = SolverService.solve(params.replace(epsilon=bias), bath, opts)
            ratios.append(ObservablesService.sigma_z_avg(report.state) / bias)

        if abs(ratios[1] - ratios[0]) > CHI_AGREEMENT * abs(ratios[0]):
            logger.warning("chi at eps=%g and eps=%g differ: %.6g vs %.6g", small, large, *ratios)
        # even in eps, so the leading correction is O(eps^2)
        chi = (large ** 2 * ratios[0] - small ** 2 * ratios[1]) / (large ** 2 - small ** 2)
        if abs(chi - closed) > CHI_AGREEMENT * abs(closed):
            logger.warning("extrapolated chi %.10g departs from closed form %.10g", chi, closed)
        return chi

    @staticmethod
    def reduced_density_matrix(state: AnsatzState) -> ReducedDensityMatrix:
        """Two-qubit density matrix after tracing out the bath; the dark row and column stay zero"""
        u, v, eta = state.u, state.v, state.eta
        c, s = state.cos_theta, state.sin_theta
        up, down = u * c + s, u * c - s
        rho = np.zeros((4, 4))
        rho[0, 0] = up ** 2 / 2.0
        rho[1, 1] = (v * c) ** 2
        rho[2, 2] = down ** 2 / 2.0
        rho[0, 1] = rho[1, 0] = v * eta / math.sqrt(2.0) * c * up
        rho[1, 2] = rho[2, 1] = v * eta / math.sqrt(2.0) * c * down
        rho[0, 2] = rho[2, 0] = ((u * c) ** 2 - s ** 2) * eta ** 4 / 2.0
        return ReducedDensityMatrix.from_array(rho)

    @staticmethod
    def entanglement_entropy(rho: ReducedDensityMatrix) -> float:
        """Von Neumann entropy in bits of the active 3x3 block"""
        eigenvalues = np.linalg.eigvalsh(rho.active_block())
        if eigenvalues.min() < -NEGATIVE_EIGENVALUE_TOL:
            raise NegativeEigenvalueBeyondTolerance(
                f"density matrix eigenvalue {eigenvalues.min():.3e} is negative",
                details=eigenvalues.tolist(),
            )
        eigenvalues = np.clip(eigenvalues, 0.0, 1.0)
        return float(np.clip(entr(eigenvalues).sum() / math.log(2.0), 0.0, 2.0))

    @staticmethod
    def correlation_c12(state: AnsatzState) -> float:
        """<s1z s2z> - <s1z><s2z>"""
        u2, v2 = state.u ** 2, state.v ** 2
        return ((u2 - v2) * state.cos_theta ** 2 + state.sin_theta ** 2
                - state.sigma0 ** 2 / 4.0)

    @staticmethod
    def report(solved: SolveReport, params: ModelParams, chi: Optional[float] = None,
               pinned: Optional[SolveReport] = None) -> GroundStateReport:
        """Collect every observable of one solve; `pinned` is the sigma0 = 0 solve at the same params"""
        state = solved.state
        rho = ObservablesService.reduced_density_matrix(state)
        e_g = ObservablesService.ground_energy(state, params)
        e_g_pinned = None if pinned is None else ObservablesService.ground_energy(pinned.state, params)
        return GroundStateReport(
            e_g=e_g,
            sx=ObservablesService.sigma_x_avg(state, params),
            sz=ObservablesService.sigma_z_avg(state),
            chi=chi,
            entropy=ObservablesService.entanglement_entropy(rho),
            c12=ObservablesService.correlation_c12(state),
            rho=rho,
            branch=solved.branch,
            validity=solved.validity,
            sigma0=state.sigma0,
            eps_prime=state.eps_prime,
            e_g_pinned=e_g_pinned,
            energy_gain=None if e_g_pinned is None else e_g_pinned - e_g,
        )
