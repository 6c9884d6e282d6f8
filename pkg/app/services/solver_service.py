"""
Self-consistent solution of the variational ansatz
"""

import logging
import math
import sys
from typing import Callable, Dict, List, Optional, Tuple, Union

from scipy.optimize import brentq

from app.core.config import settings
from app.core.errors import DegenerateGap, NotConverged
from app.models import AnsatzState, ContinuumBath, DiscreteBath, ModelParams
from app.schemas.options import Decoupled, LocalizedStart, SolverOpts, WarmStart
from app.schemas.reports import SolveReport
from app.services.model_service import ModelService
from app.services.spectral_service import MIN_SIGMA, SpectralService

logger = logging.getLogger(__name__)

_EPS = sys.float_info.epsilon

# tolerances on the state identities checked after every solve
IDENTITY_TOLERANCES = {
    "normalization": 1e-12,
    "level_splitting": 1e-10,
    "gap": 1e-10,
    "angle": 1e-12,
    "static_displacement": 1e-8,
}

Bath = Union[ContinuumBath, DiscreteBath]


def _relative_change(old: float, new: float) -> float:
    scale = max(abs(old), abs(new))
    return 0.0 if scale == 0 else abs(new - old) / scale


def _max_relative_change(old: AnsatzState, new: AnsatzState) -> float:
    before, after = old.components(), new.components()
    return max(_relative_change(before[name], after[name]) for name in before)


def _aitken(window: List[float], lo: float, hi: float) -> float:
    """Delta-squared extrapolation of three damped iterates, kept only inside the bracket"""
    y0, y1, y2 = window
    curvature = y2 - 2.0 * y1 + y0
    if curvature == 0:
        return y2
    extrapolated = y0 - (y1 - y0) ** 2 / curvature
    if math.isfinite(extrapolated) and lo < extrapolated < hi:
        return extrapolated
    if lo == 0 and extrapolated <= 0 and y2 < y0:
        # geometric decay towards zero: the gap is collapsing
        return 1e-2 * y2
    return y2


def _bracket_midpoint(lo: float, hi: float, x: float) -> float:
    if math.isinf(hi):
        return 2.0 * max(lo, x)
    if lo == 0:
        return 1e-2 * hi
    if hi > 4.0 * lo:
        return math.sqrt(lo * hi)
    return 0.5 * (lo + hi)


class SolverService:
    """Service for the self-consistent ansatz variables"""

    @staticmethod
    def uvw(eta: float, v_ind: float, k_ising: float, delta: float) -> Tuple[float, float, float]:
        """Level splitting W and basis coefficients u, v"""
        tunneling = eta * delta
        ising = v_ind - k_ising
        w = math.hypot(tunneling, ising)
        if w == 0:
            raise DegenerateGap("level splitting W vanished", field="w")
        # the smaller of u^2, v^2 is formed without cancellation
        if ising >= 0:
            u2 = (w + ising) / (2.0 * w)
            v2 = tunneling ** 2 / (2.0 * w * (w + ising))
        else:
            v2 = (w - ising) / (2.0 * w)
            u2 = tunneling ** 2 / (2.0 * w * (w - ising))
        return w, math.sqrt(u2), math.sqrt(v2)

    @staticmethod
    def gap_d(eta: float, delta: float, w: float, v_ind: float, k_ising: float) -> float:
        """W - V + K, accurate when W is close to V - K"""
        ising = v_ind - k_ising
        if ising > 0:
            return (eta * delta) ** 2 / (w + ising)
        return w - ising

    @staticmethod
    def theta_sigma(w: float, v_ind: float, k_ising: float, eps_prime: float, u: float,
                    gap: Optional[float] = None) -> Tuple[float, float, float]:
        """Gap Sigma and mixing angle of the |A>, |B> block"""
        d = w - v_ind + k_ising if gap is None else gap
        sigma = math.hypot(d, 2.0 * eps_prime * u)
        if not sigma >= MIN_SIGMA:
            raise DegenerateGap(f"gap Sigma={sigma!r} below {MIN_SIGMA}", field="sigma_cap")
        theta = 0.5 * math.atan2(2.0 * eps_prime * u, d)
        return sigma, math.cos(theta), math.sin(theta)

    @staticmethod
    def inner_eps_prime(epsilon: float, d: float, u: float, shift: float,
                        sigma_old: Optional[float] = None) -> float:
        """Renormalized bias at frozen bath functionals.

        Solves eps' = eps + shift * eps' / hypot(d, 2 u eps') with shift = 4u^2F,
        i.e. sigma0 = 4u^2 eps'/Sigma and eps' = eps + F sigma0 together. At
        eps = 0 the eps -> 0+ root is returned.
        """
        if shift == 0 or u == 0:
            return epsilon
        if epsilon == 0:
            if shift > abs(d):
                return math.sqrt((shift - abs(d)) * (shift + abs(d))) / (2.0 * u)
            return 0.0

        def residual(x: float) -> float:
            return x - epsilon - shift * x / math.hypot(d, 2.0 * u * x)

        lo, hi = epsilon, epsilon + shift / (2.0 * u)
        if sigma_old and shift < sigma_old:
            guess = epsilon / (1.0 - shift / sigma_old)
            if lo < guess < hi:
                if residual(guess) > 0:
                    hi = guess
                else:
                    lo = guess
        if residual(lo) >= 0:
            return lo
        return brentq(residual, lo, hi, xtol=1e-300, rtol=4 * _EPS, maxiter=200)

    @staticmethod
    def fixed_point_map(sigma_old: float, params: ModelParams, bath: Bath,
                        opts: Optional[SolverOpts] = None, pin_sigma0: bool = False) -> AnsatzState:
        """One application of Sigma_old -> (eta, V, F) -> (W, u, v) -> (sigma0, eps') -> Sigma_new"""
        opts = opts or SolverOpts()
        eta, v_ind, f_stat = SpectralService.functionals(bath, sigma_old, opts.quadrature)
        w, u, v = SolverService.uvw(eta, v_ind, params.k_ising, params.delta)
        d = SolverService.gap_d(eta, params.delta, w, v_ind, params.k_ising)
        if pin_sigma0:
            eps_prime = params.epsilon
        else:
            eps_prime = SolverService.inner_eps_prime(params.epsilon, d, u, 4.0 * u * u * f_stat, sigma_old)
        sigma_new, cos_t, sin_t = SolverService.theta_sigma(w, v_ind, params.k_ising, eps_prime, u, gap=d)
        sigma0 = 0.0 if pin_sigma0 else 4.0 * u * u * eps_prime / sigma_new
        return AnsatzState(
            eta=eta, v_ind=v_ind, f_stat=f_stat, w=w, u=u, v=v,
            sigma_cap=sigma_new, theta=math.atan2(sin_t, cos_t),
            sigma0=sigma0, eps_prime=eps_prime,
        )

    @staticmethod
    def starting_gap(params: ModelParams, init) -> float:
        """Initial Sigma for the outer iteration"""
        if isinstance(init, WarmStart):
            return init.state.sigma_cap
        if isinstance(init, LocalizedStart):
            return params.omega_c
        w, u, _ = SolverService.uvw(1.0, 0.0, params.k_ising, params.delta)
        d = SolverService.gap_d(1.0, params.delta, w, 0.0, params.k_ising)
        return math.hypot(d, 2.0 * params.epsilon * u)

    @staticmethod
    def iterate(step_map: Callable[[float], AnsatzState], sigma_start: float,
                opts: SolverOpts) -> Tuple[AnsatzState, int, float]:
        """Damped Picard iteration on Sigma with Aitken extrapolation.

        Damping halves after three successive sign flips of the step. The
        sign of G(x) - x brackets the fixed point; iterates leaving the
        bracket are replaced by its midpoint.
        """
        x = sigma_start
        damping = opts.damping
        prev_step: Optional[float] = None
        flips = 0
        stalled = 0
        lo, hi = 0.0, math.inf
        window: List[float] = [x]
        residual = math.inf

        for iteration in range(1, opts.max_iter + 1):
            state = step_map(x)
            step = state.sigma_cap - x
            if step > 0:
                lo = max(lo, x)
            elif step < 0:
                hi = min(hi, x)

            if abs(step) <= opts.fp_tol * x:
                check = step_map(state.sigma_cap)
                residual = _max_relative_change(state, check)
                if residual <= opts.fp_tol:
                    return check, iteration + 1, residual
                stalled = stalled + 1 if abs(check.sigma_cap - state.sigma_cap) <= 8 * _EPS * x else 0
                if stalled >= 8:
                    logger.warning("fixed point pinned at round-off; residual %.3e", residual)
                    return check, iteration + 1, residual

            if prev_step is not None and step * prev_step < 0:
                flips += 1
                if flips >= 3:
                    damping = max(damping / 2.0, 1e-6)
                    flips = 0
                    logger.debug("iteration %d: damping halved to %g", iteration, damping)
            else:
                flips = 0
            prev_step = step

            x_next = x + damping * step
            window.append(x_next)
            if len(window) == 3:
                x_next = _aitken(window, lo, hi)
                window = [x_next]

            if not lo < x_next < hi:
                x_next = _bracket_midpoint(lo, hi, x)
                window = [x_next]
            if not x_next >= MIN_SIGMA:
                raise DegenerateGap("gap collapsed during iteration", field="sigma_cap")
            logger.debug("iteration %d: Sigma=%.17g step=%.3e", iteration, x_next, step)
            x = x_next

        raise NotConverged(
            f"no fixed point within {opts.max_iter} iterations (last residual {residual:.3e})",
            details={"sigma_cap": x},
        )

    @staticmethod
    def identity_residuals(state: AnsatzState, params: ModelParams) -> Dict[str, float]:
        """Residuals of the algebraic identities a state must satisfy"""
        u2, v2 = state.u ** 2, state.v ** 2
        w2 = (state.eta * params.delta) ** 2 + (state.v_ind - params.k_ising) ** 2
        d = SolverService.gap_d(state.eta, params.delta, state.w, state.v_ind, params.k_ising)
        sigma2 = d ** 2 + 4.0 * state.eps_prime ** 2 * u2
        residuals = {
            "normalization": abs(u2 + v2 - 1.0),
            "level_splitting": abs(state.w ** 2 - w2) / w2,
            "gap": abs(state.sigma_cap ** 2 - sigma2) / state.sigma_cap ** 2,
            "angle": abs(state.cos_theta ** 2 + state.sin_theta ** 2 - 1.0),
            "static_displacement": 0.0,
        }
        expected = 4.0 * u2 * state.eps_prime / state.sigma_cap
        if state.sigma0 != 0:
            residuals["static_displacement"] = abs(state.sigma0 - expected) / abs(expected)
        return residuals

    @staticmethod
    def branch_of(state: AnsatzState, params: ModelParams) -> str:
        """Localized when the static shift 4u^2F exceeds W - V + K"""
        shift = 4.0 * state.u ** 2 * state.f_stat
        d = SolverService.gap_d(state.eta, params.delta, state.w, state.v_ind, params.k_ising)
        return "Localized" if shift > d else "Delocalized"

    @staticmethod
    def solve(params: ModelParams, bath: Optional[Bath] = None, opts: Optional[SolverOpts] = None,
              alpha_c: Optional[float] = None, pin_sigma0: bool = False) -> SolveReport:
        """Converge the ansatz at validated params"""
        opts = opts or SolverOpts()
        bath = ModelService.validate_bath(bath if bath is not None else params.continuum_bath())

        def step_map(sigma: float) -> AnsatzState:
            return SolverService.fixed_point_map(sigma, params, bath, opts, pin_sigma0=pin_sigma0)

        state, iterations, residual = SolverService.iterate(
            step_map, SolverService.starting_gap(params, opts.init), opts)

        violations = {name: value for name, value in SolverService.identity_residuals(state, params).items()
                      if value > IDENTITY_TOLERANCES[name]}
        if violations:
            logger.error("state identities violated: %s", violations)
            raise NotConverged("converged state violates the ansatz identities", details=violations)

        notes = []
        if state.eps_prime > settings.VALIDITY_EPS_PRIME * params.omega_c:
            notes.append(f"eps_prime={state.eps_prime:.4g} above {settings.VALIDITY_EPS_PRIME}")
        if alpha_c is not None and params.alpha > settings.VALIDITY_ALPHA_FACTOR * alpha_c:
            notes.append(f"alpha above {settings.VALIDITY_ALPHA_FACTOR} alpha_c")
        if SolverService.gap_d(state.eta, params.delta, state.w, state.v_ind, params.k_ising) <= 0:
            notes.append("W - V + K not positive")
        for note in notes:
            logger.warning("outside the validity window: %s", note)

        return SolveReport(
            state=state,
            iterations=iterations,
            residual=residual,
            branch=SolverService.branch_of(state, params),
            validity=not notes,
            validity_notes=tuple(notes),
            sigma0_detached=state.sigma0 > 100.0 * params.epsilon / params.delta,
            pinned_sigma0=pin_sigma0,
        )

    @staticmethod
    def solve_delocalized_branch(params: ModelParams, bath: Optional[Bath] = None,
                                 opts: Optional[SolverOpts] = None) -> SolveReport:
        """Zero-bias solution with sigma0 = 0, i.e. Sigma = W - V + K"""
        return SolverService.solve(params.replace(epsilon=0.0), bath, opts, pin_sigma0=True)

    @staticmethod
    def solve_branches(params: ModelParams, bath: Optional[Bath] = None, opts: Optional[SolverOpts] = None,
                       tolerance: float = 1e-6, alpha_c: Optional[float] = None) -> List[SolveReport]:
        """Solve from both sides; two reports when the fixed points differ"""
        opts = opts or SolverOpts()
        lower = SolverService.solve(params, bath, opts.starting_from(Decoupled()), alpha_c=alpha_c)
        upper = SolverService.solve(params, bath, opts.starting_from(LocalizedStart()), alpha_c=alpha_c)
        if _relative_change(lower.state.sigma_cap, upper.state.sigma_cap) > tolerance:
            logger.info("two self-consistent branches at alpha=%g", params.alpha)
            return [lower, upper]
        return [lower]
