"""
Bath functionals eta(Sigma), V(Sigma), F(Sigma) and bath discretization
"""

import logging
import math
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import expit

from app.core.config import settings
from app.core.errors import DegenerateGap, InvalidConfig, QuadratureNotConverged
from app.models import ContinuumBath, DiscreteBath
from app.schemas.options import QuadratureOpts

logger = logging.getLogger(__name__)

MIN_SIGMA = 1e-300


class BathFunctionals(NamedTuple):
    eta: float
    v_ind: float
    f_stat: float


def _integrate(func: Callable[[float], float], lo: float, hi: float, opts: QuadratureOpts,
               weight_exp: Optional[float] = None) -> float:
    """Adaptive quadrature; `weight_exp` puts an x^weight_exp weight on the left endpoint"""
    kwargs = dict(epsabs=opts.abs_tol, epsrel=opts.rel_tol, limit=opts.max_subdivisions, full_output=1)
    if weight_exp:
        kwargs.update(weight="alg", wvar=(weight_exp, 0.0))
    result = quad(func, lo, hi, **kwargs)
    value, abserr = result[0], result[1]
    if len(result) > 3:
        # QUADPACK flagged the run; roundoff-limited results within tolerance are kept
        target = max(opts.abs_tol, opts.rel_tol * abs(value))
        if abserr > 10.0 * target:
            raise QuadratureNotConverged(
                f"quadrature on [{lo:g}, {hi:g}] stopped at error {abserr:.3e} (target {target:.3e})",
                details={"message": result[3]},
            )
        logger.debug("quadrature warning accepted on [%g, %g]: %s", lo, hi, result[3])
    return value


def _continuum_moments(s: float, omega_c: float, sigma: float, opts: QuadratureOpts):
    """Return (I_eta, I_f) with
    I_eta = int_0^wc w^s/(w+Sigma)^2 dw and I_f = int_0^wc w^(s-1) Sigma^2/(w+Sigma)^2 dw.

    Both integrands are written through q = Sigma/(w+Sigma) = 1 - xi. The piece
    [0, min(Sigma, wc)] carries the w^(s-1) endpoint weight analytically; the
    piece [Sigma, wc] is integrated in u = ln(w/Sigma).
    """
    split = min(sigma, omega_c)
    ratio = split / sigma

    def q_lower(x):
        return 1.0 / (1.0 + ratio * x)

    lower_eta = _integrate(lambda x: q_lower(x) * (1.0 - q_lower(x)), 0.0, 1.0, opts, weight_exp=s - 1.0)
    lower_f = _integrate(lambda x: q_lower(x) ** 2, 0.0, 1.0, opts, weight_exp=s - 1.0)
    i_eta = split ** s / sigma * lower_eta
    i_f = split ** s * lower_f

    if sigma < omega_c:
        top = math.log(omega_c / sigma)
        upper_eta = _integrate(lambda u: math.exp(s * u) * expit(-u) * expit(u), 0.0, top, opts)
        upper_f = _integrate(lambda u: math.exp(s * u) * expit(-u) ** 2, 0.0, top, opts)
        i_eta += sigma ** (s - 1.0) * upper_eta
        i_f += sigma ** s * upper_f
    return i_eta, i_f


@lru_cache(maxsize=settings.SPECTRAL_CACHE_SIZE)
def bath_functionals(bath: Union[ContinuumBath, DiscreteBath], sigma_cap: float,
                     opts: QuadratureOpts = QuadratureOpts()) -> BathFunctionals:
    """eta, V, F at one gap value, computed together and memoized"""
    if not sigma_cap >= MIN_SIGMA:
        raise DegenerateGap(f"gap Sigma={sigma_cap!r} collapsed to zero", field="sigma_cap")

    if isinstance(bath, DiscreteBath):
        g2 = bath.couplings ** 2
        omega = bath.frequencies
        xi = omega / (omega + sigma_cap)
        q = sigma_cap / (omega + sigma_cap)
        eta = math.exp(-float(np.sum(g2 * xi ** 2 / (2.0 * omega ** 2))))
        v_ind = float(np.sum(g2 / (2.0 * omega) * xi * (2.0 - xi)))
        f_stat = float(np.sum(g2 * q ** 2 / omega))
        return BathFunctionals(eta, v_ind, f_stat)

    if bath.alpha == 0:
        return BathFunctionals(1.0, 0.0, 0.0)

    i_eta, i_f = _continuum_moments(bath.s, bath.omega_c, sigma_cap, opts)
    prefactor = bath.alpha * bath.omega_c ** (1.0 - bath.s)
    f_stat = 2.0 * prefactor * i_f
    # xi(2 - xi) = 1 - (1 - xi)^2, so V = alpha wc / s - F / 2
    v_ind = bath.alpha * bath.omega_c / bath.s - 0.5 * f_stat
    return BathFunctionals(math.exp(-prefactor * i_eta), v_ind, f_stat)


class SpectralService:
    """Service for the bath functionals entering the ansatz"""

    @staticmethod
    def functionals(bath, sigma_cap: float, opts: Optional[QuadratureOpts] = None) -> BathFunctionals:
        return bath_functionals(bath, float(sigma_cap), opts or QuadratureOpts())

    @staticmethod
    def eta_of_sigma(bath, sigma_cap: float, opts: Optional[QuadratureOpts] = None) -> float:
        """Dressed-tunneling factor"""
        return SpectralService.functionals(bath, sigma_cap, opts).eta

    @staticmethod
    def v_of_sigma(bath, sigma_cap: float, opts: Optional[QuadratureOpts] = None) -> float:
        """Bath-induced Ising coupling"""
        return SpectralService.functionals(bath, sigma_cap, opts).v_ind

    @staticmethod
    def f_of_sigma(bath, sigma_cap: float, opts: Optional[QuadratureOpts] = None) -> float:
        """Static-shift energy"""
        return SpectralService.functionals(bath, sigma_cap, opts).f_stat

    @staticmethod
    def f_asymptotic(alpha: float, s: float, sigma_cap: float, omega_c: float = 1.0) -> float:
        """Small-gap form 2 pi alpha wc (1-s)/sin(pi(1-s)) (Sigma/wc)^s.

        np.sinc(1-s) = sin(pi(1-s))/(pi(1-s)) equals 1 at s=1, giving 2 alpha Sigma.
        """
        if sigma_cap <= 0:
            return 0.0
        return 2.0 * alpha * omega_c * (sigma_cap / omega_c) ** s / float(np.sinc(1.0 - s))

    @staticmethod
    def log_discretize(bath: ContinuumBath, n_modes: int,
                       base: Optional[float] = None) -> DiscreteBath:
        """Logarithmic bins [wc L^-(k+1), wc L^-k] with g_k^2 = int_bin J and w_k = int_bin wJ / int_bin J"""
        base = base or settings.LOG_DISCRETIZATION_BASE
        if base <= 1:
            raise InvalidConfig("discretization base must exceed 1", field="base")
        s, wc = bath.s, bath.omega_c
        edges = wc * base ** -np.arange(n_modes + 1, dtype=float)
        hi, lo = edges[:-1], edges[1:]
        weight = 2.0 * bath.alpha * wc ** (1.0 - s) * (hi ** (s + 1) - lo ** (s + 1)) / (s + 1)
        omega = (s + 1) / (s + 2) * (hi ** (s + 2) - lo ** (s + 2)) / (hi ** (s + 1) - lo ** (s + 1))
        modes = tuple((float(math.sqrt(w)), float(f)) for w, f in zip(weight, omega))
        return DiscreteBath(modes=tuple(sorted(modes, key=lambda mode: mode[1])))

    @staticmethod
    def cache_clear() -> None:
        bath_functionals.cache_clear()
