"""
Critical point location, phase boundaries and critical exponents
"""

import logging
import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import linregress

from app.core.errors import (
    DegenerateGap,
    InsufficientPoints,
    InvalidConfig,
    NoSignChange,
    NonPositiveData,
    QptError,
)
from app.core.executor import ordered_map
from app.models import ModelParams
from app.schemas.options import LocalizedStart, SolverOpts
from app.schemas.reports import (
    CriticalPoint,
    ExponentFit,
    ExponentSamples,
    ExponentSuite,
    ScalingLimitPrediction,
)
from app.services.observables_service import ObservablesService
from app.services.solver_service import SolverService

logger = logging.getLogger(__name__)

ALPHA_BRACKET = (1e-6, 2.0)
MAX_BISECTIONS = 200
MIN_FIT_POINTS = 10
FIT_R_SQUARED = 0.999
FIT_MIN_DECADES = 2.0
EXPONENT_POINTS = 24
EXPONENT_DISTANCES = (1e-5, 1e-3)
EXPONENT_BIASES = (1e-10, 1e-7)
EXPONENT_RTOL = 1e-12
# coupling above alpha_c at which delta_c and k_c are located
AXIS_ALPHA_FACTOR = 1.05
EXPONENT_NAMES = ("delta", "gamma", "beta", "beta_prime", "zeta")


def _bisect(func: Callable[[float], float], lo: float, hi: float, f_lo: float,
            xtol: float, rtol: float) -> Tuple[float, float]:
    """Shrink [lo, hi] around a sign change of func; f_lo is func(lo)"""
    for _ in range(MAX_BISECTIONS):
        if abs(hi - lo) <= xtol + rtol * min(abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if f_mid == 0:
            return mid, mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo, hi


class CriticalityService:
    """Service for the localization transition"""

    @staticmethod
    def criterion(params: ModelParams, bath=None, opts: Optional[SolverOpts] = None) -> float:
        """1 - 4u^2F/(W - V + K) on the zero-bias delocalized branch; positive means delocalized"""
        state = SolverService.solve_delocalized_branch(params, bath, opts).state
        d = SolverService.gap_d(state.eta, params.delta, state.w, state.v_ind, params.k_ising)
        return 1.0 - 4.0 * state.u ** 2 * state.f_stat / d

    @staticmethod
    def localization_measure(params: ModelParams, opts: Optional[SolverOpts] = None) -> float:
        """Criterion, with a collapsed delocalized branch counted as localized"""
        try:
            return CriticalityService.criterion(params, opts=opts)
        except DegenerateGap:
            logger.debug("delocalized branch collapsed at %s", params)
            return -1.0

    @staticmethod
    def find_alpha_c(params: ModelParams, opts: Optional[SolverOpts] = None, xtol: float = 1e-8,
                     rtol: float = 0.0, bracket: Tuple[float, float] = ALPHA_BRACKET) -> CriticalPoint:
        """Bisect the criterion in alpha at fixed (delta, K, s).

        Without a sign change in the bracket and with K > 0, the asymptotic
        root alpha = s K / omega_c of the renormalized coupling K_r is
        returned and flagged.
        """
        opts = opts or SolverOpts()

        def measure(alpha: float) -> float:
            return CriticalityService.localization_measure(params.replace(alpha=alpha), opts)

        lo, hi = bracket
        f_lo, f_hi = measure(lo), measure(hi)
        if (f_lo > 0) == (f_hi > 0):
            if params.k_ising > 0:
                asymptote = params.s * params.k_ising / params.omega_c
                logger.info("no sign change in alpha; using the asymptote alpha=%g", asymptote)
                return CriticalPoint(axis="alpha", value=asymptote, alpha=asymptote, bracket=bracket,
                                     criterion_residual=float("nan"), asymptotic=True)
            raise NoSignChange(
                f"criterion keeps its sign on alpha in [{lo:g}, {hi:g}]", field="alpha",
                details={"criterion": [f_lo, f_hi]},
            )

        lo, hi = _bisect(measure, lo, hi, f_lo, xtol, rtol)
        alpha_c = 0.5 * (lo + hi)
        logger.info("alpha_c=%.12g for delta=%g K=%g s=%g", alpha_c, params.delta, params.k_ising, params.s)
        return CriticalPoint(axis="alpha", value=alpha_c, alpha=alpha_c, bracket=(lo, hi),
                             criterion_residual=measure(alpha_c))

    @staticmethod
    def find_critical_value(params: ModelParams, axis: str, opts: Optional[SolverOpts] = None,
                            xtol: float = 1e-10, rtol: float = 0.0,
                            max_expansions: int = 60) -> CriticalPoint:
        """Bisect the criterion along delta or k_ising at fixed alpha, expanding from the given value"""
        if axis not in ("delta", "k_ising"):
            raise InvalidConfig(f"unsupported axis {axis!r}", field="axis")
        opts = opts or SolverOpts()

        def measure(value: float) -> float:
            return CriticalityService.localization_measure(params.replace(**{axis: value}), opts)

        start = getattr(params, axis)
        f_start = measure(start)
        # localized at small tunneling and at ferromagnetic K
        upward = f_start <= 0
        step = 0.1 * max(abs(start), params.delta)
        other = start
        for _ in range(max_expansions):
            if axis == "delta":
                other = other * 2.0 if upward else other / 2.0
            else:
                other = other + step if upward else other - step
                step *= 2.0
            if (measure(other) > 0) != (f_start > 0):
                break
        else:
            raise NoSignChange(f"criterion keeps its sign along {axis} from {start:g}", field=axis)

        lo, hi = _bisect(measure, start, other, f_start, xtol, rtol)
        value = 0.5 * (lo + hi)
        logger.info("%s_c=%.12g at alpha=%g", axis, value, params.alpha)
        return CriticalPoint(axis=axis, value=value, alpha=params.alpha, bracket=(min(lo, hi), max(lo, hi)),
                             criterion_residual=measure(value))

    @staticmethod
    def alpha_c_scaling_limit(s: float) -> ScalingLimitPrediction:
        """alpha_c for delta/omega_c -> 0 (with K below the induced coupling)"""
        if s > 1:
            return ScalingLimitPrediction(s=s, alpha_c=None, always_delocalized=True)
        return ScalingLimitPrediction(s=s, alpha_c=0.125 if s == 1 else 0.0)

    @staticmethod
    def scan_boundary(axis: str, grid: Sequence[float], params: ModelParams, s_values: Iterable[float],
                      opts: Optional[SolverOpts] = None, max_workers: Optional[int] = None) -> pd.DataFrame:
        """alpha_c along a delta or K grid for each s; per-point failures land in the error column"""
        if axis not in ("delta", "k_ising"):
            raise InvalidConfig(f"unsupported axis {axis!r}", field="axis")
        grid = [float(value) for value in grid]

        def curve(s: float) -> List[Dict[str, object]]:
            rows = []
            previous: Optional[float] = None
            for value in grid:
                point = params.replace(**{axis: value, "s": s})
                row = {"s": s, "axis": axis, "value": value, "alpha_c": math.nan,
                       "residual": math.nan, "k_r": math.nan, "asymptotic": False, "error": ""}
                try:
                    critical = CriticalityService._alpha_c_near(point, opts, previous)
                    row.update(alpha_c=critical.alpha_c, residual=critical.criterion_residual,
                               k_r=point.k_ising - critical.alpha_c * point.omega_c / s,
                               asymptotic=critical.asymptotic)
                    previous = critical.alpha_c
                except QptError as exc:
                    logger.warning("boundary point %s=%g s=%g failed: %s", axis, value, s, exc.message)
                    row["error"] = exc.error_code
                rows.append(row)
            return rows

        curves = ordered_map(curve, list(s_values), max_workers)
        return pd.DataFrame([row for rows in curves for row in rows])

    @staticmethod
    def _alpha_c_near(params: ModelParams, opts: Optional[SolverOpts],
                      previous: Optional[float]) -> CriticalPoint:
        """find_alpha_c with a bracket narrowed around the neighbouring grid point"""
        if previous is not None and not math.isnan(previous):
            lo, hi = max(ALPHA_BRACKET[0], previous / 4.0), min(ALPHA_BRACKET[1], previous * 4.0)
            try:
                return CriticalityService.find_alpha_c(params, opts, bracket=(lo, hi))
            except NoSignChange:
                logger.debug("narrow bracket [%g, %g] missed alpha_c; widening", lo, hi)
        return CriticalityService.find_alpha_c(params, opts)

    @staticmethod
    def fit_exponent(xs: Sequence[float], ys: Sequence[float],
                     window: Optional[Tuple[float, float]] = None, name: str = "") -> ExponentFit:
        """Least-squares line through (log10 x, log10 y); the slope is the exponent"""
        xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
        if window is not None:
            keep = (xs >= window[0]) & (xs <= window[1])
            xs, ys = xs[keep], ys[keep]
        if np.any(xs <= 0) or np.any(ys <= 0):
            raise NonPositiveData(f"{name or 'fit'}: log-log fit needs positive data")
        if len(xs) < MIN_FIT_POINTS:
            raise InsufficientPoints(f"{name or 'fit'}: {len(xs)} points, need {MIN_FIT_POINTS}")

        log_x, log_y = np.log10(xs), np.log10(ys)
        line = linregress(log_x, log_y)
        span = float(log_x.max() - log_x.min())

        decade_slopes = []
        start = log_x.min()
        while start + 1.0 <= log_x.max() + 1e-9:
            chunk = (log_x >= start - 1e-9) & (log_x <= start + 1.0 + 1e-9)
            if chunk.sum() >= 3:
                decade_slopes.append(float(linregress(log_x[chunk], log_y[chunk]).slope))
            start += 1.0

        r_squared = float(line.rvalue ** 2)
        return ExponentFit(
            name=name,
            value=float(line.slope),
            slope=float(line.slope),
            intercept=float(line.intercept),
            r_squared=r_squared,
            window=(float(log_x.min()), float(log_x.max())),
            n_points=int(len(xs)),
            accepted=r_squared >= FIT_R_SQUARED and span >= FIT_MIN_DECADES - 1e-9,
            decade_slopes=decade_slopes,
        )

    @staticmethod
    def exponent_suite(params: ModelParams, opts: Optional[SolverOpts] = None,
                       names: Sequence[str] = EXPONENT_NAMES, n_points: int = EXPONENT_POINTS,
                       max_workers: Optional[int] = None) -> ExponentSuite:
        """delta, gamma, beta, beta' and zeta from log-log fits next to the boundary.

        Distances to the critical value are log-spaced over [1e-5, 1e-3]
        relative; delta uses biases over [1e-10, 1e-7] at alpha_c.
        """
        opts = opts or SolverOpts()
        base = params.replace(epsilon=0.0)
        alpha_c = CriticalityService.find_alpha_c(base, opts, xtol=1e-300, rtol=EXPONENT_RTOL).alpha_c
        distances = np.logspace(math.log10(EXPONENT_DISTANCES[0]), math.log10(EXPONENT_DISTANCES[1]), n_points)
        localized = opts.starting_from(LocalizedStart())
        fits: Dict[str, ExponentFit] = {}
        samples: Dict[str, ExponentSamples] = {}
        delta_c = k_c = math.nan

        def keep(name: str, x_label: str, xs, y_label: str, ys) -> None:
            samples[name] = ExponentSamples(x_label=x_label, y_label=y_label,
                                            x=[float(x) for x in xs], y=[float(y) for y in ys])

        def half_sigma0(point: ModelParams) -> float:
            return ObservablesService.sigma_z_avg(SolverService.solve(point, opts=localized).state)

        if "delta" in names:
            biases = np.logspace(math.log10(EXPONENT_BIASES[0]), math.log10(EXPONENT_BIASES[1]), n_points)
            sz = ordered_map(lambda bias: half_sigma0(base.replace(alpha=alpha_c, epsilon=bias)),
                             biases, max_workers)
            keep("delta", "epsilon", biases, "sz", sz)
            fit = CriticalityService.fit_exponent(biases, sz, name="delta")
            fits["delta"] = fit.model_copy(update={"value": 1.0 / fit.slope})

        if "gamma" in names:
            chi = ordered_map(
                lambda t: ObservablesService.chi_closed_form(base.replace(alpha=alpha_c * (1.0 - t)), opts=opts),
                distances, max_workers)
            keep("gamma", "alpha_distance", distances, "chi", chi)
            fit = CriticalityService.fit_exponent(distances, chi, name="gamma")
            fits["gamma"] = fit.model_copy(update={"value": -fit.slope})

        if "beta" in names:
            sz = ordered_map(lambda t: half_sigma0(base.replace(alpha=alpha_c * (1.0 + t))),
                             distances, max_workers)
            keep("beta", "alpha_distance", distances, "sz", sz)
            fits["beta"] = CriticalityService.fit_exponent(distances, sz, name="beta")

        off_critical = base.replace(alpha=AXIS_ALPHA_FACTOR * alpha_c)
        if "beta_prime" in names:
            delta_c = CriticalityService.find_critical_value(
                off_critical, "delta", opts, xtol=1e-300, rtol=EXPONENT_RTOL).value
            sz = ordered_map(lambda t: half_sigma0(off_critical.replace(delta=delta_c * (1.0 - t))),
                             distances, max_workers)
            keep("beta_prime", "delta_distance", distances, "sz", sz)
            fits["beta_prime"] = CriticalityService.fit_exponent(distances, sz, name="beta_prime")

        if "zeta" in names:
            k_c = CriticalityService.find_critical_value(
                off_critical, "k_ising", opts, xtol=1e-300, rtol=EXPONENT_RTOL).value
            scale = abs(k_c) or params.delta
            sz = ordered_map(lambda t: half_sigma0(off_critical.replace(k_ising=k_c - t * scale)),
                             distances, max_workers)
            keep("zeta", "k_distance", distances, "sz", sz)
            fits["zeta"] = CriticalityService.fit_exponent(distances, sz, name="zeta")

        for name, fit in fits.items():
            if not fit.accepted:
                logger.warning("%s fit not accepted: r^2=%.6f over %.2f decades", name, fit.r_squared,
                               fit.window[1] - fit.window[0])
        return ExponentSuite(s=params.s, delta=params.delta, k_ising=params.k_ising, alpha_c=alpha_c,
                             delta_c=delta_c, k_c=k_c, fits=fits, samples=samples)


    @staticmethod
    def samples_table(suites: Iterable[ExponentSuite]) -> pd.DataFrame:
        """Long table of the log-log points behind every fit"""
        rows = [
            {"s": suite.s, "exponent": name, "x_label": sample.x_label, "x": x,
             "y_label": sample.y_label, "y": y}
            for suite in suites for name, sample in suite.samples.items()
            for x, y in zip(sample.x, sample.y)
        ]
        return pd.DataFrame(rows, columns=["s", "exponent", "x_label", "x", "y_label", "y"])
