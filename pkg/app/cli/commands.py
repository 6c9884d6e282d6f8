"""
Subcommand handlers; each returns the rendered output text
"""

import logging
from typing import Any, Callable, Dict, List, Optional

import pandas as pd

from app.core.errors import NotInDelocalizedPhase, QptError
from app.models import ContinuumBath, ModelParams
from app.schemas.options import SolverOpts, TruncationSpec
from app.schemas.reports import SolveReport
from app.schemas.run_config import GridSpec, RunConfig
from app.services.criticality_service import CriticalityService
from app.services.export_service import ExportService
from app.services.model_service import ModelService
from app.services.observables_service import ObservablesService
from app.services.oracle_service import OracleService
from app.services.scan_service import ScanService
from app.services.solver_service import SolverService
from app.services.spectral_service import SpectralService

logger = logging.getLogger(__name__)

DEFAULT_PHASE_GRIDS = {
    "delta": GridSpec(start=1e-3, stop=0.5, count=21, scale="log"),
    "k_ising": GridSpec(start=-0.125, stop=0.125, count=21),
}
ORACLE_DISCRETIZATION_BASE = 2.0

ENTROPY_COLUMNS = ["alpha", "alpha_c", "reduced_distance", "k_r", "entropy", "entropy_normalized",
                   "branch", "validity", "error"]
CORR_COLUMNS = ["alpha", "alpha_c", "reduced_distance", "k_r", "c12", "sz", "branch", "validity", "error"]


def _curve_axis(config: RunConfig):
    if config.k_values:
        return "k_ising", config.k_values
    if config.s_values:
        return "s", config.s_values
    if config.delta_values:
        return "delta", config.delta_values
    return "k_ising", [config.k_ising]


def _alpha_c_for_validity(params: ModelParams, opts: SolverOpts) -> Optional[float]:
    try:
        return CriticalityService.find_alpha_c(params, opts).alpha_c
    except QptError as exc:
        logger.info("validity window without alpha_c: %s", exc.message)
        return None


def _solve_row(solved: SolveReport, params: ModelParams, opts: SolverOpts, config: RunConfig,
               chi: Optional[float]) -> Dict[str, Any]:
    pinned = SolverService.solve(params, opts=opts, pin_sigma0=True) if config.pinned else None
    report = ObservablesService.report(solved, params, chi=chi, pinned=pinned).flat()
    report.update(iterations=solved.iterations, residual=solved.residual,
                  validity_notes=list(solved.validity_notes), sigma0_detached=solved.sigma0_detached)
    return report


def cmd_solve(config: RunConfig) -> str:
    """Single-point report, or an alpha scan when a grid is given"""
    params = ModelService.validate(config.params())
    opts = config.solver_opts()
    if config.grid is not None:
        table, notes = ScanService.curve(params, config.grid, opts, with_pinned=True)
        return ExportService.render(table, config.format, notes)

    alpha_c = _alpha_c_for_validity(params, opts)
    chi = None
    if config.chi:
        try:
            chi = ObservablesService.susceptibility(params, opts=opts)
        except NotInDelocalizedPhase as exc:
            logger.warning("susceptibility skipped: %s", exc.message)
    if config.branches:
        reports = SolverService.solve_branches(params, opts=opts, alpha_c=alpha_c)
        return ExportService.to_json([_solve_row(solved, params, opts, config, chi) for solved in reports])

    solved = SolverService.solve(params, opts=opts, alpha_c=alpha_c)
    return ExportService.to_json(_solve_row(solved, params, opts, config, chi))


def cmd_phase(config: RunConfig) -> str:
    """Phase boundary alpha_c along delta or K, one curve per s"""
    params = ModelService.validate(config.params())
    grid = config.grid or DEFAULT_PHASE_GRIDS[config.axis]
    table = CriticalityService.scan_boundary(config.axis, grid.values(), params,
                                             config.s_values or [params.s], config.solver_opts(),
                                             max_workers=config.threads)
    return ExportService.render(table, config.format)


def _curves(config: RunConfig, columns: List[str]) -> str:
    params = ModelService.validate(config.params())
    over, values = _curve_axis(config)
    for value in values:
        ModelService.validate(params.replace(**{over: value}))
    table, notes = ScanService.curves(params, over, values, config.grid, config.solver_opts(),
                                      max_workers=config.threads)
    return ExportService.render(table[[over] + columns], config.format, notes)


def cmd_entropy(config: RunConfig) -> str:
    return _curves(config, ENTROPY_COLUMNS)


def cmd_corr(config: RunConfig) -> str:
    return _curves(config, CORR_COLUMNS)


def cmd_exponents(config: RunConfig) -> str:
    """The five exponents for every requested s"""
    params = ModelService.validate(config.params())
    suites = [CriticalityService.exponent_suite(params.replace(s=s), config.solver_opts(),
                                                max_workers=config.threads)
              for s in (config.s_values or [params.s])]
    if config.data:
        return ExportService.render(CriticalityService.samples_table(suites), config.format)
    if config.format == "json":
        return ExportService.to_json({str(suite.s): suite.model_dump() for suite in suites})
    rows = [
        {"s": suite.s, "alpha_c": suite.alpha_c, "exponent": name, "value": fit.value,
         "r_squared": fit.r_squared, "n_points": fit.n_points, "accepted": fit.accepted}
        for suite in suites for name, fit in suite.fits.items()
    ]
    return ExportService.table_to_csv(pd.DataFrame(rows))


def cmd_oracle(config: RunConfig) -> str:
    """Ansatz energy on a log-discretized bath against exact diagonalization"""
    params = ModelService.validate(config.params())
    bath = SpectralService.log_discretize(
        ContinuumBath(alpha=params.alpha, s=params.s, omega_c=params.omega_c), config.n_modes,
        base=ORACLE_DISCRETIZATION_BASE)
    if config.sweep:
        sweep = OracleService.truncation_sweep(params, bath, config.sweep)
        notes = [f"estimate: {sweep.estimate!r}", f"converged: {sweep.converged}"]
        return ExportService.render(OracleService.sweep_table(sweep), config.format, notes)

    exact = OracleService.exact_ground(
        params, bath, TruncationSpec(n_modes=config.n_modes, n_max=config.n_max, total_cap=config.total_cap))
    solved = SolverService.solve(params, bath, config.solver_opts())
    e_ansatz = ObservablesService.ground_energy(solved.state, params)
    row = {
        "alpha": params.alpha, "s": params.s, "n_modes": config.n_modes, "n_max": config.n_max,
        "dimension": exact.dimension, "e_exact": exact.energy, "e_ansatz": e_ansatz,
        "relative_gap": (e_ansatz - exact.energy) / abs(exact.energy),
        "upper_bound": e_ansatz >= exact.energy - 1e-12,
        "sz_exact": exact.sz, "sz_ansatz": ObservablesService.sigma_z_avg(solved.state),
        "sx_exact": exact.sx, "sx_ansatz": ObservablesService.sigma_x_avg(solved.state, params),
    }
    return ExportService.render(pd.DataFrame([row]), config.format)


COMMANDS: Dict[str, Callable[[RunConfig], str]] = {
    "solve": cmd_solve,
    "phase": cmd_phase,
    "entropy": cmd_entropy,
    "corr": cmd_corr,
    "exponents": cmd_exponents,
    "oracle": cmd_oracle,
}
