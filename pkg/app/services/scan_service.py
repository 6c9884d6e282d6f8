"""
Coupling scans: observables along alpha, one curve per K, s or delta value
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.errors import QptError
from app.core.executor import ordered_map
from app.models import ModelParams
from app.schemas.options import Decoupled, SolverOpts, WarmStart
from app.schemas.run_config import GridSpec
from app.services.criticality_service import CriticalityService
from app.services.observables_service import ObservablesService
from app.services.solver_service import SolverService

logger = logging.getLogger(__name__)

CLAMP_NOTE = "clamped: validity window"
DEFAULT_COUNT = 45

SCAN_COLUMNS = [
    "alpha", "reduced_distance", "k_r", "e_g", "e_g_pinned", "energy_gain", "sx", "sz",
    "sigma0", "eps_prime", "entropy", "entropy_normalized", "c12", "branch", "validity", "error",
]


class ScanService:
    """Service for alpha sweeps at fixed (delta, epsilon, K, s)"""

    @staticmethod
    def clamp(alphas: Sequence[float], alpha_c: Optional[float]) -> Tuple[List[float], List[str]]:
        """Drop couplings above the validity window"""
        alphas = [float(alpha) for alpha in alphas]
        if alpha_c is None:
            return alphas, []
        limit = settings.VALIDITY_ALPHA_FACTOR * alpha_c
        kept = [alpha for alpha in alphas if alpha <= limit]
        if len(kept) < len(alphas):
            logger.info("scan clamped at alpha=%g (%d points dropped)", limit, len(alphas) - len(kept))
            return kept, [CLAMP_NOTE]
        return kept, []

    @staticmethod
    def alpha_scan(params: ModelParams, alphas: Sequence[float], opts: Optional[SolverOpts] = None,
                   alpha_c: Optional[float] = None, with_pinned: bool = False) -> Tuple[pd.DataFrame, List[str]]:
        """Warm-started solves along alpha; returns the table and any clamp notes"""
        opts = opts or SolverOpts()
        alphas, notes = ScanService.clamp(alphas, alpha_c)
        rows: List[Dict[str, object]] = []
        current = opts

        for alpha in alphas:
            point = params.replace(alpha=alpha)
            row: Dict[str, object] = {column: math.nan for column in SCAN_COLUMNS}
            row.update(alpha=alpha, branch="", validity=False, error="",
                       k_r=point.k_ising - alpha * point.omega_c / point.s)
            if alpha_c:
                row["reduced_distance"] = (alpha - alpha_c) / alpha_c
            try:
                solved = SolverService.solve(point, opts=current, alpha_c=alpha_c)
                pinned = SolverService.solve(point, opts=opts, pin_sigma0=True) if with_pinned else None
                report = ObservablesService.report(solved, point, pinned=pinned)
                row.update({key: value for key, value in report.flat().items() if key in row})
                current = opts.starting_from(WarmStart(state=solved.state))
            except QptError as exc:
                logger.warning("scan point alpha=%g failed: %s", alpha, exc.message)
                row["error"] = exc.error_code
                current = opts.starting_from(Decoupled())
            rows.append(row)

        table = pd.DataFrame(rows, columns=SCAN_COLUMNS)
        peak = table["entropy"].max()
        if peak and not math.isnan(peak):
            table["entropy_normalized"] = table["entropy"] / peak
        return table, notes

    @staticmethod
    def curve(params: ModelParams, grid: Optional[GridSpec] = None, opts: Optional[SolverOpts] = None,
              with_pinned: bool = False) -> Tuple[pd.DataFrame, List[str]]:
        """alpha scan with its own alpha_c; the default grid runs from 0 to the validity limit"""
        opts = opts or SolverOpts()
        try:
            alpha_c: Optional[float] = CriticalityService.find_alpha_c(params, opts).alpha_c
        except QptError as exc:
            logger.warning("no alpha_c for %s: %s", params, exc.message)
            alpha_c = None
        if grid is not None:
            alphas = grid.values()
        elif alpha_c is not None:
            alphas = list(np.linspace(0.0, settings.VALIDITY_ALPHA_FACTOR * alpha_c, DEFAULT_COUNT))
        else:
            alphas = list(np.linspace(0.0, 1.0, DEFAULT_COUNT))
        table, notes = ScanService.alpha_scan(params, alphas, opts, alpha_c, with_pinned)
        table.insert(1, "alpha_c", alpha_c if alpha_c is not None else math.nan)
        return table, notes

    @staticmethod
    def curves(params: ModelParams, over: str, values: Sequence[float], grid: Optional[GridSpec] = None,
               opts: Optional[SolverOpts] = None, with_pinned: bool = False,
               max_workers: Optional[int] = None) -> Tuple[pd.DataFrame, List[str]]:
        """One alpha curve per value of `over` (k_ising, s or delta), concatenated in input order"""
        if not values:
            values = [getattr(params, over)]
        results = ordered_map(
            lambda value: ScanService.curve(params.replace(**{over: float(value)}), grid, opts, with_pinned),
            values, max_workers)
        tables = []
        notes: List[str] = []
        for value, (table, curve_notes) in zip(values, results):
            table.insert(0, over, float(value))
            tables.append(table)
            notes.extend(note for note in curve_notes if note not in notes)
        return pd.concat(tables, ignore_index=True), notes
