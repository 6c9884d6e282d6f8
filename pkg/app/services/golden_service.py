"""
Built-in acceptance runs recorded to and diffed against golden files
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import pandas as pd

from app.core.config import settings
from app.models import DiscreteBath, ModelParams
from app.schemas.options import TruncationSpec
from app.services.criticality_service import CriticalityService
from app.services.export_service import ExportService
from app.services.observables_service import ObservablesService
from app.services.oracle_service import OracleService
from app.services.scan_service import ScanService
from app.services.solver_service import SolverService

logger = logging.getLogger(__name__)

GOLDEN_RTOL = 1e-9
TABLE_EXPONENTS_S = (0.25, 0.5, 0.75, 0.9, 1.0)


def _decoupled() -> Dict[str, Any]:
    params = ModelParams(delta=0.1, epsilon=1e-5)
    return ObservablesService.report(SolverService.solve(params), params).flat()


def _alpha_c_ohmic() -> Dict[str, Any]:
    point = CriticalityService.find_alpha_c(ModelParams(delta=0.1, s=1.0))
    return {"alpha_c": point.alpha_c, "bracket": list(point.bracket)}


def _alpha_c_small_delta() -> Dict[str, Any]:
    return {str(s): CriticalityService.find_alpha_c(ModelParams(delta=1e-3, s=s)).alpha_c for s in (1.0, 0.5)}


def _entropy_curve() -> Dict[str, Any]:
    table, _ = ScanService.curve(ModelParams(delta=0.1, epsilon=1e-6, s=1.0))
    return {"alpha": table["alpha"].tolist(), "entropy": table["entropy"].tolist()}


def _exponents() -> Dict[str, Any]:
    return {str(s): CriticalityService.exponent_suite(ModelParams(delta=0.1, s=s)).values()
            for s in TABLE_EXPONENTS_S}


def _oracle_single_mode() -> Dict[str, Any]:
    bath = DiscreteBath(modes=((0.05, 0.5),))
    exact = OracleService.exact_ground(ModelParams(delta=0.1, epsilon=1e-5), bath,
                                       TruncationSpec(n_modes=1, n_max=6))
    return {"energy": exact.energy, "sz": exact.sz, "sx": exact.sx}


CASES: Dict[str, Callable[[], Dict[str, Any]]] = {
    "decoupled": _decoupled,
    "alpha_c_ohmic": _alpha_c_ohmic,
    "alpha_c_small_delta": _alpha_c_small_delta,
    "entropy_ohmic": _entropy_curve,
    "oracle_single_mode": _oracle_single_mode,
    "exponents": _exponents,
}


def _leaves(value: Any, path: str = "") -> Iterator[Tuple[str, Any]]:
    if isinstance(value, dict):
        for key in sorted(value):
            yield from _leaves(value[key], f"{path}/{key}")
    elif isinstance(value, list):
        for index, item in enumerate(value):
            yield from _leaves(item, f"{path}[{index}]")
    else:
        yield path, value


def compare(expected: Any, actual: Any, rtol: float = GOLDEN_RTOL) -> Tuple[bool, float, List[str]]:
    """Leaf-by-leaf comparison; numbers within rtol, everything else equal"""
    left, right = dict(_leaves(expected)), dict(_leaves(actual))
    problems = [f"{path}: missing" for path in left.keys() ^ right.keys()]
    worst = 0.0
    for path in sorted(left.keys() & right.keys()):
        a, b = left[path], right[path]
        numeric = isinstance(a, (int, float)) and isinstance(b, (int, float)) and not isinstance(a, bool)
        if numeric:
            scale = max(abs(a), abs(b))
            diff = 0.0 if scale == 0 else abs(a - b) / scale
            worst = max(worst, diff)
            if not diff <= rtol:
                problems.append(f"{path}: {a!r} != {b!r}")
        elif a != b:
            problems.append(f"{path}: {a!r} != {b!r}")
    return not problems, worst, problems


class GoldenService:
    """Service for the golden-file acceptance suite"""

    @staticmethod
    def run(directory: Optional[str] = None, names: Optional[Sequence[str]] = None,
            record: bool = False) -> pd.DataFrame:
        """Run cases and diff them against the golden files.

        A missing file is reported as `missing` unless `record` is set, in
        which case it is written and reported as `recorded`.
        """
        folder = Path(directory or settings.GOLDEN_DIR)
        if record:
            folder.mkdir(parents=True, exist_ok=True)
        rows = []
        for name in names or list(CASES):
            path = folder / f"{name}.json"
            if not path.exists() and not record:
                logger.error("golden file %s is missing", path)
                rows.append({"case": name, "status": "missing", "max_rel_diff": math.nan, "problems": str(path)})
                continue
            result = json.loads(ExportService.to_json(CASES[name]()))
            if not path.exists():
                path.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
                logger.info("recorded golden file %s", path)
                rows.append({"case": name, "status": "recorded", "max_rel_diff": 0.0, "problems": ""})
                continue
            ok, worst, problems = compare(json.loads(path.read_text()), result)
            if not ok:
                logger.warning("golden case %s differs: %s", name, "; ".join(problems[:5]))
            rows.append({"case": name, "status": "match" if ok else "mismatch",
                         "max_rel_diff": worst if math.isfinite(worst) else math.nan,
                         "problems": "; ".join(problems)})
        return pd.DataFrame(rows, columns=["case", "status", "max_rel_diff", "problems"])
