"""
Tests for alpha scans
"""

import math

import numpy as np
import pytest

from app.core.executor import ordered_map
from app.models import ModelParams
from app.schemas.options import SolverOpts
from app.schemas.run_config import GridSpec
from app.services.scan_service import CLAMP_NOTE, SCAN_COLUMNS, ScanService

@pytest.fixture
def ohmic():
    return ModelParams(delta=0.1, epsilon=1e-5, k_ising=0.0, alpha=0.0, s=1.0)

def test_clamp_drops_points_above_window():
    """Couplings above 1.1 alpha_c are removed with a note"""
    kept, notes = ScanService.clamp([0.0, 0.1, 0.14, 0.2], 0.1338)

    assert kept == [0.0, 0.1, 0.14]
    assert notes == [CLAMP_NOTE]

def test_clamp_without_alpha_c():
    """Nothing is clamped when alpha_c is unknown"""
    kept, notes = ScanService.clamp([0.0, 5.0], None)
    assert kept == [0.0, 5.0]
    assert notes == []

def test_ordered_map_keeps_input_order():
    """Threaded maps return results in input order"""
    assert ordered_map(lambda x: x * x, range(20), max_workers=4) == [x * x for x in range(20)]

def test_alpha_scan_columns(ohmic):
    """Every row carries the full column set"""
    table, notes = ScanService.alpha_scan(ohmic, [0.0, 0.05, 0.1], alpha_c=0.1338, with_pinned=True)

    assert list(table.columns) == SCAN_COLUMNS
    assert notes == []
    assert (table["error"] == "").all()
    assert (table["branch"] == "Delocalized").all()
    assert table["e_g"].iloc[0] == pytest.approx(-0.1, abs=1e-9)
    assert table["reduced_distance"].iloc[0] == pytest.approx(-1.0)
    assert np.allclose(table["k_r"], -table["alpha"])
    assert table["entropy_normalized"].max() == pytest.approx(1.0)
    assert (table["energy_gain"] >= -1e-15).all()

def test_failed_point_is_recorded(ohmic):
    """A point that fails lands in the error column and the scan goes on"""
    table, _ = ScanService.alpha_scan(ohmic, [0.0, 0.1, 0.0], SolverOpts(max_iter=1))

    assert table["error"].tolist() == ["", "NOT_CONVERGED", ""]
    assert math.isnan(table["e_g"].iloc[1])
    assert table["e_g"].iloc[2] == pytest.approx(-0.1, abs=1e-9)

def test_curve_on_explicit_grid(ohmic):
    """Explicit grids are used as given and alpha_c is attached"""
    table, notes = ScanService.curve(ohmic, GridSpec(start=0.0, stop=0.12, count=4))

    assert table.columns[1] == "alpha_c"
    assert table["alpha_c"].iloc[0] == pytest.approx(0.1338, abs=2e-3)
    assert table["alpha"].tolist() == pytest.approx([0.0, 0.04, 0.08, 0.12])
    assert notes == []

@pytest.mark.slow
def test_curves_follow_value_order(ohmic):
    """One curve per s, concatenated in input order"""
    grid = GridSpec(start=0.0, stop=0.02, count=3)
    table, _ = ScanService.curves(ohmic, "s", [1.0, 0.5], grid, max_workers=2)

    assert table["s"].tolist() == [1.0] * 3 + [0.5] * 3
    assert table.columns[0] == "s"
