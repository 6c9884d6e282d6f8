"""
Tests for the exact-diagonalization reference
"""

import math

import numpy as np
import pytest

from app.core.errors import DimensionTooLarge, ValidationFailed
from app.models import ContinuumBath, DiscreteBath, ModelParams
from app.schemas.options import TruncationSpec
from app.services.observables_service import ObservablesService
from app.services.oracle_service import OracleService
from app.services.solver_service import SolverService
from app.services.spectral_service import SpectralService

@pytest.fixture
def params():
    return ModelParams(delta=0.1, epsilon=1e-5, k_ising=0.0, alpha=0.0, s=1.0)

@pytest.fixture
def single_mode():
    return DiscreteBath(modes=((0.05, 0.5),))

def _ansatz_energy(params, bath):
    state = SolverService.solve(params, bath).state
    return ObservablesService.ground_energy(state, params)

def test_uncoupled_qubits(params):
    """g = 0 leaves two free qubits at -delta"""
    bath = DiscreteBath(modes=((0.0, 0.5), (0.0, 0.2)))
    exact = OracleService.exact_ground(params.replace(epsilon=0.0), bath, n_max=3)

    assert exact.energy == pytest.approx(-0.1, abs=1e-12)
    assert exact.dimension == 4 * 4 ** 2
    assert exact.sx == pytest.approx(1.0, abs=1e-10)

def test_ising_pair_without_bath(params):
    """g = 0 with K = 0.3: ground energy -sqrt(K^2 + delta^2)"""
    ising = params.replace(epsilon=0.0, k_ising=0.3)
    exact = OracleService.exact_ground(ising, DiscreteBath(modes=((0.0, 0.5),)), n_max=2)

    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sz = np.diag([1.0, -1.0])
    eye = np.eye(2)
    hamiltonian = (-0.05 * (np.kron(sx, eye) + np.kron(eye, sx)) + 0.3 * np.kron(sz, sz))

    assert exact.energy == pytest.approx(-math.hypot(0.3, 0.1), abs=1e-12)
    assert exact.energy == pytest.approx(np.linalg.eigvalsh(hamiltonian)[0], abs=1e-12)

def test_single_mode_variational_bound(params, single_mode):
    """The ansatz energy lies at most 1e-3 above the exact ground energy"""
    exact = OracleService.exact_ground(params, single_mode, n_max=6)
    ansatz = _ansatz_energy(params, single_mode)

    assert exact.energy <= ansatz <= exact.energy + 1e-3

def test_zero_bias_has_no_magnetization(params, single_mode):
    """The spin-flip symmetry at eps = 0 keeps <sigma^z> at zero"""
    exact = OracleService.exact_ground(params.replace(epsilon=0.0), single_mode, n_max=6)
    assert exact.sz == pytest.approx(0.0, abs=1e-8)

def test_residual_is_small(params, single_mode):
    """The Lanczos eigenpair satisfies H psi = E psi"""
    exact = OracleService.exact_ground(params, single_mode, n_max=6)
    assert exact.residual <= 1e-10

def test_dimension_limit(params):
    """Eight modes at n_max = 8 exceed the dimension limit"""
    bath = SpectralService.log_discretize(ContinuumBath(alpha=0.01, s=1.0), 8, base=2.0)
    with pytest.raises(DimensionTooLarge):
        OracleService.exact_ground(params, bath, n_max=8)

def test_truncation_must_match_bath(params, single_mode):
    """The truncation mode count has to match the bath"""
    with pytest.raises(ValidationFailed):
        OracleService.exact_ground(params, single_mode, TruncationSpec(n_modes=2, n_max=3))

def test_sweep_without_coupling(params):
    """Energies do not depend on n_max when g = 0"""
    sweep = OracleService.truncation_sweep(params.replace(epsilon=0.0), DiscreteBath(modes=((0.0, 0.5),)),
                                           [2, 4, 6])

    assert sweep.converged
    assert sweep.estimate == pytest.approx(-0.1, abs=1e-12)
    assert sweep.energies == pytest.approx([-0.1] * 3, abs=1e-12)

def test_sweep_is_monotone(params, single_mode):
    """Larger boson cutoffs only lower the ground energy"""
    sweep = OracleService.truncation_sweep(params, single_mode, [6, 2, 4, 8])
    table = OracleService.sweep_table(sweep)

    assert sweep.n_max == [2, 4, 6, 8]
    assert np.all(np.diff(sweep.energies) <= 1e-13)
    assert sweep.converged
    assert list(table.columns) == ["n_max", "energy", "change"]

def test_total_cap_above_largest_occupation(params):
    """A cap no state reaches changes nothing; a tight cap raises the energy"""
    bath = DiscreteBath(modes=((0.05, 0.5), (0.04, 0.25)))
    full = OracleService.exact_ground(params, bath, n_max=3)
    loose = OracleService.exact_ground(params, bath, TruncationSpec(n_modes=2, n_max=3, total_cap=6))
    tight = OracleService.exact_ground(params, bath, TruncationSpec(n_modes=2, n_max=3, total_cap=1))

    assert loose.energy == pytest.approx(full.energy, abs=1e-12)
    assert tight.energy >= full.energy - 1e-13

@pytest.mark.slow
@pytest.mark.parametrize("n_modes, alpha, s, n_max", [
    (4, 0.01, 1.0, 6),
    (5, 0.01, 0.5, 6),
    (6, 0.01, 1.0, 5),
    (4, 0.05, 0.5, 6),
    (5, 0.05, 1.0, 6),
])
def test_ansatz_bounded_by_exact_ground(params, n_modes, alpha, s, n_max):
    """Log-discretized baths: the ansatz is a variational upper bound"""
    point = params.replace(alpha=alpha, s=s)
    bath = SpectralService.log_discretize(point.continuum_bath(), n_modes, base=2.0)
    exact = OracleService.exact_ground(point, bath, n_max=n_max)
    ansatz = _ansatz_energy(point, bath)

    assert ansatz >= exact.energy - 1e-12
    if alpha == 0.01:
        assert abs(ansatz - exact.energy) <= 1e-3 * abs(exact.energy)
