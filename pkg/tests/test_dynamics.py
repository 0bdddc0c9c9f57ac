"""
Tests for the integrators, the drift functional, drift scaling and stability times
"""
import math

import numpy as np
import pytest

from bracket.symplectic import SymplecticForm
from dynamics.integrators import IntegratorConfig, VectorField, integrate, reference_flow, step_plan
from dynamics.stability import (
    CONSERVED,
    SURVIVED,
    DriftEvaluator,
    check_ladder,
    default_dt,
    default_shape,
    drift_functional,
    drift_scaling,
    stability_sweep,
    stability_time,
)
from frontend.hamiltonian import Hamiltonian, build_type1
from helper.exceptions import DegenerateLadderError, LatticeMismatchError
from polynomial.lattice import LatticeConfig, State, sobolev_norm_sq
from polynomial.multi_index import MultiIndexPair
from polynomial.polynomial import Polynomial
from polynomial.sampling import random_state
from spectrum.potential import FrequencyVector, sample_potential
from tests.conftest import cubic_spec, quartic_spec


def _linear(theta: int) -> Hamiltonian:
    lattice = LatticeConfig(theta=theta, J=3)
    omega = FrequencyVector.from_mapping(theta, {j: -j * j + 0.1 * j for j in lattice.modes})
    return Hamiltonian(theta, lattice, omega, Polynomial.zero(lattice))


def _resonant_pair() -> Hamiltonian:
    """omega_{+-1} = -1, omega_{+-2} = -2 and P = u1^2 ubar2 + ubar1^2 u2, exactly resonant"""
    lattice = LatticeConfig(theta=0, J=2)
    omega = FrequencyVector.from_mapping(0, {-2: -2.0, -1: -1.0, 1: -1.0, 2: -2.0})
    mi = MultiIndexPair.from_modes([1, 1], [2])
    P = Polynomial.from_scalars(lattice, {mi: 1.0, mi.swapped(): 1.0})
    return Hamiltonian(0, lattice, omega, P)


@pytest.mark.parametrize("theta", [0, 1])
def test_linear_flow_is_exact(theta, rng):
    H = _linear(theta)
    u0 = random_state(H.lattice, 1.0, 0.0, rng)
    trajectory = integrate(H, u0, IntegratorConfig(dt=1e-2), T=10.0)
    rates = SymplecticForm.of(H.lattice).weights(H.lattice) * H.omega.array(H.lattice)
    expected = np.exp(-1j * rates * 10.0) * u0.u
    assert np.max(np.abs(trajectory.final.u - expected)) <= 1e-8
    assert trajectory.times[-1] == 10.0
    assert np.ptp(trajectory.norm_p) <= 1e-12


def test_zero_state_stays_zero(type2_hamiltonian):
    H = type2_hamiltonian
    trajectory = integrate(H, State.zeros(H.lattice), IntegratorConfig(dt=1e-2), T=1.0)
    assert np.all(trajectory.states == 0)


def test_midpoint_scheme_is_second_order(type2_hamiltonian, rng):
    H = type2_hamiltonian
    u0 = random_state(H.lattice, 0.1, 0.0, rng)
    field = VectorField(H.lattice, SymplecticForm.of(H.lattice), H.P, H.omega.array(H.lattice))
    reference = reference_flow(field, u0.u, 1.0)
    errors = []
    for dt in (1e-2, 5e-3):
        final = integrate(H, u0, IntegratorConfig(dt=dt), T=1.0).final.u
        errors.append(np.max(np.abs(final - reference)))
    assert 3.3 <= errors[0] / errors[1] <= 4.7


def test_rk4_reference_agrees_with_dop853(type2_hamiltonian, rng):
    H = type2_hamiltonian
    u0 = random_state(H.lattice, 0.1, 0.0, rng)
    rk4 = integrate(H, u0, IntegratorConfig(scheme="rk4_reference", dt=1e-3), T=0.5).final.u
    dop = integrate(H, u0, IntegratorConfig(scheme="dop853", dt=1e-2), T=0.5).final.u
    assert np.max(np.abs(rk4 - dop)) <= 1e-9


def test_momentum_is_conserved_for_x_independent_nonlinearity(rng):
    H = build_type1(cubic_spec(), sample_potential(0, 1.0, 3, seed=8), 3)
    u0 = random_state(H.lattice, 0.1, 0.0, rng)
    trajectory = integrate(H, u0, IntegratorConfig(dt=1e-2), T=1.0)
    assert np.max(np.abs(trajectory.momentum - trajectory.momentum[0])) <= 1e-12
    assert np.max(np.abs(trajectory.energy - trajectory.energy[0])) <= 1e-4 * abs(trajectory.energy[0])


def test_sampling_keeps_endpoints(type2_hamiltonian):
    H = type2_hamiltonian
    u0 = State.from_modes(H.lattice, {1: 0.01})
    trajectory = integrate(H, u0, IntegratorConfig(dt=0.1, sample_every=3), T=1.0)
    assert step_plan(1.0, 0.1)[0] == 10
    assert trajectory.times.tolist() == pytest.approx([0.0, 0.3, 0.6, 0.9, 1.0])
    rows = list(trajectory.rows(record_modes=True))
    assert len(rows[0]) == len(trajectory.columns(record_modes=True)) == 4 + H.lattice.size


def test_integrate_argument_checks(type2_hamiltonian, lattice0):
    H = type2_hamiltonian
    with pytest.raises(ValueError):
        integrate(H, State.zeros(H.lattice), IntegratorConfig(), T=0.0)
    with pytest.raises(LatticeMismatchError):
        integrate(H, State.zeros(lattice0), IntegratorConfig(), T=1.0)


def test_drift_of_h0_vanishes(type1_hamiltonian, rng):
    H = type1_hamiltonian
    s = random_state(H.lattice, 0.5, 1.0, rng)
    assert drift_functional({"H0": H.H0}, s, 1.0) == 0.0
    assert DriftEvaluator([H.H0], 2.0).conserved
    assert drift_functional({"H0": H.H0, "P": H.P}, s, 1.0) == pytest.approx(drift_functional([H.P], s, 1.0))


@pytest.mark.parametrize("fixture", ["type1_hamiltonian", "type2_hamiltonian"])
def test_drift_is_the_time_derivative_of_the_norm(fixture, request, rng):
    H = request.getfixturevalue(fixture)
    p = 1.0
    s = random_state(H.lattice, 0.5, p, rng)
    field = VectorField(H.lattice, SymplecticForm.of(H.lattice), H.P, H.omega.array(H.lattice))
    delta = 1e-4
    ahead = sobolev_norm_sq(State(H.lattice, reference_flow(field, s.u, delta)), p)
    behind = sobolev_norm_sq(State(H.lattice, reference_flow(field, s.u, -delta)), p)
    numeric = (ahead - behind) / (2 * delta)
    assert drift_functional([H.H0, H.P], s, p) == pytest.approx(numeric, rel=1e-5, abs=1e-10)


def test_drift_scaling_recovers_homogeneous_degree():
    H = build_type1(quartic_spec(), sample_potential(0, 1.0, 3, seed=1), 3)
    report = drift_scaling([H.H0, H.P], 1.0, [0.01, 0.02, 0.04, 0.08], samples=50, seed=3, threads=2)
    assert report.status == "fitted"
    assert report.slope == pytest.approx(4.0, abs=1e-9)
    assert [row[0] for row in report.rows()] == [0.01, 0.02, 0.04, 0.08]


def test_drift_scaling_of_h0_is_conserved(type1_hamiltonian):
    report = drift_scaling({"H0": type1_hamiltonian.H0}, 1.0, [0.1, 0.2, 0.4, 0.8])
    assert report.status == CONSERVED
    assert report.slope is None


@pytest.mark.parametrize("ladder", [[0.1, 0.2, 0.4], [1.0, 2.0, 3.0, 4.0], [1.0, 1.0, 1.0, 1.0], [-1.0, -2.0, -4.0, -8.0]])
def test_degenerate_ladders(ladder):
    with pytest.raises(DegenerateLadderError):
        check_ladder(ladder)


def test_drift_scaling_needs_enough_samples(type1_hamiltonian):
    with pytest.raises(ValueError):
        drift_scaling([type1_hamiltonian.P], 1.0, [0.1, 0.2, 0.4, 0.8], samples=49)


def test_default_dt_and_shape(lattice0):
    assert default_dt(np.array([-1.0, 9.0])) == pytest.approx(1e-3 * 2 * math.pi / 9.0)
    assert default_dt(np.zeros(3)) == 1e-3
    shape = default_shape(lattice0, 1.0, seed=4)
    assert np.array_equal(shape.u, default_shape(lattice0, 1.0, seed=4).u)
    assert abs(shape[3]) == pytest.approx(3.0 ** -2)


def test_linear_dynamics_survive():
    H = _linear(0)
    assert stability_time(H, 0.1, 2.0, IntegratorConfig(dt=1e-2), T_max=2.0) == SURVIVED
    results = stability_sweep(H, [0.1, 0.2], 2.0, IntegratorConfig(dt=1e-2), T_max=1.0, threads=2)
    assert results == [(0.1, SURVIVED), (0.2, SURVIVED)]


def test_resonant_exchange_escapes():
    H = _resonant_pair()
    shape = State.from_modes(H.lattice, {1: 1.0})
    cfg = IntegratorConfig(dt=1e-2)
    early = stability_time(H, 0.1, 2.0, cfg, T_max=20.0, shape=shape)
    late = stability_time(H, 0.05, 2.0, cfg, T_max=20.0, shape=shape)
    # ||u||_2^2 = eps^2 + 14 b^2 with b = (eps / sqrt 2) tanh(sqrt 2 eps t)
    predicted = math.atanh(math.sqrt(3.0 / 7.0)) / (math.sqrt(2.0) * 0.1)
    assert early == pytest.approx(predicted, abs=0.05)
    assert late == pytest.approx(2 * predicted, abs=0.1)
    assert stability_time(H, 0.1, 1.0, cfg, T_max=20.0, shape=shape) == SURVIVED


def test_stability_time_argument_checks(lattice0):
    H = _resonant_pair()
    with pytest.raises(ValueError):
        stability_time(H, 0.0, 2.0, IntegratorConfig(), T_max=1.0)
    with pytest.raises(LatticeMismatchError):
        stability_time(H, 0.1, 2.0, IntegratorConfig(), T_max=1.0, shape=State.zeros(lattice0))
