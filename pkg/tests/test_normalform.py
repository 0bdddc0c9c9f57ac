"""
Tests for small divisors, the homological equation, the Birkhoff iteration, the coordinate change and the result codec
"""
import numpy as np
import pytest
from pydantic import ValidationError

from bracket.poisson import poisson
from bracket.symplectic import quadratic_hamiltonian
from frontend.hamiltonian import build_type1, build_type2
from helper.exceptions import TransformDomainError
from normalform.birkhoff import NormalFormParams, birkhoff_iterate, certify
from normalform.homological import divisor_check, homological_residual, solve_homological
from normalform.resonance import (
    M_lk,
    ResonanceParams,
    class_counts,
    classify_term,
    is_resonant_term,
    nf_projector,
    resonance_threshold,
    small_divisor,
)
from normalform.result_store import read_result, write_result
from normalform.transform import near_identity_ratio, transform_state
from polynomial.lattice import LatticeConfig, State, project_head, sobolev_norm
from polynomial.multi_index import MultiIndexPair, momentum
from polynomial.polynomial import Polynomial, conj_symmetry_check, gamma_gt2, gamma_le2
from polynomial.sampling import random_polynomial, random_state
from spectrum.potential import Potential, frequencies, sample_potential
from tests.conftest import cubic_spec, quartic_spec, x_dependent_spec


def test_small_divisor(squared_omega):
    assert small_divisor(squared_omega, MultiIndexPair.from_modes([1, 2], [3]), 0) == 4.0
    omega1 = frequencies(Potential.zero(1, 1.0, 3))
    assert small_divisor(omega1, MultiIndexPair.from_modes([1, 2], [-3]), 1) == 4.0


def test_M_lk():
    assert M_lk(MultiIndexPair.from_modes([1, 5], [2]), 3) == 5
    assert M_lk(MultiIndexPair.from_modes([1], [2, 1]), 3) == 3


def test_boundary_counts_as_resonant(squared_omega):
    mi = MultiIndexPair.from_modes([1, 1], [2])
    assert small_divisor(squared_omega, mi, 0) == 2.0
    assert is_resonant_term(squared_omega, mi, ResonanceParams(gamma=2.0, alpha=1.0, N=2), 0)
    assert not is_resonant_term(squared_omega, mi, ResonanceParams(gamma=1.999, alpha=1.0, N=2), 0)


def test_resonance_threshold_scales_with_cutoff(squared_omega):
    mi = MultiIndexPair.from_modes([1, 1], [2])
    assert M_lk(mi, 2) == 2
    assert resonance_threshold(mi, ResonanceParams(gamma=0.5, alpha=2.0, N=2)) == pytest.approx(0.5 * 2 / 4)
    assert resonance_threshold(mi, ResonanceParams(gamma=0.5, alpha=2.0, N=1)) == pytest.approx(0.5 * 2)
    assert is_resonant_term(squared_omega, mi, ResonanceParams(gamma=4.0, alpha=2.0, N=2), 0)
    assert not is_resonant_term(squared_omega, mi, ResonanceParams(gamma=3.999, alpha=2.0, N=2), 0)


def test_term_classes():
    assert classify_term(MultiIndexPair.from_modes([1, 2], [1, 2]), 2, 1) == "A"
    assert classify_term(MultiIndexPair.from_modes([1, 2], [-1, 2]), 2, 0) == "A"
    assert classify_term(MultiIndexPair.from_modes([1, 3], [1, 3]), 2, 1) == "B"
    assert classify_term(MultiIndexPair.from_modes([1, -3], [1, 3]), 2, 0) == "C"
    assert classify_term(MultiIndexPair.from_modes([1, 1], [2]), 2, 0) == "other"


@pytest.mark.parametrize("theta", [0, 1])
def test_homological_equation_is_solved(theta, rng):
    lattice = LatticeConfig(theta=theta, J=3)
    omega = frequencies(sample_potential(theta, 1.0, 3, seed=21), lattice)
    g = gamma_le2(random_polynomial(lattice, [3, 4], 30, rng), 2)
    params = ResonanceParams(gamma=0.05, alpha=1.0, N=2)
    S, Z = solve_homological(omega, g, params)
    assert homological_residual(omega, S, Z, g) <= 1e-12
    assert len(S) + len(Z) == len(g)
    assert conj_symmetry_check(S)
    resonant, nonresonant = nf_projector(g, omega, params, theta)
    assert Z.allclose(resonant, rtol=0.0)
    assert set(S) == set(nonresonant)
    if not S.is_zero:
        assert divisor_check(omega, S, theta) > 0.05 * 2 / 2


def test_bracket_with_h0_recovers_nonresonant_part(squared_omega, rng):
    lattice = LatticeConfig(theta=0, J=3)
    g = random_polynomial(lattice, [3], 10, rng)
    S, Z = solve_homological(squared_omega, g, ResonanceParams(gamma=0.0, alpha=1.0, N=3))
    bracket = poisson(quadratic_hamiltonian(lattice, squared_omega), S)
    assert (bracket + Z).allclose(g, rtol=1e-12)


def test_params_validation():
    with pytest.raises(ValidationError):
        NormalFormParams(gamma=0.0, alpha=2.0, N=2, r_star=1)
    with pytest.raises(ValidationError):
        NormalFormParams(gamma=0.1, alpha=1.0, N=2, r_star=1)
    with pytest.raises(ValidationError):
        NormalFormParams(gamma=0.1, alpha=2.0, N=2, r_star=0)


def test_degree_bookkeeping():
    params = NormalFormParams(gamma=0.1, alpha=2.0, N=2, r_star=2)
    assert params.top_degree == 5
    assert params.cap == 6
    assert params.cap == params.top_degree + 1
    assert params.model_copy(update={"remainder_degree": 8}).cap == 8


def test_n_window():
    params = NormalFormParams(gamma=0.5, alpha=2.0, N=1, r_star=1, p=2.0)
    lower, upper = params.n_window(0.1)
    assert lower == pytest.approx((0.1 ** -1 * 0.5 ** 2) ** (1.0 / 8.0))
    assert upper == pytest.approx((0.5 * 0.1 ** (-1.0 / 6.0)) ** 0.25)
    assert not params.window_ok(0.1)


def test_zero_nonlinearity(lattice0, squared_omega):
    params = NormalFormParams(gamma=0.1, alpha=2.0, N=2, r_star=2)
    result = birkhoff_iterate(squared_omega, Polynomial.zero(lattice0), params)
    assert result.Z.is_zero and result.R_N.is_zero and result.R_T.is_zero
    assert len(result.generators) == 3
    assert all(S.is_zero for S in result.generators)
    assert certify(result).passed


def test_quadratic_nonlinearity_is_rejected(lattice0, squared_omega):
    P = Polynomial.quadratic_form(lattice0, {j: 1.0 for j in lattice0.modes})
    with pytest.raises(ValueError):
        birkhoff_iterate(squared_omega, P, NormalFormParams(gamma=0.1, alpha=2.0, N=2, r_star=1))


def test_first_stage_splits_cubic_part(type2_normal_form):
    H, result = type2_normal_form
    P3 = H.P.homogeneous(3)
    params = result.params
    resonant, _ = nf_projector(gamma_le2(P3, params.N), H.omega, params.resonance(), 1)
    assert result.Z.homogeneous(3).allclose(resonant, rtol=0.0)
    assert result.R_N.homogeneous(3).allclose(gamma_gt2(P3, params.N), rtol=0.0)
    assert len(result.generators) == 2
    assert result.generators[0].min_degree == 3


def test_normal_form_certificate(type2_normal_form):
    _, result = type2_normal_form
    report = certify(result)
    assert report.passed
    assert report.max_residual <= 1e-12
    assert report.leftover_terms == 0
    assert result.R_T.is_zero or result.R_T.min_degree >= 5
    assert set(result.Z.degrees()) <= {3, 4}
    for stage in result.diagnostics.stages:
        assert stage.stage_mismatch <= 1e-10
        assert stage.ledger_preserved
    assert sum(class_counts(result.Z, result.params.N, 1).values()) == len(result.Z)


def test_momentum_free_nonlinearity_has_no_remainder_below_n(type2_normal_form):
    _, result = type2_normal_form
    assert result.R_N.is_zero
    assert set(result.Z.momenta()) <= {0}


@pytest.fixture(scope="module", params=["type1_quartic", "type2_cubic"])
def tail_normal_form(request):
    """x-independent F on J=5 normalized with N=2, so tail terms reach R_N"""
    if request.param == "type1_quartic":
        H = build_type1(quartic_spec(), sample_potential(0, 1.0, 5, seed=13), 5)
    else:
        H = build_type2(cubic_spec(), sample_potential(1, 1.0, 5, seed=13), 5)
    params = NormalFormParams(gamma=1e-3, alpha=2.0, N=2, r_star=1)
    return H, birkhoff_iterate(H.omega, H.P, params)


def test_tail_remainder_has_three_tail_units(tail_normal_form):
    _, result = tail_normal_form
    assert not result.R_N.is_zero
    report = certify(result)
    assert report.passed
    assert report.r_n_outside_le2
    assert report.r_n_three_tail_units
    assert all(mi.tail_units(2) >= 3 for mi in result.R_N)


def test_tail_remainder_vanishes_on_head_states(tail_normal_form, rng):
    H, result = tail_normal_form
    for _ in range(10):
        s = project_head(random_state(H.lattice, 1.0, 0.0, rng), 2)
        assert abs(result.R_N(s)) <= 1e-14
    s = random_state(H.lattice, 1.0, 0.0, rng)
    assert abs(result.R_N(s)) > 0.0


def test_remainder_outside_le2_with_large_momentum():
    H = build_type1(x_dependent_spec(), sample_potential(0, 1.0, 4, seed=2), 4)
    N = 1
    result = birkhoff_iterate(H.omega, H.P, NormalFormParams(gamma=1e-3, alpha=2.0, N=N, r_star=1))
    assert any(abs(momentum(mi)) > N for mi in result.R_N)
    report = certify(result)
    assert report.r_n_outside_le2
    assert report.passed
    for mi in result.R_N:
        assert mi.tail_units(N) >= 3 or abs(momentum(mi)) > N


def test_transformed_hamiltonian_matches_normal_form(type2_normal_form, rng):
    H, result = type2_normal_form
    s = random_state(H.lattice, 3e-3, 0.0, rng)
    moved = transform_state(result.generators, s, "forward", scheme="dop853")
    original = H.total()(moved).real
    normal = result.total()(s).real
    assert abs(original - normal) <= 1e-11
    assert abs(H.total()(s).real - normal) > abs(original - normal)


def test_ledgers_survive_the_iteration(type1_hamiltonian):
    H = type1_hamiltonian
    params = NormalFormParams(gamma=1e-3, alpha=2.0, N=2, r_star=1, beta=1.0)
    result = birkhoff_iterate(H.omega, H.P, params)
    assert all(stage.ledger_preserved for stage in result.diagnostics.stages)
    assert result.Z.is_zero or result.Z.has_ledger
    assert result.diagnostics.semi_bound_constant is not None
    assert len(result.diagnostics.growth_constants) == 2
    report = certify(result)
    assert report.passed
    assert report.r_n_outside_le2


def test_transform_identities(type2_normal_form, lattice1):
    _, result = type2_normal_form
    zero = State.zeros(result.lattice)
    assert np.array_equal(transform_state(result.generators, zero).u, zero.u)
    s = random_state(lattice1, 0.1, 2.0, np.random.default_rng(3))
    assert np.array_equal(transform_state([], s).u, s.u)
    assert np.array_equal(transform_state([Polynomial.zero(lattice1)], s, "inverse").u, s.u)
    assert near_identity_ratio(result.generators, zero, 1) == 0.0
    with pytest.raises(ValueError):
        transform_state(result.generators, s, "sideways")


def test_transform_round_trip(type2_normal_form, rng):
    _, result = type2_normal_form
    s = random_state(result.lattice, 1e-2, 2.0, rng)
    there = transform_state(result.generators, s, "forward")
    back = transform_state(result.generators, there, "inverse")
    assert sobolev_norm(back - s, 2.0) <= 1e-8
    assert sobolev_norm(there - s, 2.0) > 0.0


def test_transform_escape_is_reported(lattice0):
    mi = MultiIndexPair.from_modes([1, 1], [2])
    S = Polynomial.from_scalars(lattice0, {mi: 10.0, mi.swapped(): 10.0})
    s = State.from_modes(lattice0, {1: 1.0})
    with pytest.raises(TransformDomainError):
        transform_state([S], s, "forward")


def test_result_store_round_trip(type2_normal_form, tmp_path):
    _, result = type2_normal_form
    directory = write_result(str(tmp_path / "nf"), result)
    loaded = read_result(directory)
    assert loaded.omega == result.omega
    assert loaded.params == result.params
    assert loaded.Z.allclose(result.Z, rtol=0.0)
    assert loaded.R_N.allclose(result.R_N, rtol=0.0)
    assert loaded.R_T.allclose(result.R_T, rtol=0.0)
    assert len(loaded.generators) == len(result.generators)
    for a, b in zip(loaded.generators, result.generators):
        assert a.allclose(b, rtol=0.0)
    assert loaded.diagnostics.max_residual == result.diagnostics.max_residual
    assert certify(loaded).passed


def test_missing_result_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_result(str(tmp_path / "absent"))
