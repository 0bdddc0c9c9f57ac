"""
Tests for Poisson brackets, ledger propagation, Lie series and the estimate helpers
"""
import numpy as np
import pytest

from bracket.estimates import lattice_constant, sobolev_bracket_bound, vector_field_bound
from bracket.lie import lie_series, lie_series_with_overflow, series_increments
from bracket.poisson import (
    BracketStats,
    bracket_with_sobolev_sq,
    poisson,
    poisson_with_generator,
    sobolev_sq_polynomial,
)
from bracket.symplectic import SymplecticForm, hamiltonian_vector_field, quadratic_hamiltonian
from dynamics.integrators import polynomial_flow
from helper.exceptions import MissingLedgerError, NonAscendingGeneratorError
from normalform.resonance import small_divisor
from polynomial.lattice import LatticeConfig, State, sobolev_norm
from polynomial.multi_index import MultiIndexPair
from polynomial.polynomial import Polynomial, conj_symmetry_check, semi_bound_check
from polynomial.sampling import random_polynomial, random_state, random_structured_polynomial
from spectrum.potential import FrequencyVector


def _mirror_pair(lattice: LatticeConfig) -> Polynomial:
    return Polynomial.from_scalars(lattice, {MultiIndexPair.from_modes([1], [-1]): 1.0,
                                             MultiIndexPair.from_modes([-1], [1]): 1.0})


@pytest.mark.parametrize("theta", [0, 1])
def test_bracket_is_antisymmetric(theta, rng):
    lattice = LatticeConfig(theta=theta, J=3)
    f = random_polynomial(lattice, [3], 8, rng)
    g = random_polynomial(lattice, [3, 4], 8, rng)
    assert poisson(f, g).allclose(poisson(g, f).scale(-1.0), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("theta", [0, 1])
def test_jacobi_identity(theta, rng):
    lattice = LatticeConfig(theta=theta, J=2)
    f = random_polynomial(lattice, [3], 4, rng)
    g = random_polynomial(lattice, [3], 4, rng)
    h = random_polynomial(lattice, [2, 3], 4, rng)
    total = poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g))
    assert total.max_abs_coefficient() < 1e-10


@pytest.mark.parametrize("theta", [0, 1])
def test_bracket_with_h0_multiplies_by_divisor(theta):
    lattice = LatticeConfig(theta=theta, J=3)
    omega = FrequencyVector.from_mapping(theta, {j: 0.3 * j - j * j for j in lattice.modes})
    mi = MultiIndexPair.from_modes([1, 2], [-3])
    monomial = Polynomial.from_scalars(lattice, {mi: 1.0})
    bracket = poisson(quadratic_hamiltonian(lattice, omega), monomial)
    assert bracket.coefficient(mi) == pytest.approx(-1j * small_divisor(omega, mi, theta))
    assert len(bracket) == 1


@pytest.mark.parametrize("theta", [0, 1])
def test_sobolev_bracket_matches_generic_bracket(theta, rng):
    lattice = LatticeConfig(theta=theta, J=3)
    f = random_polynomial(lattice, [3, 4], 15, rng)
    direct = poisson(f, sobolev_sq_polynomial(lattice, 1.5))
    assert bracket_with_sobolev_sq(f, 1.5).allclose(direct, rtol=1e-12, atol=1e-10)


def test_h0_commutes_with_sobolev_norm(lattice1):
    omega = FrequencyVector.from_mapping(1, {j: -j * abs(j) for j in lattice1.modes})
    assert bracket_with_sobolev_sq(quadratic_hamiltonian(lattice1, omega), 2.0).is_zero


def test_mirror_pair_bracket_vanishes_only_under_w0():
    assert bracket_with_sobolev_sq(_mirror_pair(LatticeConfig(theta=0, J=2)), 1.0).is_zero
    assert not bracket_with_sobolev_sq(_mirror_pair(LatticeConfig(theta=1, J=2)), 1.0).is_zero


def test_generator_bracket_propagates_ledgers(rng):
    lattice = LatticeConfig(theta=0, J=3)
    f = random_structured_polynomial(lattice, 3, 12, beta=1.0, C=1.0, rng=rng)
    S = random_polynomial(lattice, [3], 6, rng)
    structured = poisson_with_generator(f, S)
    assert structured.allclose(poisson(f, S), rtol=1e-12, atol=1e-15)
    for mi, coeff in structured.items():
        assert coeff.ledger is not None
        assert coeff.ledger_scalar() == pytest.approx(coeff.scalar, rel=1e-10, abs=1e-14)
        for entry in coeff.ledger:
            assert mi.contains(entry.frame)


def test_generator_bracket_needs_ledgers(lattice0, rng):
    f = random_polynomial(lattice0, [3], 4, rng)
    S = random_polynomial(lattice0, [3], 4, rng)
    with pytest.raises(MissingLedgerError):
        poisson_with_generator(f, S)


def test_degree_cap_counts_skipped_pairs(lattice0, rng):
    f = random_polynomial(lattice0, [4], 6, rng)
    S = random_polynomial(lattice0, [3], 6, rng)
    stats = BracketStats()
    capped = poisson(f, S, max_degree=4, stats=stats)
    assert capped.is_zero
    assert stats.skipped_over_degree > 0
    assert stats.pairs == 0


def test_lie_series_rejects_quadratic_generator(lattice0):
    S = quadratic_hamiltonian(lattice0, {j: 1.0 for j in lattice0.modes})
    with pytest.raises(NonAscendingGeneratorError):
        lie_series(sobolev_sq_polynomial(lattice0, 1.0), S, max_degree=4)


def test_series_needs_degree_cap(lattice0, rng):
    S = random_polynomial(lattice0, [3], 3, rng)
    with pytest.raises(ValueError):
        series_increments(S, S)


def test_lie_series_of_zero_generator_is_identity(lattice0, rng):
    f = random_polynomial(lattice0, [3, 4], 10, rng)
    assert lie_series(f, Polynomial.zero(lattice0), max_degree=4).allclose(f, rtol=0.0)


def test_lie_series_overflow_is_counted(lattice0, rng):
    f = random_polynomial(lattice0, [3], 6, rng)
    S = random_polynomial(lattice0, [3], 6, rng)
    series, skipped = lie_series_with_overflow(f, S, max_degree=3)
    assert series.allclose(f, rtol=0.0)
    assert skipped > 0


@pytest.mark.parametrize("theta", [0, 1])
def test_lie_series_is_composition_with_time_minus_one_flow(theta, rng):
    lattice = LatticeConfig(theta=theta, J=2)
    f = sobolev_sq_polynomial(lattice, 1.0)
    S = random_polynomial(lattice, [3], 4, rng)
    series = lie_series(f, S, max_degree=9)
    s = random_state(lattice, 1e-3, 0.0, rng)
    moved = polynomial_flow(S, None, s.u, -1.0, scheme="dop853")
    assert abs(series(s) - f(State(lattice, moved))) < 1e-15


def test_vector_field_stays_on_real_slice(lattice1, rng):
    f = random_polynomial(lattice1, [3], 8, rng)
    for _ in range(20):
        X = hamiltonian_vector_field(f, None, random_state(lattice1, 0.5, 1.0, rng))
        assert np.allclose(X.dubar, np.conj(X.du), rtol=1e-10, atol=1e-14)


def test_w1_rejects_mode_zero():
    from bracket.symplectic import resolve_form
    from helper.exceptions import LatticeMismatchError
    with pytest.raises(LatticeMismatchError):
        resolve_form(LatticeConfig(theta=0, J=2, include_zero=True), SymplecticForm(theta=1))


@pytest.mark.parametrize("theta", [0, 1])
def test_estimates_hold_on_structured_samples(theta, rng):
    lattice = LatticeConfig(theta=theta, J=4)
    p, beta, C = 1.0, 2.0, 1.0
    c = lattice_constant(lattice)
    assert c == pytest.approx(np.sqrt(2 * sum(1.0 / j ** 2 for j in range(1, 5))))
    for _ in range(40):
        f = random_structured_polynomial(lattice, 3, 8, beta=beta, C=C, rng=rng)
        if f.is_zero:
            continue
        assert semi_bound_check(f, beta, C).passed
        s = random_state(lattice, float(rng.uniform(0.1, 1.0)), p, rng)
        norm_2, norm_p = sobolev_norm(s, 0.0), sobolev_norm(s, p)
        X = hamiltonian_vector_field(f, None, s)
        assert X.sobolev_norm(p - 1) / np.sqrt(2.0) <= vector_field_bound(C, 3, p, c, norm_2, norm_p)
        drift = abs(bracket_with_sobolev_sq(f, p)(s))
        assert drift <= sobolev_bracket_bound(C, 3, p, c, norm_2, norm_p)
        assert conj_symmetry_check(f)
