"""
Tests for nonlinearity specs, the two Hamiltonian builders, physical-space energies and the Hamiltonian codec
"""
import numpy as np
import pytest
from pydantic import ValidationError

from frontend.hamiltonian import build_type1, build_type2, norm_equivalence_constants, verify_structure
from frontend.nonlinearity import NonlinearitySpec, NonlinearTerm
from frontend.physical import grid_size, physical_energy, synthesize
from frontend.store import read_hamiltonian, write_hamiltonian
from helper.artifacts import make_header
from polynomial.lattice import LatticeConfig, State
from polynomial.polynomial import ledger_conjugation_check
from polynomial.sampling import random_state
from spectrum.potential import sample_potential
from tests.conftest import cubic_spec, quartic_spec, x_dependent_spec


def test_unpaired_term_is_named():
    with pytest.raises(ValidationError, match="unpaired"):
        NonlinearitySpec.from_tuples([(2, 1, 0, 1.0)])
    with pytest.raises(ValidationError, match="unpaired"):
        NonlinearitySpec.from_tuples([(2, 1, 1, 1.0j), (1, 2, -1, 1.0j)])


def test_low_degree_term_is_rejected():
    with pytest.raises(ValidationError):
        NonlinearTerm(a=1, b=0, x_modes=[(0, (1.0, 0.0))])


def test_spec_summaries():
    F = x_dependent_spec()
    assert F.kmax == 1
    assert F.max_degree == 3
    assert not F.x_independent
    assert cubic_spec().x_independent
    assert NonlinearitySpec.from_tuples([(2, 2, 0, 1.0)]).flattened() == {(2, 2, 0): 1.0 + 0j}


def test_type1_momenta_and_structure(type1_hamiltonian):
    H = type1_hamiltonian
    assert H.theta == 0
    assert H.P.momenta() == [-1, 1]
    assert H.P.degrees() == [3]
    assert H.P.structure == "ledger"
    assert ledger_conjugation_check(H.P)
    report = verify_structure(H, beta=1.0)
    assert report.passed
    assert report.ledger_conjugation
    assert report.smallest_C is not None
    assert verify_structure(H, beta=1.0, C=report.smallest_C * 1.01).passed


def test_type2_is_momentum_free(type2_hamiltonian):
    H = type2_hamiltonian
    assert H.theta == 1
    assert H.P.momenta() == [0]
    assert H.P.structure == "factored"
    report = verify_structure(H, beta=0.0)
    assert report.passed
    assert report.ledger_conjugation is None


def test_builders_check_theta():
    with pytest.raises(ValueError):
        build_type1(cubic_spec(), sample_potential(1, 1.0, 3, seed=0), 3)
    with pytest.raises(ValueError):
        build_type2(cubic_spec(), sample_potential(0, 1.0, 3, seed=0), 3)


def test_out_of_lattice_combinations_are_dropped():
    H = build_type2(cubic_spec(), sample_potential(1, 1.0, 1, seed=0), 1)
    assert H.report.generated_terms == 0
    assert H.report.dropped_combinations == 7
    assert H.P.is_zero


def test_quadratic_terms_are_skipped():
    F = NonlinearitySpec.from_tuples([(1, 1, 0, 0.5), (2, 1, 0, 1.0), (1, 2, 0, 1.0)])
    H = build_type2(F, sample_potential(1, 1.0, 2, seed=0), 2)
    assert H.report.quadratic_terms == 1
    assert H.P.min_degree == 3


def test_builds_are_thread_independent():
    pot = sample_potential(0, 1.0, 3, seed=2)
    single = build_type1(quartic_spec(), pot, 3, threads=1)
    pooled = build_type1(quartic_spec(), pot, 3, threads=4)
    assert single.P.allclose(pooled.P, rtol=0.0)
    assert list(single.P) == list(pooled.P)


@pytest.mark.parametrize("spec", [x_dependent_spec, quartic_spec])
def test_type1_energy_matches_physical_integral(spec, rng):
    F = spec()
    H = build_type1(F, sample_potential(0, 1.0, 3, seed=4), 3)
    for _ in range(3):
        s = random_state(H.lattice, 0.7, 0.0, rng)
        value = H.P(s)
        assert physical_energy(F, s, "type1") == pytest.approx(value, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("spec", [cubic_spec, quartic_spec])
def test_type2_energy_matches_physical_integral(spec, rng):
    F = spec()
    H = build_type2(F, sample_potential(1, 1.0, 3, seed=5), 3)
    for _ in range(3):
        s = random_state(H.lattice, 0.7, 0.0, rng)
        assert physical_energy(F, s, "type2") == pytest.approx(H.P(s), rel=1e-10, abs=1e-12)


def test_synthesis_of_single_mode():
    lattice = LatticeConfig(theta=0, J=2)
    s = State.from_modes(lattice, {1: 1.0})
    x, psi, psi_x = synthesize(s, "type1", 8)
    assert np.allclose(psi, np.exp(1j * x) / np.sqrt(2 * np.pi))
    assert np.allclose(psi_x, 1j * np.exp(1j * x) / np.sqrt(2 * np.pi))
    with pytest.raises(ValueError):
        synthesize(s, "type1", 4)


def test_grid_size():
    assert grid_size(cubic_spec(), 3) == 10
    assert grid_size(x_dependent_spec(), 3) == 12
    assert grid_size(quartic_spec(), 5) % 2 == 0


def test_norm_equivalence_constants(lattice1):
    assert norm_equivalence_constants(lattice1, 1.0) == (1.0, 3.0)
    assert norm_equivalence_constants(lattice1, 1.0, s=0.5) == (1.0, 1.0)
    with pytest.raises(ValueError):
        norm_equivalence_constants(LatticeConfig(theta=0, J=3), 1.0)


def test_hamiltonian_store_round_trip(type1_hamiltonian, tmp_path):
    H = type1_hamiltonian
    directory = write_hamiltonian(str(tmp_path / "H"), H, make_header({"case": "type1"}, [7]))
    loaded = read_hamiltonian(directory)
    assert loaded.theta == 0
    assert loaded.omega == H.omega
    assert loaded.potential == H.potential
    assert loaded.report == H.report
    assert loaded.P.allclose(H.P, rtol=0.0)
    assert ledger_conjugation_check(loaded.P)
    for mi, coeff in H.P.items():
        assert loaded.P.get(mi).ledger_scalar() == pytest.approx(coeff.ledger_scalar(), rel=1e-14)


def test_missing_hamiltonian_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_hamiltonian(str(tmp_path / "nowhere"))
