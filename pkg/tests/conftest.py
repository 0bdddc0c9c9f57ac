"""
Shared fixtures: small lattices, seeded generators and sample Hamiltonians
"""
import os

os.environ.setdefault("LOG_TO_FILE", "False")

import numpy as np
import pytest

from frontend.hamiltonian import build_type1, build_type2
from frontend.nonlinearity import NonlinearitySpec
from normalform.birkhoff import NormalFormParams, birkhoff_iterate
from polynomial.lattice import LatticeConfig
from spectrum.potential import FrequencyVector, sample_potential


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def lattice0():
    return LatticeConfig(theta=0, J=3)


@pytest.fixture
def lattice1():
    return LatticeConfig(theta=1, J=3)


@pytest.fixture
def squared_omega():
    """omega_j = -j^2 on modes 1..3 and their mirrors"""
    return FrequencyVector.from_mapping(0, {j: -j * j for j in (-3, -2, -1, 1, 2, 3)})


def cubic_spec() -> NonlinearitySpec:
    """F = psi^2 psibar + psi psibar^2"""
    return NonlinearitySpec.from_tuples([(2, 1, 0, 1.0), (1, 2, 0, 1.0)])


def quartic_spec() -> NonlinearitySpec:
    """F = psi^3 psibar + psi psibar^3"""
    return NonlinearitySpec.from_tuples([(3, 1, 0, 1.0), (1, 3, 0, 1.0)])


def x_dependent_spec() -> NonlinearitySpec:
    """F = c e^{ix} psi^2 psibar + conj(c) e^{-ix} psi psibar^2"""
    c = 0.5 + 0.25j
    return NonlinearitySpec.from_tuples([(2, 1, 1, c), (1, 2, -1, np.conj(c))])


@pytest.fixture
def type1_hamiltonian():
    pot = sample_potential(0, 1.0, 3, seed=7)
    return build_type1(x_dependent_spec(), pot, 3)


@pytest.fixture
def type2_hamiltonian():
    pot = sample_potential(1, 1.0, 3, seed=11)
    return build_type2(cubic_spec(), pot, 3)


@pytest.fixture(scope="module")
def type2_normal_form():
    pot = sample_potential(1, 1.0, 3, seed=11)
    H = build_type2(cubic_spec(), pot, 3)
    params = NormalFormParams(gamma=1e-3, alpha=2.0, N=3, r_star=1)
    return H, birkhoff_iterate(H.omega, H.P, params)
