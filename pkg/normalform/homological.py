"""
Homological equation {H0, S} + Z = g for a homogeneous g
"""
from typing import Dict, Optional, Tuple

from bracket.poisson import poisson
from bracket.symplectic import SymplecticForm, quadratic_hamiltonian
from helper.exceptions import SmallDivisorUnderflowError
from normalform.resonance import ResonanceParams, is_resonant_term, small_divisor
from polynomial.coefficients import Coefficient
from polynomial.multi_index import MultiIndexPair
from polynomial.polynomial import Polynomial
from settings import settings
from spectrum.potential import FrequencyVector


def solve_homological(omega: FrequencyVector, g: Polynomial, params: ResonanceParams,
                      theta: Optional[int] = None) -> Tuple[Polynomial, Polynomial]:
    """
    Solve {H0, S} + Z = g term by term

    Args:
        omega: Linear frequencies of H0
        g: Polynomial already truncated by gamma_le2
        params: Resonance parameters
        theta: Symplectic-form selector (None uses the lattice's theta)

    Returns:
        (S, Z) with S_lk = -g_lk / (i <omega, I_theta(l-k)>) on nonresonant
        terms and Z the resonant part of g
    """
    theta = g.lattice.theta if theta is None else theta
    s_terms: Dict[MultiIndexPair, Coefficient] = {}
    z_terms: Dict[MultiIndexPair, Coefficient] = {}
    for mi, coeff in g.items():
        if is_resonant_term(omega, mi, params, theta):
            z_terms[mi] = coeff
            continue
        divisor = small_divisor(omega, mi, theta)
        if abs(divisor) < settings.SMALL_DIVISOR_FLOOR:
            raise SmallDivisorUnderflowError(str(mi), divisor)
        s_terms[mi] = coeff.scaled(-1.0 / (1j * divisor))
    S = Polynomial(g.lattice, s_terms, provenance="homological_generator")
    Z = Polynomial(g.lattice, z_terms, provenance="normal_form")
    return S, Z


def homological_residual(omega: FrequencyVector, S: Polynomial, Z: Polynomial, g: Polynomial,
                         theta: Optional[int] = None) -> float:
    """max over terms of |{H0,S} + Z - g| / (1 + |g_lk|), with {H0,S} from the generic bracket"""
    theta = g.lattice.theta if theta is None else theta
    H0 = quadratic_hamiltonian(g.lattice, omega)
    lhs = poisson(H0, S, SymplecticForm(theta=theta)) + Z
    worst = 0.0
    for mi in set(lhs) | set(g):
        gap = abs(lhs.coefficient(mi) - g.coefficient(mi))
        worst = max(worst, gap / (1.0 + abs(g.coefficient(mi))))
    return worst


def divisor_check(omega: FrequencyVector, S: Polynomial, theta: int) -> float:
    """Smallest |divisor| over the generator's terms (inf for S = 0)"""
    return min((abs(small_divisor(omega, mi, theta)) for mi in S), default=float("inf"))
