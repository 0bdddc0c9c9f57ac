"""
Fourier-side Hamiltonians of the two derivative NLS equations
"""
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from bracket.symplectic import quadratic_hamiltonian
from helper.parallel import ordered_map
from logs.logger import system_logger
from polynomial.coefficients import Coefficient, LedgerEntry, TermAccumulator, factored_weight
from polynomial.lattice import LatticeConfig
from polynomial.multi_index import MultiIndexPair, momentum
from polynomial.polynomial import (
    Polynomial,
    SemiBoundReport,
    conj_symmetry_defects,
    ledger_conjugation_check,
    semi_bound_check,
)
from frontend.nonlinearity import NonlinearitySpec
from spectrum.potential import FrequencyVector, Potential, frequencies


class BuildReport(BaseModel):
    kind: str
    generated_terms: int = 0
    dropped_combinations: int = Field(0, description="Combinations needing a mode outside the lattice")
    quadratic_terms: int = Field(0, description="Quadratic F terms, which only shift the linear part")
    advisories: List[str] = Field(default_factory=list)


@dataclass
class Hamiltonian:
    """H = H0 + P with H0 = sum omega_j |u_j|^2"""
    theta: int
    lattice: LatticeConfig
    omega: FrequencyVector
    P: Polynomial
    potential: Optional[Potential] = None
    report: BuildReport = field(default_factory=lambda: BuildReport(kind="custom"))

    @property
    def H0(self) -> Polynomial:
        return quadratic_hamiltonian(self.lattice, self.omega)

    def total(self) -> Polynomial:
        return self.H0 + self.P

    def energy(self, u: np.ndarray) -> float:
        omega = self.omega.array(self.lattice)
        return float(np.sum(omega * np.abs(u) ** 2) + self.P.compiled().value(u).real)


def _multinomial(counts: Dict[int, int], total: int) -> float:
    value = math.factorial(total)
    for c in counts.values():
        value //= math.factorial(c)
    return float(value)


def _combinations(a: int, b: int, kappa: int, lattice: LatticeConfig) -> Tuple[List[MultiIndexPair], int]:
    """
    Every (l, k) with |l| = a, |k| = b and M(l,k) = -kappa on the lattice.

    The last k mode (the last l mode when b = 0) is fixed by momentum; a
    fixed mode outside the lattice counts as one dropped combination.
    """
    modes = lattice.modes
    found = set()
    dropped = set()
    if b > 0:
        for l_modes in combinations_with_replacement(modes, a):
            for k_part in combinations_with_replacement(modes, b - 1):
                last = sum(l_modes) + kappa - sum(k_part)
                key = (l_modes, tuple(sorted(k_part + (last,))))
                if lattice.contains(last):
                    found.add(MultiIndexPair.from_modes(l_modes, key[1]))
                else:
                    dropped.add(key)
    else:
        for l_part in combinations_with_replacement(modes, a - 1):
            last = -kappa - sum(l_part)
            key = (tuple(sorted(l_part + (last,))), ())
            if lattice.contains(last):
                found.add(MultiIndexPair.from_modes(key[0], ()))
            else:
                dropped.add(key)
    return sorted(found), len(dropped)


def _expansion_factor(mi: MultiIndexPair, a: int, b: int) -> float:
    """a!/l! b!/k! (2 pi)^(1 - r/2)"""
    return _multinomial(mi.l, a) * _multinomial(mi.k, b) * (2 * math.pi) ** (1 - (a + b) / 2)


def _type1_terms(item, lattice: LatticeConfig):
    (a, b, kappa), c = item
    combos, dropped = _combinations(a, b, kappa, lattice)
    out = []
    for mi in combos:
        inner = -c * _expansion_factor(mi, a, b)
        entry = LedgerEntry(MultiIndexPair.from_maps(mi.l, {}), momentum(mi), complex(inner))
        out.append((mi, entry.value, [(entry.frame, entry.i0, entry.inner)]))
    return out, dropped


def _type2_terms(item, lattice: LatticeConfig):
    (a, b, kappa), c = item
    combos, dropped = _combinations(a, b, kappa, lattice)
    out = []
    for mi in combos:
        tilde = c * _expansion_factor(mi, a, b)
        out.append((mi, complex(tilde * factored_weight(mi)), complex(tilde)))
    return out, dropped


def _split_quadratic(F: NonlinearitySpec) -> Tuple[list, int]:
    items = sorted(F.flattened().items())
    higher = [item for item in items if item[0][0] + item[0][1] >= 3]
    return higher, len(items) - len(higher)


def build_type1(F: NonlinearitySpec, pot: Potential, J: int, include_zero: bool = False,
                threads: Optional[int] = None) -> Hamiltonian:
    """
    Hamiltonian of the first equation on the w0 lattice

    Each F term c e^{i kappa x} psi^a psibar^b contributes, for every
    monomial with M(l,k) = -kappa, the ledger entry (l, 0, M(l,k)) with
    inner -c a!b!/(l!k!) (2 pi)^(1 - (a+b)/2).

    Args:
        F: Nonlinearity (reality validated by the model)
        pot: Potential with theta=0
        J: Lattice cutoff
        include_zero: Keep mode 0
        threads: Worker cap for the per-term expansion

    Returns:
        Hamiltonian whose P carries ledgers on every term
    """
    if pot.theta != 0:
        raise ValueError("build_type1 needs a theta=0 potential")
    lattice = LatticeConfig(theta=0, J=J, include_zero=include_zero)
    higher, quadratic = _split_quadratic(F)
    report = BuildReport(kind="type1", quadratic_terms=quadratic)
    if F.kmax > J:
        report.advisories.append(f"J={J} is below the largest x-mode {F.kmax}")
    acc = TermAccumulator()
    for terms, dropped in ordered_map(lambda item: _type1_terms(item, lattice), higher, threads):
        report.dropped_combinations += dropped
        for mi, value, entries in terms:
            acc.add_structured(mi, value, entries)
    P = Polynomial.from_accumulator(lattice, acc, provenance="type1")
    report.generated_terms = len(P)
    _log_build(report)
    return Hamiltonian(0, lattice, frequencies(pot, lattice), P, pot, report)


def build_type2(F: NonlinearitySpec, pot: Potential, J: int, threads: Optional[int] = None) -> Hamiltonian:
    """
    Hamiltonian of the second equation on the w1 lattice, after u_j = psi_j / |j|^(1/2)

    Coefficients are stored in factored form: tilde = c a!b!/(l!k!)
    (2 pi)^(1 - (a+b)/2), full coefficient tilde prod |j|^((l_j+k_j)/2).
    """
    if pot.theta != 1:
        raise ValueError("build_type2 needs a theta=1 potential")
    lattice = LatticeConfig(theta=1, J=J, include_zero=False)
    higher, quadratic = _split_quadratic(F)
    report = BuildReport(kind="type2", quadratic_terms=quadratic)
    if F.kmax > J:
        report.advisories.append(f"J={J} is below the largest x-mode {F.kmax}")
    acc = TermAccumulator()
    for terms, dropped in ordered_map(lambda item: _type2_terms(item, lattice), higher, threads):
        report.dropped_combinations += dropped
        for mi, value, tilde in terms:
            acc.add(mi, Coefficient(value, None, tilde))
    P = Polynomial.from_accumulator(lattice, acc, provenance="type2")
    report.generated_terms = len(P)
    _log_build(report)
    return Hamiltonian(1, lattice, frequencies(pot, lattice), P, pot, report)


def _log_build(report: BuildReport) -> None:
    system_logger.info(f"Built {report.kind} Hamiltonian: {report.generated_terms} terms, "
                       f"{report.dropped_combinations} dropped combinations, {report.quadratic_terms} quadratic F terms")
    for advisory in report.advisories:
        system_logger.warning(advisory)


class StructureReport(BaseModel):
    passed: bool
    conj_symmetric: bool
    conj_defects: List[str] = Field(default_factory=list, description="Offending (l,k,i) terms")
    ledger_conjugation: Optional[bool] = None
    structured: bool
    semi_bound: Optional[SemiBoundReport] = None
    smallest_C: Optional[float] = None
    momenta: List[int] = Field(default_factory=list)


def verify_structure(H: Hamiltonian, beta: float, C: Optional[float] = None, tol: float = 1e-10) -> StructureReport:
    """
    Conjugation law plus semi-bound of P

    Args:
        H: Hamiltonian to check
        beta: Decay exponent of the momentum envelope
        C: Semi-bound constant to test (None only measures the smallest one)
        tol: Relative tolerance of the conjugation check

    Returns:
        StructureReport; passed needs the conjugation law and, when C is
        given, the semi-bound
    """
    P = H.P
    defects = [f"{mi} (i={momentum(mi)})" for mi in conj_symmetry_defects(P, tol)]
    structured = P.structure in ("ledger", "factored", "empty")
    ledger_ok = None
    semi = None
    smallest = None
    if structured:
        if H.theta == 0 and not P.is_zero:
            ledger_ok = ledger_conjugation_check(P, tol)
        semi = semi_bound_check(P, beta, C if C is not None else 1.0)
        smallest = semi.smallest_C
    passed = not defects and ledger_ok is not False
    if C is not None:
        passed = passed and semi is not None and semi.passed
    return StructureReport(passed=passed, conj_symmetric=not defects, conj_defects=defects,
                           ledger_conjugation=ledger_ok, structured=structured, semi_bound=semi,
                           smallest_C=smallest, momenta=P.momenta())


def norm_equivalence_constants(lattice: LatticeConfig, p: float, s: Optional[float] = None) -> Tuple[float, float]:
    """
    (C1, C2) with C1 ||u||_p <= ||psi||_{H^s} <= C2 ||u||_p for psi_j = |j|^(1/2) u_j

    The per-mode ratio is |j|^((2s + 1 - 2p)/2); s defaults to p + 1/2.
    """
    if lattice.theta != 1:
        raise ValueError("the rescaling applies to the theta=1 lattice")
    s = p + 0.5 if s is None else s
    ratios = [abs(j) ** ((2 * s + 1 - 2 * p) / 2) for j in lattice.modes]
    c1, c2 = float(min(ratios)), float(max(ratios))
    system_logger.info(f"Norm equivalence on J={lattice.J}, p={p}, s={s}: C1={c1:.4g}, C2={c2:.4g}")
    return c1, c2
