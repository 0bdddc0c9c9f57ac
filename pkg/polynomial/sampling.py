"""
Seeded random polynomials and states for property checks
"""
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from polynomial.coefficients import Coefficient, LedgerEntry, factored_weight
from polynomial.lattice import LatticeConfig, State, japanese, scale_to_norm
from polynomial.multi_index import MultiIndexPair, momentum
from polynomial.polynomial import Polynomial


def random_monomial(lattice: LatticeConfig, degree: int, rng: np.random.Generator,
                    max_mode: Optional[int] = None) -> MultiIndexPair:
    """Uniform modes for a random split of the degree between u and ubar"""
    modes = [j for j in lattice.modes if max_mode is None or abs(j) <= max_mode]
    a = int(rng.integers(0, degree + 1))
    picks = rng.choice(len(modes), size=degree, replace=True)
    chosen = [modes[i] for i in picks]
    return MultiIndexPair.from_modes(chosen[:a], chosen[a:])


def random_state(lattice: LatticeConfig, norm: float, p: float, rng: np.random.Generator,
                 max_mode: Optional[int] = None) -> State:
    """Complex Gaussian amplitudes rescaled to the requested p-Sobolev norm"""
    u = rng.standard_normal(lattice.size) + 1j * rng.standard_normal(lattice.size)
    if max_mode is not None:
        u = np.where(np.abs(lattice.mode_array()) <= max_mode, u, 0.0)
    return scale_to_norm(State(lattice, u), norm, p)


def random_polynomial(lattice: LatticeConfig, degrees: Iterable[int], n_terms: int,
                      rng: np.random.Generator, conj_symmetric: bool = True,
                      max_mode: Optional[int] = None) -> Polynomial:
    """
    Random scalar polynomial, optionally with conj(f_lk) = f_kl enforced

    Args:
        lattice: Target lattice
        degrees: Allowed total degrees
        n_terms: Number of drawn monomials (mirror partners come on top)
        rng: Seeded generator
        conj_symmetric: Add the conjugate partner of every drawn term
        max_mode: Restrict drawn modes to |j| <= max_mode

    Returns:
        Polynomial in scalar mode
    """
    degrees = list(degrees)
    terms: Dict[MultiIndexPair, complex] = {}
    for _ in range(n_terms):
        mi = random_monomial(lattice, int(rng.choice(degrees)), rng, max_mode)
        if mi in terms:
            continue
        c = complex(rng.standard_normal(), rng.standard_normal())
        if conj_symmetric:
            partner = mi.swapped()
            if partner == mi:
                c = complex(c.real)
            terms[mi] = c
            terms[partner] = complex(np.conj(c))
        else:
            terms[mi] = c
    polynomial = Polynomial(lattice, {mi: Coefficient(c) for mi, c in terms.items()}, provenance="sampled")
    return polynomial


def _random_frame(mi: MultiIndexPair, rng: np.random.Generator) -> MultiIndexPair:
    l0 = {j: int(rng.integers(0, lj + 1)) for j, lj in mi.l.items()}
    k0 = {j: int(rng.integers(0, kj + 1)) for j, kj in mi.k.items()}
    return MultiIndexPair.from_maps(l0, k0)


def _ledger_pair(mi: MultiIndexPair, budget: float, rng: np.random.Generator
                 ) -> Optional[Tuple[LedgerEntry, LedgerEntry]]:
    i = momentum(mi)
    for _ in range(16):
        frame = _random_frame(mi, rng)
        i0 = int(rng.integers(-3, 4)) + i
        envelope = max(japanese(i0), japanese(i0 - 2 * i))
        weight = momentum(frame) - i0 / 2.0
        if weight == 0:
            continue
        phase = np.exp(2j * np.pi * rng.random())
        entry = LedgerEntry(frame, i0, complex(budget * phase / envelope))
        partner = entry.partner(mi, i)
        return entry, partner
    return None


def random_structured_polynomial(lattice: LatticeConfig, degree: int, n_terms: int, beta: float, C: float,
                                 rng: np.random.Generator, max_mode: Optional[int] = None) -> Polynomial:
    """
    Random homogeneous conj-symmetric polynomial meeting the (beta, theta) semi-bound with constant C

    theta=0 terms carry a one-entry ledger (two entries on self-conjugate
    monomials), theta=1 terms a factored tilde.
    """
    terms: Dict[MultiIndexPair, Coefficient] = {}
    for _ in range(n_terms):
        mi = random_monomial(lattice, degree, rng, max_mode)
        partner_mi = mi.swapped()
        if mi in terms or partner_mi in terms:
            continue
        i = momentum(mi)
        budget = C ** (degree - 2) / float(japanese(i)) ** beta * float(rng.uniform(0.1, 1.0))
        if lattice.theta == 1:
            tilde = budget * np.exp(2j * np.pi * rng.random())
            if partner_mi == mi:
                tilde = complex(tilde.real)
            weight = factored_weight(mi)
            terms[mi] = Coefficient(complex(tilde * weight), None, complex(tilde))
            terms[partner_mi] = Coefficient(complex(np.conj(tilde) * weight), None, complex(np.conj(tilde)))
            continue
        if partner_mi == mi:
            pair = _ledger_pair(mi, budget / 2.0, rng)
            if pair is None:
                continue
            entry, partner = pair
            if partner.key() == entry.key():
                entry = LedgerEntry(entry.frame, entry.i0, complex(2.0 * entry.inner.real))
                ledger = (entry,)
            else:
                ledger = tuple(sorted((entry, partner), key=lambda e: e.key()))
            scalar = sum(e.value for e in ledger)
            if scalar == 0:
                continue
            terms[mi] = Coefficient(complex(scalar), ledger)
            continue
        pair = _ledger_pair(mi, budget, rng)
        if pair is None:
            continue
        entry, partner = pair
        terms[mi] = Coefficient(entry.value, (entry,))
        terms[partner_mi] = Coefficient(partner.value, (partner,))
    return Polynomial(lattice, terms, provenance="sampled")
