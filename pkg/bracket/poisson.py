"""
Poisson brackets under w0/w1, ledger propagation through generator brackets,
and the specialized bracket with the squared Sobolev norm
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from helper.exceptions import LatticeMismatchError, MissingLedgerError
from polynomial.coefficients import Coefficient, TermAccumulator
from polynomial.lattice import LatticeConfig, japanese
from polynomial.multi_index import MultiIndexPair, bracket_monomial, momentum
from polynomial.polynomial import Polynomial
from bracket.symplectic import SymplecticForm, resolve_form


@dataclass
class BracketStats:
    """Counters shared by a chain of brackets"""
    pairs: int = 0
    skipped_over_degree: int = 0

    def merge(self, other: "BracketStats") -> None:
        self.pairs += other.pairs
        self.skipped_over_degree += other.skipped_over_degree


_IndexedTerm = Tuple[MultiIndexPair, complex, int, int, int]


def _index_by_mode(g: Polynomial) -> Dict[int, List[_IndexedTerm]]:
    """mode -> [(term, scalar, L_j, K_j, degree)] in canonical term order"""
    index: Dict[int, List[_IndexedTerm]] = {}
    for mi, coeff in g.items():
        degree = mi.degree
        for j, lj, kj in mi.triples:
            index.setdefault(j, []).append((mi, coeff.scalar, lj, kj, degree))
    return index


def _check_lattices(f: Polynomial, g: Polynomial) -> LatticeConfig:
    if f.lattice != g.lattice:
        raise LatticeMismatchError(f"{f.lattice} vs {g.lattice}")
    return f.lattice


def poisson(f: Polynomial, g: Polynomial, form: Optional[SymplecticForm] = None,
            max_degree: Optional[int] = None, stats: Optional[BracketStats] = None) -> Polynomial:
    """
    {f, g} = i sum_j sgn^theta(j) (df/du_j dg/dubar_j - df/dubar_j dg/du_j)

    Args:
        f: Left polynomial
        g: Right polynomial
        form: Symplectic form (None uses the lattice's theta)
        max_degree: Skip contributions whose output degree exceeds this
        stats: Optional counters updated in place

    Returns:
        The bracket in scalar mode (factored tildes are derived on theta=1 lattices)
    """
    lattice = _check_lattices(f, g)
    form = resolve_form(lattice, form)
    stats = stats if stats is not None else BracketStats()
    acc = TermAccumulator()
    index = _index_by_mode(g)
    for mi_f, cf in f.items():
        deg_f = mi_f.degree
        for j, lj, kj in mi_f.triples:
            bucket = index.get(j)
            if not bucket:
                continue
            w = form.weight(j)
            for mi_g, sg, gl, gk, deg_g in bucket:
                factor = lj * gk - kj * gl
                if factor == 0:
                    continue
                if max_degree is not None and deg_f + deg_g - 2 > max_degree:
                    stats.skipped_over_degree += 1
                    continue
                stats.pairs += 1
                acc.add_scalar(bracket_monomial(mi_f.triples, mi_g.triples, j), 1j * w * factor * cf.scalar * sg)
    return Polynomial.from_accumulator(lattice, acc, provenance="poisson")


def _shift_frame(frame: MultiIndexPair, generator: MultiIndexPair, j: int) -> MultiIndexPair:
    """(l0 + L - e_j, k0 + K - e_j)"""
    return bracket_monomial(frame.triples, generator.triples, j)


def poisson_with_generator(f: Polynomial, S: Polynomial, max_degree: Optional[int] = None,
                           stats: Optional[BracketStats] = None) -> Polynomial:
    """
    {f, S} with the ledger of every output term built from f's ledgers.

    For a contribution at mode j of f-term (l,k) and S-term (L,K) with
    momentum i2, each entry (l0,k0,i0,c) of f yields
      from l_j K_j:  (l0,k0,i0) if l0_j = 0, else (l0+L-e_j, k0+K-e_j, i0+2 i2)
      from k_j L_j:  (l0,k0,i0) if k0_j < k_j, else the same shifted frame
    scaled by i l_j K_j s and -i k_j L_j s. Both maps keep the weight
    M(l0,k0) - i0/2, so the ledger still sums to the scalar coefficient.

    On theta=1 lattices the factored form is always derivable and this is
    the plain bracket.
    """
    lattice = _check_lattices(f, S)
    if lattice.theta == 1:
        return poisson(f, S, SymplecticForm(theta=1), max_degree, stats)
    stats = stats if stats is not None else BracketStats()
    acc = TermAccumulator()
    index = _index_by_mode(S)
    momenta = {mi: momentum(mi) for mi in S}
    for mi_f, cf in f.items():
        if cf.ledger is None:
            raise MissingLedgerError(f"term {mi_f} of the left argument")
        deg_f = mi_f.degree
        for j, lj, kj in mi_f.triples:
            for mi_s, s, gl, gk, deg_s in index.get(j, ()):
                d1 = lj * gk
                d2 = kj * gl
                if d1 == 0 and d2 == 0:
                    continue
                if max_degree is not None and deg_f + deg_s - 2 > max_degree:
                    stats.skipped_over_degree += 1
                    continue
                stats.pairs += 1
                shift_i = 2 * momenta[mi_s]
                entries = []
                for entry in cf.ledger:
                    shifted = None
                    if d1:
                        inner = 1j * d1 * s * entry.inner
                        if entry.frame.l_of(j) == 0:
                            entries.append((entry.frame, entry.i0, inner))
                        else:
                            shifted = _shift_frame(entry.frame, mi_s, j)
                            entries.append((shifted, entry.i0 + shift_i, inner))
                    if d2:
                        inner = -1j * d2 * s * entry.inner
                        if entry.frame.k_of(j) < kj:
                            entries.append((entry.frame, entry.i0, inner))
                        else:
                            shifted = shifted or _shift_frame(entry.frame, mi_s, j)
                            entries.append((shifted, entry.i0 + shift_i, inner))
                value = 1j * (d1 - d2) * cf.scalar * s
                acc.add_structured(bracket_monomial(mi_f.triples, mi_s.triples, j), value, entries)
    return Polynomial.from_accumulator(lattice, acc, provenance="poisson_with_generator")


def sobolev_factor(mi: MultiIndexPair, p: float, form: SymplecticForm) -> complex:
    """
    i sum_j sgn^theta(j) (l_j - k_j) <j>^{2p}, summed per |j| first so
    mirror-balanced terms cancel exactly
    """
    by_size: Dict[int, int] = {}
    for j, lj, kj in mi.triples:
        by_size[abs(j)] = by_size.get(abs(j), 0) + form.weight(j) * (lj - kj)
    total = 0.0
    for size in sorted(by_size):
        if by_size[size]:
            total += by_size[size] * float(japanese(size)) ** (2 * p)
    return 1j * total


def bracket_with_sobolev_sq(f: Polynomial, p: float, form: Optional[SymplecticForm] = None) -> Polynomial:
    """{f, ||u||_p^2} without building the quadratic form; structure scales along"""
    form = resolve_form(f.lattice, form)
    terms: Dict[MultiIndexPair, Coefficient] = {}
    for mi, coeff in f.items():
        factor = sobolev_factor(mi, p, form)
        if factor != 0:
            terms[mi] = coeff.scaled(factor)
    return Polynomial(f.lattice, terms, provenance="sobolev_bracket")


def sobolev_sq_polynomial(lattice: LatticeConfig, p: float) -> Polynomial:
    """||u||_p^2 = sum <j>^{2p} |u_j|^2 as an explicit polynomial"""
    return Polynomial.quadratic_form(lattice, {j: float(japanese(j)) ** (2 * p) for j in lattice.modes})


def momentum_polynomial(lattice: LatticeConfig) -> Polynomial:
    """sum_j j |u_j|^2"""
    return Polynomial.quadratic_form(lattice, {j: float(j) for j in lattice.modes})
