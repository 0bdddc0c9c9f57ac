"""
Sparse polynomials in (u, ubar) over a Galerkin lattice
"""
from types import MappingProxyType
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from helper.exceptions import LatticeMismatchError, UnstructuredCoefficientsError
from polynomial.coefficients import Coefficient, TermAccumulator, factored_weight
from polynomial.lattice import LatticeConfig, State, japanese
from polynomial.multi_index import MultiIndexPair, momentum


class Polynomial:
    """
    Immutable map MultiIndexPair -> Coefficient on a fixed lattice.

    Zero coefficients are never stored. Iteration follows the canonical key
    order (degree, then sorted mode triples), so every serialization and
    every reduction over terms is deterministic.
    """

    __slots__ = ("lattice", "_terms", "provenance", "_compiled")

    def __init__(self, lattice: LatticeConfig, terms: Optional[Mapping[MultiIndexPair, Coefficient]] = None,
                 provenance: str = "constructed"):
        ordered: Dict[MultiIndexPair, Coefficient] = {}
        for mi in sorted((terms or {}).keys()):
            coeff = terms[mi]
            if coeff.scalar == 0:
                continue
            if not mi.within(lattice):
                raise ValueError(f"term {mi} uses modes outside the lattice")
            ordered[mi] = coeff
        self.lattice = lattice
        self._terms = ordered
        self.provenance = provenance
        self._compiled = None

    # Construction

    @classmethod
    def zero(cls, lattice: LatticeConfig) -> "Polynomial":
        return cls(lattice, {})

    @classmethod
    def from_scalars(cls, lattice: LatticeConfig, terms: Mapping[MultiIndexPair, complex],
                     provenance: str = "constructed") -> "Polynomial":
        acc = TermAccumulator(rtol=0.0)
        for mi, value in terms.items():
            acc.add_scalar(mi, complex(value))
        return cls(lattice, dict(acc.items(derive_tilde=lattice.theta == 1)), provenance)

    @classmethod
    def from_accumulator(cls, lattice: LatticeConfig, acc: TermAccumulator,
                         provenance: str = "constructed") -> "Polynomial":
        return cls(lattice, dict(acc.items(derive_tilde=lattice.theta == 1)), provenance)

    @classmethod
    def quadratic_form(cls, lattice: LatticeConfig, weights: Mapping[int, float]) -> "Polynomial":
        """sum_j weights[j] |u_j|^2"""
        return cls.from_scalars(lattice, {MultiIndexPair(((j, 1, 1),)): w
                                          for j, w in weights.items() if lattice.contains(j) and w != 0},
                                provenance="quadratic")

    # Mapping-like access

    @property
    def terms(self) -> Mapping[MultiIndexPair, Coefficient]:
        return MappingProxyType(self._terms)

    def items(self) -> Iterable[Tuple[MultiIndexPair, Coefficient]]:
        return self._terms.items()

    def __iter__(self) -> Iterator[MultiIndexPair]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, mi: MultiIndexPair) -> bool:
        return mi in self._terms

    def coefficient(self, mi: MultiIndexPair) -> complex:
        coeff = self._terms.get(mi)
        return 0j if coeff is None else coeff.scalar

    def get(self, mi: MultiIndexPair) -> Optional[Coefficient]:
        return self._terms.get(mi)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def min_degree(self) -> Optional[int]:
        return next((mi.degree for mi in self._terms), None)

    @property
    def max_degree(self) -> Optional[int]:
        return max((mi.degree for mi in self._terms), default=None)

    def degrees(self) -> List[int]:
        return sorted({mi.degree for mi in self._terms})

    def momenta(self) -> List[int]:
        return sorted({momentum(mi) for mi in self._terms})

    @property
    def structure(self) -> str:
        """'ledger', 'factored', 'scalar', 'mixed' or 'empty'"""
        if not self._terms:
            return "empty"
        ledger = [c.ledger is not None for c in self._terms.values()]
        tilde = [c.tilde is not None for c in self._terms.values()]
        if all(ledger):
            return "ledger"
        if all(tilde):
            return "factored"
        if not any(ledger) and not any(tilde):
            return "scalar"
        return "mixed"

    @property
    def has_ledger(self) -> bool:
        return self.structure == "ledger"

    # Arithmetic

    def _check(self, other: "Polynomial") -> None:
        if self.lattice != other.lattice:
            raise LatticeMismatchError(f"{self.lattice} vs {other.lattice}")

    def combine(self, others: Iterable[Tuple["Polynomial", complex]], provenance: str = "sum") -> "Polynomial":
        """self + sum factor_i * other_i with structure merged per term"""
        acc = TermAccumulator()
        for mi, coeff in self._terms.items():
            acc.add(mi, coeff)
        for other, factor in others:
            self._check(other)
            for mi, coeff in other._terms.items():
                acc.add(mi, coeff, factor)
        return Polynomial(self.lattice, dict(acc.items()), provenance)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return self.combine([(other, 1.0)])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self.combine([(other, -1.0)], provenance="difference")

    def __neg__(self) -> "Polynomial":
        return self.scale(-1.0)

    def scale(self, factor: complex) -> "Polynomial":
        if factor == 0:
            return Polynomial.zero(self.lattice)
        return Polynomial(self.lattice, {mi: c.scaled(factor) for mi, c in self._terms.items()}, self.provenance)

    def __mul__(self, factor: complex) -> "Polynomial":
        return self.scale(factor)

    __rmul__ = __mul__

    def filter(self, keep: Callable[[MultiIndexPair, Coefficient], bool], provenance: Optional[str] = None) -> "Polynomial":
        return Polynomial(self.lattice, {mi: c for mi, c in self._terms.items() if keep(mi, c)},
                          provenance or self.provenance)

    def homogeneous(self, degree: int) -> "Polynomial":
        return self.filter(lambda mi, _: mi.degree == degree)

    def degree_range(self, low: Optional[int] = None, high: Optional[int] = None) -> "Polynomial":
        """Terms with low <= degree <= high (open ends allowed)"""
        return self.filter(lambda mi, _: (low is None or mi.degree >= low) and (high is None or mi.degree <= high))

    def truncate(self, max_degree: int) -> "Polynomial":
        return self.degree_range(high=max_degree)

    def scalar_only(self) -> "Polynomial":
        return Polynomial(self.lattice, {mi: c.scalar_only() for mi, c in self._terms.items()}, "scalar")

    def with_factored(self) -> "Polynomial":
        """Attach tilde = scalar / prod <j>^{(l_j+k_j)/2} to every term"""
        return Polynomial(self.lattice, {mi: Coefficient(c.scalar, c.ledger, c.scalar / factored_weight(mi))
                                         for mi, c in self._terms.items()}, self.provenance)

    # Comparison helpers

    def max_abs_difference(self, other: "Polynomial") -> float:
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        return max((abs(self.coefficient(mi) - other.coefficient(mi)) for mi in keys), default=0.0)

    def max_abs_coefficient(self) -> float:
        return max((abs(c.scalar) for c in self._terms.values()), default=0.0)

    def allclose(self, other: "Polynomial", rtol: float = 1e-10, atol: float = 0.0) -> bool:
        """Term-by-term |a - b| <= atol + rtol * max(|a|, |b|)"""
        self._check(other)
        for mi in set(self._terms) | set(other._terms):
            a, b = self.coefficient(mi), other.coefficient(mi)
            if abs(a - b) > atol + rtol * max(abs(a), abs(b)):
                return False
        return True

    # Evaluation

    def compiled(self):
        if self._compiled is None:
            from polynomial.evaluation import CompiledPolynomial
            self._compiled = CompiledPolynomial(self)
        return self._compiled

    def __call__(self, s: State) -> complex:
        if s.lattice != self.lattice:
            raise LatticeMismatchError("state and polynomial live on different lattices")
        return self.compiled().value(s.u)

    def __repr__(self) -> str:
        return f"Polynomial(terms={len(self)}, degrees={self.degrees()}, structure={self.structure})"


# Truncation operators

def _le2_predicate(N: int) -> Callable[[MultiIndexPair, Coefficient], bool]:
    return lambda mi, _: mi.tail_units(N) <= 2 and abs(momentum(mi)) <= N


def gamma_le2(f: Polynomial, N: int) -> Polynomial:
    """Keep terms with at most two exponent units on |j| > N and |M(l,k)| <= N"""
    if N < 1 or N > f.lattice.J:
        raise ValueError(f"truncation index N={N} outside [1, {f.lattice.J}]")
    return f.filter(_le2_predicate(N))


def gamma_gt2(f: Polynomial, N: int) -> Polynomial:
    """Exact complement of gamma_le2"""
    if N < 1 or N > f.lattice.J:
        raise ValueError(f"truncation index N={N} outside [1, {f.lattice.J}]")
    keep = _le2_predicate(N)
    return f.filter(lambda mi, c: not keep(mi, c))


# Symmetry and semi-bound checks

def conj_symmetry_check(f: Polynomial, tol: float = 1e-10) -> bool:
    """conj(f_{lk}) == f_{kl} for every term, relative to the larger of the pair"""
    return not conj_symmetry_defects(f, tol)


def conj_symmetry_defects(f: Polynomial, tol: float = 1e-10) -> List[MultiIndexPair]:
    defects = []
    for mi, coeff in f.items():
        partner = f.coefficient(mi.swapped())
        scale = max(abs(coeff.scalar), abs(partner))
        if abs(partner - np.conj(coeff.scalar)) > tol * scale:
            defects.append(mi)
    return defects


def ledger_conjugation_check(f: Polynomial, tol: float = 1e-10) -> bool:
    """
    Ledger-level conjugation law: each entry (l0,k0,i0,c) of term (l,k) at
    momentum i has the entry (k-k0, l-l0, i0-2i, conj c) in term (k,l).
    """
    if f.lattice.theta != 0:
        return True
    for mi, coeff in f.items():
        if coeff.ledger is None:
            raise UnstructuredCoefficientsError(f"term {mi} has no ledger")
        partner = f.get(mi.swapped())
        if partner is None or partner.ledger is None:
            return False
        lookup = {entry.key(): entry.inner for entry in partner.ledger}
        i = momentum(mi)
        for entry in coeff.ledger:
            expected = entry.partner(mi, i)
            found = lookup.get(expected.key())
            if found is None or abs(found - expected.inner) > tol * max(abs(found), abs(expected.inner)):
                return False
    return True


class SemiBoundViolation(BaseModel):
    term: str = Field(..., description="Monomial as text")
    degree: int
    momentum: int
    measured: float = Field(..., description="Ledger sum or |tilde|")
    allowed: float = Field(..., description="C^(t-2) / <i>^beta")


class SemiBoundReport(BaseModel):
    passed: bool
    beta: float
    C: float
    checked_terms: int
    violations: List[SemiBoundViolation] = Field(default_factory=list)
    min_margin: Optional[float] = Field(None, description="Smallest allowed - measured over terms")
    smallest_C: Optional[float] = Field(None, description="Least C making the bound hold at this beta")


def structured_magnitude(mi: MultiIndexPair, coeff: Coefficient, theta: int) -> float:
    """Quantity the semi-bound constrains for one term"""
    if theta == 0:
        if coeff.ledger is None:
            raise UnstructuredCoefficientsError(f"term {mi} has no ledger")
        return coeff.ledger_magnitude(momentum(mi))
    if coeff.tilde is None:
        raise UnstructuredCoefficientsError(f"term {mi} has no factored tilde")
    return abs(coeff.tilde)


def semi_bound_check(f: Polynomial, beta: float, C: float) -> SemiBoundReport:
    """
    Check the (beta, theta) semi-bound term by term.

    theta=0: sum |inner| max(<i0>, <i0 - 2i>) <= C^(t-2) / <i>^beta
    theta=1: |tilde| <= C^(t-2) / <i>^beta
    """
    theta = f.lattice.theta
    violations: List[SemiBoundViolation] = []
    margins: List[float] = []
    needed: List[float] = []
    for mi, coeff in f.items():
        measured = structured_magnitude(mi, coeff, theta)
        t = mi.degree
        i = momentum(mi)
        envelope = float(japanese(i)) ** beta
        allowed = C ** (t - 2) / envelope
        margins.append(allowed - measured)
        if t > 2:
            needed.append((measured * envelope) ** (1.0 / (t - 2)))
        elif measured * envelope > 1.0:
            needed.append(float("inf"))
        if measured > allowed:
            violations.append(SemiBoundViolation(term=str(mi), degree=t, momentum=i,
                                                 measured=measured, allowed=allowed))
    return SemiBoundReport(
        passed=not violations,
        beta=beta,
        C=C,
        checked_terms=len(f),
        violations=violations,
        min_margin=min(margins) if margins else None,
        smallest_C=max(needed) if needed else None,
    )
