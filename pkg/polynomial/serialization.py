"""
JSON-lines codec for polynomials, one term per line in canonical order
"""
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from helper.artifacts import read_jsonl, write_jsonl
from polynomial.coefficients import Coefficient, LedgerEntry
from polynomial.lattice import LatticeConfig
from polynomial.multi_index import MultiIndexPair
from polynomial.polynomial import Polynomial

Pairs = List[Tuple[int, int]]


def _pairs(exponents: Dict[int, int]) -> Pairs:
    return [(j, e) for j, e in sorted(exponents.items())]


def _exponent_map(pairs: Pairs) -> Dict[int, int]:
    return {int(j): int(e) for j, e in pairs}


class TermRecord(BaseModel):
    """Serialized monomial with its coefficient and optional structure"""
    l: Pairs = Field(default_factory=list)
    k: Pairs = Field(default_factory=list)
    re: float
    im: float
    ledger: Optional[List[Tuple[Pairs, Pairs, int, float, float]]] = None
    tilde: Optional[Tuple[float, float]] = None

    @classmethod
    def from_term(cls, mi: MultiIndexPair, coeff: Coefficient) -> "TermRecord":
        ledger = None
        if coeff.ledger is not None:
            ledger = [(_pairs(e.frame.l), _pairs(e.frame.k), e.i0, e.inner.real, e.inner.imag)
                      for e in coeff.ledger]
        tilde = None if coeff.tilde is None else (coeff.tilde.real, coeff.tilde.imag)
        return cls(l=_pairs(mi.l), k=_pairs(mi.k), re=coeff.scalar.real, im=coeff.scalar.imag,
                   ledger=ledger, tilde=tilde)

    def to_term(self) -> Tuple[MultiIndexPair, Coefficient]:
        mi = MultiIndexPair.from_maps(_exponent_map(self.l), _exponent_map(self.k))
        ledger = None
        if self.ledger is not None:
            ledger = tuple(
                LedgerEntry(MultiIndexPair.from_maps(_exponent_map(l0), _exponent_map(k0)), int(i0), complex(re, im))
                for l0, k0, i0, re, im in self.ledger
            )
        tilde = None if self.tilde is None else complex(*self.tilde)
        return mi, Coefficient(complex(self.re, self.im), ledger, tilde)


def polynomial_lines(poly: Polynomial) -> List[str]:
    return [TermRecord.from_term(mi, coeff).model_dump_json() for mi, coeff in poly.items()]


def write_polynomial(path: str, poly: Polynomial, header: Dict[str, Any]) -> str:
    """Write poly as JSON lines; the header records the lattice and provenance"""
    full_header = dict(header)
    full_header["lattice"] = poly.lattice.model_dump()
    full_header["provenance"] = poly.provenance
    full_header["structure"] = poly.structure
    return write_jsonl(path, polynomial_lines(poly), full_header)


def read_polynomial(path: str) -> Tuple[Polynomial, Dict[str, Any]]:
    header, lines = read_jsonl(path)
    if "lattice" not in header:
        raise ValueError(f"{path}: header does not record a lattice")
    lattice = LatticeConfig(**header["lattice"])
    terms = dict(TermRecord.model_validate_json(line).to_term() for line in lines)
    return Polynomial(lattice, terms, provenance=header.get("provenance", "loaded")), header
