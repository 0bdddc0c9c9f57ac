"""
Polynomial nonlinearities F(x, psi, psibar) = sum c e^{i kappa x} psi^a psibar^b
"""
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

TermKey = Tuple[int, int, int]


class NonlinearTerm(BaseModel):
    a: int = Field(..., ge=0, description="Power of psi")
    b: int = Field(..., ge=0, description="Power of psibar")
    x_modes: List[Tuple[int, Tuple[float, float]]] = Field(
        ..., description="[kappa, [re, im]] pairs: the x-Fourier data of the coefficient")

    @model_validator(mode="after")
    def _degree(self):
        if self.a + self.b < 2:
            raise ValueError(f"term psi^{self.a} psibar^{self.b} has degree below 2")
        return self

    @field_validator("x_modes")
    @classmethod
    def _finite(cls, value):
        for kappa, (re, im) in value:
            if not (np.isfinite(re) and np.isfinite(im)):
                raise ValueError(f"non-finite coefficient at kappa={kappa}")
        return value


class NonlinearitySpec(BaseModel):
    """
    Finite sum of monomials with finitely many x-modes.

    Reality of F requires every (a, b, kappa, c) to be matched by
    (b, a, -kappa, conj c); validation names the first unpaired term.
    """
    terms: List[NonlinearTerm] = Field(default_factory=list)

    @model_validator(mode="after")
    def _reality(self):
        flat = self.flattened()
        for (a, b, kappa), c in sorted(flat.items()):
            partner = flat.get((b, a, -kappa), 0j)
            if abs(partner - np.conj(c)) > 1e-12 * max(abs(c), abs(partner)):
                raise ValueError(
                    f"unpaired term a={a} b={b} kappa={kappa} c={c}: needs a={b} b={a} kappa={-kappa} c={np.conj(c)}"
                )
        return self

    @classmethod
    def from_tuples(cls, items: List[Tuple[int, int, int, complex]]) -> "NonlinearitySpec":
        """Build from (a, b, kappa, c) tuples"""
        return cls(terms=[NonlinearTerm(a=a, b=b, x_modes=[(kappa, (complex(c).real, complex(c).imag))])
                          for a, b, kappa, c in items])

    def flattened(self) -> Dict[TermKey, complex]:
        """(a, b, kappa) -> summed coefficient, zero entries removed"""
        flat: Dict[TermKey, complex] = {}
        for term in self.terms:
            for kappa, (re, im) in term.x_modes:
                key = (term.a, term.b, int(kappa))
                flat[key] = flat.get(key, 0j) + complex(re, im)
        return {key: c for key, c in flat.items() if c != 0}

    @property
    def kmax(self) -> int:
        return max((abs(kappa) for (_, _, kappa) in self.flattened()), default=0)

    @property
    def max_degree(self) -> int:
        return max((a + b for (a, b, _) in self.flattened()), default=0)

    @property
    def x_independent(self) -> bool:
        return all(kappa == 0 for (_, _, kappa) in self.flattened())
