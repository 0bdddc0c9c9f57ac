"""
The two symplectic forms and Hamiltonian vector fields on the Fourier lattice
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from helper.exceptions import LatticeMismatchError
from polynomial.lattice import LatticeConfig, State
from polynomial.polynomial import Polynomial


class SymplecticForm(BaseModel):
    """w_theta = i sum_j sgn^theta(j) du_j ^ dubar_j"""
    model_config = ConfigDict(frozen=True)

    theta: int = Field(..., ge=0, le=1)

    @classmethod
    def of(cls, lattice: LatticeConfig) -> "SymplecticForm":
        return cls(theta=lattice.theta)

    def weight(self, j: int) -> int:
        if self.theta == 0:
            return 1
        if j == 0:
            raise LatticeMismatchError("mode 0 has no sign weight under w1")
        return 1 if j > 0 else -1

    def weights(self, lattice: LatticeConfig) -> np.ndarray:
        return np.array([self.weight(j) for j in lattice.modes], dtype=float)


def resolve_form(lattice: LatticeConfig, form: Optional[SymplecticForm]) -> SymplecticForm:
    form = form or SymplecticForm.of(lattice)
    if form.theta == 1 and lattice.include_zero:
        raise LatticeMismatchError("w1 needs a lattice without mode 0")
    return form


@dataclass(frozen=True)
class TangentVector:
    """Componentwise (du, dubar) over the lattice modes"""
    lattice: LatticeConfig
    du: np.ndarray
    dubar: np.ndarray

    def sobolev_norm(self, p: float) -> float:
        """sqrt(sum <j>^{2p} (|du_j|^2 + |dubar_j|^2))"""
        weights = self.lattice.japanese_array() ** (2 * p)
        return float(np.sqrt(np.sum(weights * (np.abs(self.du) ** 2 + np.abs(self.dubar) ** 2))))

    @property
    def is_real_slice(self) -> bool:
        return bool(np.allclose(self.dubar, np.conj(self.du), rtol=1e-12, atol=1e-300))


def vector_field_array(f: Polynomial, form: SymplecticForm, u: np.ndarray) -> np.ndarray:
    """du_j = -i sgn^theta(j) df/dubar_j at u, as a bare array"""
    return -1j * form.weights(f.lattice) * f.compiled().grad_ubar(u)


def hamiltonian_vector_field(f: Polynomial, form: Optional[SymplecticForm], s: State) -> TangentVector:
    """
    X_f = J_theta grad f evaluated at s

    Args:
        f: Hamiltonian polynomial
        form: Symplectic form (None uses the lattice's theta)
        s: State on f's lattice

    Returns:
        TangentVector with du = -i w df/dubar and dubar = +i w df/du
    """
    if s.lattice != f.lattice:
        raise LatticeMismatchError("state and polynomial live on different lattices")
    form = resolve_form(f.lattice, form)
    weights = form.weights(f.lattice)
    compiled = f.compiled()
    du = -1j * weights * compiled.grad_ubar(s.u)
    dubar = 1j * weights * compiled.grad_u(s.u)
    return TangentVector(f.lattice, du, dubar)


def quadratic_hamiltonian(lattice: LatticeConfig, omega) -> Polynomial:
    """H0 = sum_j omega_j |u_j|^2 for a mode -> frequency mapping"""
    return Polynomial.quadratic_form(lattice, {j: float(omega[j]) for j in lattice.modes})
