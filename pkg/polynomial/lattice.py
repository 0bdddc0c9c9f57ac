"""
Galerkin lattice of Fourier modes, dense states and Sobolev norms
"""
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


def japanese(j: int) -> int:
    """<j> = max(1, |j|)"""
    return max(1, abs(j))


class LatticeConfig(BaseModel):
    """Modes |j| <= J, with j = 0 allowed only for the w0 form"""
    model_config = ConfigDict(frozen=True)

    theta: int = Field(..., ge=0, le=1, description="Symplectic-form selector (0 or 1)")
    J: int = Field(..., ge=1, description="Galerkin cutoff, modes |j| <= J")
    include_zero: bool = Field(False, description="Whether mode 0 is present (theta=0 only)")

    @model_validator(mode="after")
    def _zero_mode_needs_w0(self):
        if self.theta == 1 and self.include_zero:
            raise ValueError("include_zero requires theta=0 (mode 0 is excluded when theta=1)")
        return self

    @property
    def modes(self) -> Tuple[int, ...]:
        negative = tuple(range(-self.J, 0))
        positive = tuple(range(1, self.J + 1))
        return negative + ((0,) if self.include_zero else ()) + positive

    @property
    def size(self) -> int:
        return 2 * self.J + (1 if self.include_zero else 0)

    def contains(self, j: int) -> bool:
        if j == 0:
            return self.include_zero
        return abs(j) <= self.J

    def index_of(self, j: int) -> int:
        if not self.contains(j):
            raise KeyError(f"mode {j} is outside the lattice")
        if j < 0 or self.include_zero:
            return j + self.J
        return j + self.J - 1

    def weight(self, j: int) -> int:
        """sgn^theta(j), with sgn^0 = 1"""
        if self.theta == 0:
            return 1
        return 1 if j > 0 else -1

    def weights(self) -> np.ndarray:
        return np.array([self.weight(j) for j in self.modes], dtype=float)

    def japanese_array(self) -> np.ndarray:
        return np.array([japanese(j) for j in self.modes], dtype=float)

    def mode_array(self) -> np.ndarray:
        return np.array(self.modes, dtype=float)


class State:
    """Dense complex amplitudes u_j over the lattice; ubar is always conj(u)"""

    __slots__ = ("lattice", "u")

    def __init__(self, lattice: LatticeConfig, u):
        values = np.array(u, dtype=complex).reshape(-1)
        if values.shape[0] != lattice.size:
            raise ValueError(f"state has {values.shape[0]} entries, lattice needs {lattice.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("state entries must be finite")
        values.setflags(write=False)
        self.lattice = lattice
        self.u = values

    @classmethod
    def zeros(cls, lattice: LatticeConfig) -> "State":
        return cls(lattice, np.zeros(lattice.size, dtype=complex))

    @classmethod
    def from_modes(cls, lattice: LatticeConfig, amplitudes: Mapping[int, complex]) -> "State":
        u = np.zeros(lattice.size, dtype=complex)
        for j, value in amplitudes.items():
            u[lattice.index_of(j)] = value
        return cls(lattice, u)

    def __getitem__(self, j: int) -> complex:
        return complex(self.u[self.lattice.index_of(j)])

    @property
    def ubar(self) -> np.ndarray:
        return np.conj(self.u)

    def as_dict(self) -> Dict[int, complex]:
        return {j: complex(v) for j, v in zip(self.lattice.modes, self.u) if v != 0}

    def scaled(self, factor: float) -> "State":
        return State(self.lattice, self.u * factor)

    def __add__(self, other: "State") -> "State":
        return State(self.lattice, self.u + other.u)

    def __sub__(self, other: "State") -> "State":
        return State(self.lattice, self.u - other.u)

    def __repr__(self) -> str:
        return f"State(J={self.lattice.J}, theta={self.lattice.theta}, |u|={np.linalg.norm(self.u):.3e})"


def sobolev_norm_sq(s: State, p: float) -> float:
    """sum_j <j>^{2p} |u_j|^2"""
    if p < 0:
        raise ValueError("Sobolev index p must be nonnegative")
    weights = s.lattice.japanese_array() ** (2 * p)
    return float(np.sum(weights * np.abs(s.u) ** 2))


def sobolev_norm(s: State, p: float) -> float:
    return float(np.sqrt(sobolev_norm_sq(s, p)))


def momentum_functional(s: State) -> float:
    """sum_j j |u_j|^2"""
    return float(np.sum(s.lattice.mode_array() * np.abs(s.u) ** 2))


def _mask(s: State, N: int, tail: bool) -> State:
    if N < 0 or N > s.lattice.J:
        raise ValueError(f"projection index N={N} outside [0, {s.lattice.J}]")
    high = np.abs(s.lattice.mode_array()) > N
    keep = high if tail else ~high
    return State(s.lattice, np.where(keep, s.u, 0.0))


def project_tail(s: State, N: int) -> State:
    """Gamma_{>N}: keep modes |j| > N"""
    return _mask(s, N, tail=True)


def project_head(s: State, N: int) -> State:
    """Gamma_{<=N}: keep modes |j| <= N"""
    return _mask(s, N, tail=False)


def scale_to_norm(s: State, target: float, p: float) -> State:
    norm = sobolev_norm(s, p)
    if norm == 0.0:
        raise ValueError("cannot rescale the zero state")
    return s.scaled(target / norm)


def lattice_constant(lattice: LatticeConfig) -> float:
    """c = sqrt(sum_j <j>^{-2}) over the finite lattice"""
    return float(np.sqrt(np.sum(lattice.japanese_array() ** -2.0)))


def same_lattice(a: LatticeConfig, b: Optional[LatticeConfig]) -> bool:
    return b is not None and a == b
