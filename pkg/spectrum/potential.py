"""
Sampled potentials and the linear frequencies they induce
"""
from typing import Dict, Mapping, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from polynomial.lattice import LatticeConfig, japanese


class Potential(BaseModel):
    """Rescaled Fourier data v_j = V_j <j>^m of the convolution potential"""
    model_config = ConfigDict(frozen=True)

    theta: int = Field(..., ge=0, le=1)
    m: float = Field(..., gt=0.5, description="Decay exponent of the potential's Fourier data")
    J: int = Field(..., ge=1)
    v: Dict[int, float] = Field(default_factory=dict, description="mode -> v_j in [-1/2, 1/2]")
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _check_symmetry(self):
        for j, value in self.v.items():
            if abs(value) > 0.5:
                raise ValueError(f"v_{j}={value} outside [-1/2, 1/2]")
            if abs(j) > self.J:
                raise ValueError(f"v_{j} outside the lattice |j| <= {self.J}")
        if self.theta == 0:
            for j, value in self.v.items():
                if self.v.get(-j, 0.0) != value:
                    raise ValueError(f"theta=0 needs v_j = v_-j (mode {j})")
        elif self.v.get(0, 0.0) != 0.0:
            raise ValueError("theta=1 needs v_0 = 0")
        return self

    @classmethod
    def zero(cls, theta: int, m: float, J: int) -> "Potential":
        return cls(theta=theta, m=m, J=J, v={})

    def value(self, j: int) -> float:
        return self.v.get(j, 0.0)


class FrequencyVector(BaseModel):
    """Linear frequencies omega_j of H0 = sum omega_j |u_j|^2"""
    model_config = ConfigDict(frozen=True)

    theta: int = Field(..., ge=0, le=1)
    omega: Dict[int, float]

    @model_validator(mode="after")
    def _finite(self):
        if not all(np.isfinite(list(self.omega.values()))):
            raise ValueError("frequencies must be finite")
        return self

    @classmethod
    def from_mapping(cls, theta: int, omega: Mapping[int, float]) -> "FrequencyVector":
        return cls(theta=theta, omega={int(j): float(w) for j, w in omega.items()})

    def __getitem__(self, j: int) -> float:
        return self.omega[j]

    def array(self, lattice: LatticeConfig) -> np.ndarray:
        return np.array([self.omega[j] for j in lattice.modes], dtype=float)

    def max_abs(self) -> float:
        return max((abs(w) for w in self.omega.values()), default=0.0)


def sample_potential(theta: int, m: float, J: int, seed: int, include_zero: bool = False) -> Potential:
    """
    v_j i.i.d. uniform on [-1/2, 1/2] from a seeded generator

    Args:
        theta: 0 draws j >= 0 and mirrors, 1 draws every nonzero mode independently
        m: Decay exponent (> 1/2)
        J: Lattice cutoff
        seed: Generator seed
        include_zero: Draw v_0 as well (theta=0 only)

    Returns:
        Potential
    """
    v = draw_potential_values(np.random.default_rng(seed), theta, J, include_zero)
    return Potential(theta=theta, m=m, J=J, v=v, seed=seed)


def draw_potential_values(rng: np.random.Generator, theta: int, J: int, include_zero: bool = False) -> Dict[int, float]:
    """One potential's v_j from rng; the draw order is fixed so seeds reproduce"""
    v: Dict[int, float] = {}
    if theta == 0:
        draws = rng.uniform(-0.5, 0.5, size=J + 1)
        for j in range(0 if include_zero else 1, J + 1):
            v[j] = float(draws[j])
            v[-j] = float(draws[j])
    else:
        draws = rng.uniform(-0.5, 0.5, size=2 * J)
        modes = list(range(-J, 0)) + list(range(1, J + 1))
        for j, value in zip(modes, draws):
            v[j] = float(value)
    return v


def frequency_of(theta: int, j: int, v_j: float, m: float) -> float:
    if theta == 0:
        return -j * j + v_j / float(japanese(j)) ** m
    return float(np.sign(j)) * (-j * j + v_j / abs(j) ** m)


def frequencies(pot: Potential, lattice: Optional[LatticeConfig] = None) -> FrequencyVector:
    """
    theta=0: omega_j = -j^2 + v_j / <j>^m
    theta=1: omega_j = sgn(j) (-j^2 + v_j / |j|^m)
    """
    lattice = lattice or LatticeConfig(theta=pot.theta, J=pot.J, include_zero=0 in pot.v)
    omega = {j: frequency_of(pot.theta, j, pot.value(j), pot.m) for j in lattice.modes}
    return FrequencyVector(theta=pot.theta, omega=omega)
