"""
Small divisors, the resonance test and the normal-form projector
"""
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse

from polynomial.lattice import LatticeConfig
from polynomial.multi_index import MultiIndexPair
from polynomial.polynomial import Polynomial
from spectrum.potential import FrequencyVector


class ResonanceParams(BaseModel):
    """(gamma, alpha, N) of the non-resonance condition"""
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., ge=0.0)
    alpha: float = Field(..., gt=0.0)
    N: int = Field(..., ge=1)


def _sign_weight(j: int, theta: int) -> int:
    if theta == 0:
        return 1
    return 1 if j > 0 else -1


def small_divisor(omega: FrequencyVector, mi: MultiIndexPair, theta: int) -> float:
    """<omega, I_theta (l - k)> = sum_j omega_j sgn^theta(j) (l_j - k_j)"""
    return float(sum(omega[j] * _sign_weight(j, theta) * (lj - kj) for j, lj, kj in mi.triples))


def M_lk(mi: MultiIndexPair, N: int) -> int:
    """max(N, |j| over the support of (l,k))"""
    return max([N] + [abs(j) for j in mi.support])


def resonance_threshold(mi: MultiIndexPair, params: ResonanceParams) -> float:
    return params.gamma * M_lk(mi, params.N) / params.N ** params.alpha


def is_resonant_term(omega: FrequencyVector, mi: MultiIndexPair, params: ResonanceParams, theta: int) -> bool:
    """|divisor| <= gamma M_lk / N^alpha, the boundary counting as resonant"""
    return abs(small_divisor(omega, mi, theta)) <= resonance_threshold(mi, params)


def nf_projector(f: Polynomial, omega: FrequencyVector, params: ResonanceParams,
                 theta: int) -> Tuple[Polynomial, Polynomial]:
    """Split f into (resonant, nonresonant) parts; coefficients and structure are kept"""
    resonant = f.filter(lambda mi, _: is_resonant_term(omega, mi, params, theta))
    nonresonant = f.filter(lambda mi, _: not is_resonant_term(omega, mi, params, theta))
    return resonant, nonresonant


def divisor_matrix(indices: Sequence[MultiIndexPair], lattice: LatticeConfig) -> sparse.csr_matrix:
    """Rows sgn^theta(j) (l_j - k_j) over lattice columns, so divisors = A @ omega"""
    rows: List[int] = []
    cols: List[int] = []
    vals: List[float] = []
    for row, mi in enumerate(indices):
        for j, lj, kj in mi.triples:
            if lj != kj:
                rows.append(row)
                cols.append(lattice.index_of(j))
                vals.append(float(_sign_weight(j, lattice.theta) * (lj - kj)))
    return sparse.csr_matrix((vals, (rows, cols)), shape=(len(indices), lattice.size))


def thresholds(indices: Sequence[MultiIndexPair], params: ResonanceParams) -> np.ndarray:
    return np.array([resonance_threshold(mi, params) for mi in indices], dtype=float)


def classify_term(mi: MultiIndexPair, N: int, theta: int) -> str:
    """
    Normal-form term class.

    'A': fewer than two tail units and theta-diagonal (theta=1: l=k,
    theta=0: l_j + l_-j = k_j + k_-j); 'B': two tail units with
    l_j0 = k_j0 = 1 for some |j0| > N; 'C': two tail units with
    l_-j0 = k_j0 = 1; anything else is 'other'.
    """
    n_tail = mi.tail_units(N)
    if n_tail < 2:
        if theta == 1 and mi.is_diagonal():
            return "A"
        if theta == 0:
            net: Dict[int, int] = {}
            for j, lj, kj in mi.triples:
                net[abs(j)] = net.get(abs(j), 0) + lj - kj
            if not any(net.values()):
                return "A"
        return "other"
    if n_tail == 2:
        tail = {j: (lj, kj) for j, lj, kj in mi.triples if abs(j) > N}
        for j, (lj, kj) in tail.items():
            if lj == 1 and kj == 1:
                return "B"
        for j, (lj, kj) in tail.items():
            if kj == 1 and tail.get(-j, (0, 0))[0] == 1:
                return "C"
    return "other"


def class_counts(f: Polynomial, N: int, theta: int) -> Dict[str, int]:
    counts = {"A": 0, "B": 0, "C": 0, "other": 0}
    for mi in f:
        counts[classify_term(mi, N, theta)] += 1
    return counts
