"""
Compiled numpy evaluation of polynomials and their gradients
"""
from typing import Tuple

import numpy as np

# cap on the (states x terms x modes) temporaries of batched evaluation
_BLOCK_ELEMENTS = 1 << 22


def _monomials(U: np.ndarray, L: np.ndarray, K: np.ndarray) -> np.ndarray:
    """
    prod_j u_j^L ubar_j^K for every state row of U and exponent row of (L, K)

    0^0 = 1 is enforced by masking zero exponents. Returns (n_states, n_terms).
    """
    if L.shape[0] == 0:
        return np.zeros((U.shape[0], 0), dtype=complex)
    Ubar = np.conj(U)
    up = np.where(L[None] > 0, U[:, None, :] ** L[None], 1.0)
    dn = np.where(K[None] > 0, Ubar[:, None, :] ** K[None], 1.0)
    return np.prod(up * dn, axis=2)


def _blocks(n_states: int, n_terms: int, size: int):
    step = max(1, _BLOCK_ELEMENTS // max(1, n_terms * size))
    for start in range(0, n_states, step):
        yield slice(start, min(n_states, start + step))


class _DerivativeTable:
    """Terms of d/du_j (or d/dubar_j) for all j, scattered back by target column"""

    __slots__ = ("coeffs", "L", "K", "targets", "scatter")

    def __init__(self, coeffs: np.ndarray, L: np.ndarray, K: np.ndarray, wrt_conj: bool):
        E = K if wrt_conj else L
        rows, cols = np.nonzero(E)
        self.coeffs = coeffs[rows] * E[rows, cols]
        self.L = L[rows].copy()
        self.K = K[rows].copy()
        if wrt_conj:
            self.K[np.arange(len(rows)), cols] -= 1
        else:
            self.L[np.arange(len(rows)), cols] -= 1
        self.targets = cols
        # (derivative terms x modes) 0/1 matrix summing terms into their columns
        self.scatter = np.zeros((len(rows), L.shape[1]))
        self.scatter[np.arange(len(rows)), cols] = 1.0

    def evaluate(self, U: np.ndarray) -> np.ndarray:
        """Rows of U are states; returns (n_states, n_modes)"""
        out = np.zeros((U.shape[0], self.scatter.shape[1]), dtype=complex)
        if self.targets.size == 0:
            return out
        for block in _blocks(U.shape[0], self.L.shape[0], self.L.shape[1]):
            out[block] = (_monomials(U[block], self.L, self.K) * self.coeffs[None, :]) @ self.scatter
        return out


class CompiledPolynomial:
    """
    Dense exponent matrices for fast evaluation on states.

    Rows follow the polynomial's canonical term order and columns the
    lattice mode order, so results are reproducible.
    """

    def __init__(self, poly):
        lattice = poly.lattice
        self.size = lattice.size
        n = len(poly)
        self.coeffs = np.zeros(n, dtype=complex)
        self.L = np.zeros((n, self.size), dtype=np.int64)
        self.K = np.zeros((n, self.size), dtype=np.int64)
        for row, (mi, coeff) in enumerate(poly.items()):
            self.coeffs[row] = coeff.scalar
            for j, lj, kj in mi.triples:
                col = lattice.index_of(j)
                self.L[row, col] = lj
                self.K[row, col] = kj
        self._du = None
        self._dubar = None

    @property
    def du_table(self) -> _DerivativeTable:
        if self._du is None:
            self._du = _DerivativeTable(self.coeffs, self.L, self.K, wrt_conj=False)
        return self._du

    @property
    def dubar_table(self) -> _DerivativeTable:
        if self._dubar is None:
            self._dubar = _DerivativeTable(self.coeffs, self.L, self.K, wrt_conj=True)
        return self._dubar

    def value_many(self, U: np.ndarray) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=complex))
        out = np.zeros(U.shape[0], dtype=complex)
        if self.coeffs.size == 0:
            return out
        for block in _blocks(U.shape[0], self.coeffs.size, self.size):
            out[block] = _monomials(U[block], self.L, self.K) @ self.coeffs
        return out

    def value(self, u: np.ndarray) -> complex:
        return complex(self.value_many(u[None, :])[0])

    def grad_u_many(self, U: np.ndarray) -> np.ndarray:
        return self.du_table.evaluate(np.atleast_2d(np.asarray(U, dtype=complex)))

    def grad_ubar_many(self, U: np.ndarray) -> np.ndarray:
        return self.dubar_table.evaluate(np.atleast_2d(np.asarray(U, dtype=complex)))

    def grad_u(self, u: np.ndarray) -> np.ndarray:
        """(df/du_j)_j with ubar treated as independent"""
        return self.grad_u_many(u[None, :])[0]

    def grad_ubar(self, u: np.ndarray) -> np.ndarray:
        """(df/dubar_j)_j with u treated as independent"""
        return self.grad_ubar_many(u[None, :])[0]

    def gradients(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self.grad_u(u), self.grad_ubar(u)
