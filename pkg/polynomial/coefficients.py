"""
Coefficients with optional structure: ledgers (w0 form) and factored tildes (w1 form)
"""
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from polynomial.multi_index import MultiIndexPair, momentum
from settings import settings


@dataclass(frozen=True, slots=True)
class LedgerEntry:
    """
    One summand inner * (M(l0,k0) - i0/2) of a structured coefficient.

    frame holds (l0, k0), which must sit inside the owning monomial.
    """
    frame: MultiIndexPair
    i0: int
    inner: complex

    @property
    def l0(self) -> Dict[int, int]:
        return self.frame.l

    @property
    def k0(self) -> Dict[int, int]:
        return self.frame.k

    @property
    def weight(self) -> float:
        return momentum(self.frame) - self.i0 / 2.0

    @property
    def value(self) -> complex:
        return self.inner * self.weight

    def key(self) -> Tuple[MultiIndexPair, int]:
        return self.frame, self.i0

    def partner(self, owner: MultiIndexPair, owner_momentum: int) -> "LedgerEntry":
        """Entry expected in the conjugate term (k,l): (k-k0, l-l0, i0-2i) with conj(inner)"""
        return LedgerEntry(owner.swapped().minus(self.frame.swapped()),
                           self.i0 - 2 * owner_momentum, complex(np.conj(self.inner)))


@dataclass(frozen=True, slots=True)
class Coefficient:
    scalar: complex
    ledger: Optional[Tuple[LedgerEntry, ...]] = None
    tilde: Optional[complex] = None

    @property
    def has_ledger(self) -> bool:
        return self.ledger is not None

    def ledger_scalar(self) -> complex:
        if self.ledger is None:
            raise ValueError("coefficient carries no ledger")
        return complex(sum(entry.value for entry in self.ledger))

    def ledger_magnitude(self, owner_momentum: int) -> float:
        """sum |inner| * max(<i0>, <i0 - 2i>), the quantity the semi-bound controls"""
        total = 0.0
        for entry in self.ledger or ():
            total += abs(entry.inner) * max(max(1, abs(entry.i0)), max(1, abs(entry.i0 - 2 * owner_momentum)))
        return total

    def scaled(self, factor: complex) -> "Coefficient":
        ledger = None
        if self.ledger is not None:
            ledger = tuple(LedgerEntry(e.frame, e.i0, e.inner * factor) for e in self.ledger)
        tilde = None if self.tilde is None else self.tilde * factor
        return Coefficient(self.scalar * factor, ledger, tilde)

    def scalar_only(self) -> "Coefficient":
        return Coefficient(self.scalar)

    def conjugate(self) -> "Coefficient":
        """Plain conjugate; ledger frames depend on the owner, so they are not carried"""
        tilde = None if self.tilde is None else complex(np.conj(self.tilde))
        return Coefficient(complex(np.conj(self.scalar)), None, tilde)


def factored_weight(mi: MultiIndexPair) -> float:
    """prod_j <j>^{(l_j + k_j)/2}"""
    total = 1.0
    for j, lj, kj in mi.triples:
        total *= max(1, abs(j)) ** ((lj + kj) / 2.0)
    return total


class _Slot:
    __slots__ = ("scalar", "magnitude", "ledger", "ledger_ok", "tilde", "tilde_ok")

    def __init__(self):
        self.scalar = 0j
        self.magnitude = 0.0
        self.ledger: Dict[Tuple[MultiIndexPair, int], complex] = {}
        self.ledger_ok = True
        self.tilde = 0j
        self.tilde_ok = True


class TermAccumulator:
    """
    Merges coefficient contributions per monomial.

    A merged scalar is dropped when it cancels to within CANCELLATION_RTOL of
    the summed magnitudes of its contributions. Ledgers survive only when every
    contribution to a monomial brought one; tildes likewise.
    """

    def __init__(self, rtol: Optional[float] = None):
        self.rtol = settings.CANCELLATION_RTOL if rtol is None else rtol
        self._slots: Dict[MultiIndexPair, _Slot] = {}

    def __len__(self) -> int:
        return len(self._slots)

    def _slot(self, mi: MultiIndexPair) -> _Slot:
        slot = self._slots.get(mi)
        if slot is None:
            slot = _Slot()
            self._slots[mi] = slot
        return slot

    def add_scalar(self, mi: MultiIndexPair, value: complex) -> None:
        slot = self._slot(mi)
        slot.scalar += value
        slot.magnitude += abs(value)
        slot.ledger_ok = False
        slot.tilde_ok = False

    def add(self, mi: MultiIndexPair, coeff: Coefficient, factor: complex = 1.0) -> None:
        slot = self._slot(mi)
        value = coeff.scalar * factor
        slot.scalar += value
        slot.magnitude += abs(value)
        if coeff.ledger is None:
            slot.ledger_ok = False
        elif slot.ledger_ok:
            for entry in coeff.ledger:
                key = entry.key()
                slot.ledger[key] = slot.ledger.get(key, 0j) + entry.inner * factor
        if coeff.tilde is None:
            slot.tilde_ok = False
        elif slot.tilde_ok:
            slot.tilde += coeff.tilde * factor

    def add_structured(self, mi: MultiIndexPair, value: complex,
                       entries: Iterable[Tuple[MultiIndexPair, int, complex]]) -> None:
        """Scalar contribution together with the ledger entries that represent it"""
        slot = self._slot(mi)
        slot.scalar += value
        slot.magnitude += abs(value)
        slot.tilde_ok = False
        if slot.ledger_ok:
            for frame, i0, inner in entries:
                key = (frame, i0)
                slot.ledger[key] = slot.ledger.get(key, 0j) + inner

    def items(self, derive_tilde: bool = False):
        """Yield surviving (MultiIndexPair, Coefficient) pairs"""
        for mi, slot in self._slots.items():
            if slot.scalar == 0 or abs(slot.scalar) <= self.rtol * slot.magnitude:
                continue
            ledger = None
            if slot.ledger_ok and slot.ledger:
                scale = max(abs(v) for v in slot.ledger.values())
                ledger = tuple(
                    LedgerEntry(frame, i0, inner)
                    for (frame, i0), inner in sorted(slot.ledger.items(), key=lambda kv: (kv[0][0], kv[0][1]))
                    if inner != 0 and abs(inner) > self.rtol * scale
                )
            tilde = None
            if derive_tilde:
                tilde = slot.scalar / factored_weight(mi)
            elif slot.tilde_ok and slot.magnitude > 0 and slot.tilde != 0:
                tilde = slot.tilde
            yield mi, Coefficient(slot.scalar, ledger, tilde)
