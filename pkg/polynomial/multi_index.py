"""
Sparse exponent pairs (l, k) indexing the monomials u^l ubar^k
"""
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple

Triple = Tuple[int, int, int]


def _canonical(l: Mapping[int, int], k: Mapping[int, int]) -> Tuple[Triple, ...]:
    triples = []
    for j in sorted(set(l) | set(k)):
        lj, kj = int(l.get(j, 0)), int(k.get(j, 0))
        if lj < 0 or kj < 0:
            raise ValueError(f"negative exponent at mode {j}")
        if lj or kj:
            triples.append((int(j), lj, kj))
    return tuple(triples)


@dataclass(frozen=True, slots=True)
class MultiIndexPair:
    """
    The pair (l, k) stored as sorted (mode, l_j, k_j) triples with l_j + k_j > 0.

    The triple tuple is the canonical key: it orders terms deterministically
    and is what serialization writes out.
    """
    triples: Tuple[Triple, ...] = ()

    @classmethod
    def from_maps(cls, l: Mapping[int, int], k: Mapping[int, int]) -> "MultiIndexPair":
        return cls(_canonical(l, k))

    @classmethod
    def from_modes(cls, l_modes: Iterable[int] = (), k_modes: Iterable[int] = ()) -> "MultiIndexPair":
        """Build from multisets of modes, e.g. from_modes([1, 2], [3]) is u1 u2 ubar3"""
        l: Dict[int, int] = {}
        k: Dict[int, int] = {}
        for j in l_modes:
            l[j] = l.get(j, 0) + 1
        for j in k_modes:
            k[j] = k.get(j, 0) + 1
        return cls.from_maps(l, k)

    @property
    def l(self) -> Dict[int, int]:
        return {j: lj for j, lj, _ in self.triples if lj}

    @property
    def k(self) -> Dict[int, int]:
        return {j: kj for j, _, kj in self.triples if kj}

    def exponents(self) -> Dict[int, Tuple[int, int]]:
        return {j: (lj, kj) for j, lj, kj in self.triples}

    def l_of(self, j: int) -> int:
        for mode, lj, _ in self.triples:
            if mode == j:
                return lj
        return 0

    def k_of(self, j: int) -> int:
        for mode, _, kj in self.triples:
            if mode == j:
                return kj
        return 0

    @property
    def degree(self) -> int:
        return sum(lj + kj for _, lj, kj in self.triples)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(j for j, _, _ in self.triples)

    @property
    def momentum(self) -> int:
        return momentum(self)

    def swapped(self) -> "MultiIndexPair":
        """(k, l): the index of the conjugate monomial"""
        return MultiIndexPair(tuple((j, kj, lj) for j, lj, kj in self.triples))

    def tail_units(self, N: int) -> int:
        """|Gamma_{>N}(l+k)|"""
        return sum(lj + kj for j, lj, kj in self.triples if abs(j) > N)

    def max_mode(self) -> int:
        return max((abs(j) for j in self.support), default=0)

    def is_diagonal(self) -> bool:
        return all(lj == kj for _, lj, kj in self.triples)

    def plus(self, other: "MultiIndexPair") -> "MultiIndexPair":
        l, k = dict(self.l), dict(self.k)
        for j, lj, kj in other.triples:
            l[j] = l.get(j, 0) + lj
            k[j] = k.get(j, 0) + kj
        return MultiIndexPair.from_maps(l, k)

    def contains(self, other: "MultiIndexPair") -> bool:
        """Componentwise other.l <= l and other.k <= k"""
        mine = self.exponents()
        for j, lj, kj in other.triples:
            have = mine.get(j, (0, 0))
            if lj > have[0] or kj > have[1]:
                return False
        return True

    def minus(self, other: "MultiIndexPair") -> "MultiIndexPair":
        if not self.contains(other):
            raise ValueError(f"{other} is not contained in {self}")
        l, k = dict(self.l), dict(self.k)
        for j, lj, kj in other.triples:
            l[j] = l.get(j, 0) - lj
            k[j] = k.get(j, 0) - kj
        return MultiIndexPair.from_maps(l, k)

    def within(self, lattice) -> bool:
        return all(lattice.contains(j) for j in self.support)

    def __lt__(self, other: "MultiIndexPair") -> bool:
        return (self.degree, self.triples) < (other.degree, other.triples)

    def __str__(self) -> str:
        parts = []
        for j, lj, kj in self.triples:
            if lj:
                parts.append(f"u{j}" + (f"^{lj}" if lj > 1 else ""))
            if kj:
                parts.append(f"ū{j}" + (f"^{kj}" if kj > 1 else ""))
        return "·".join(parts) if parts else "1"


def momentum(mi: MultiIndexPair) -> int:
    """M(l,k) = sum_j j (l_j - k_j)"""
    return sum(j * (lj - kj) for j, lj, kj in mi.triples)


def bracket_monomial(a: Tuple[Triple, ...], b: Tuple[Triple, ...], j: int) -> MultiIndexPair:
    """Exponents of (l_a + l_b - e_j, k_a + k_b - e_j) for a bracket contribution at mode j"""
    merged: Dict[int, list] = {}
    for mode, lj, kj in a:
        merged[mode] = [lj, kj]
    for mode, lj, kj in b:
        slot = merged.setdefault(mode, [0, 0])
        slot[0] += lj
        slot[1] += kj
    slot = merged[j]
    slot[0] -= 1
    slot[1] -= 1
    return MultiIndexPair(tuple(
        (mode, v[0], v[1]) for mode, v in sorted(merged.items()) if v[0] or v[1]
    ))
