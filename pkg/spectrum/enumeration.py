"""
Enumeration of the index set whose divisors the non-resonance condition constrains
"""
import math
from itertools import combinations_with_replacement
from typing import Iterator, List, Optional, Tuple

from helper.exceptions import EnumerationBudgetError
from polynomial.multi_index import MultiIndexPair
from settings import settings

Unit = Tuple[int, int]  # (mode, side) with side 0 for u and 1 for ubar


def tail_cap(r: int, N: int, J: int) -> int:
    """Tail modes beyond 4 r N^2 cannot produce small divisors for omega near -j^2"""
    return min(J, 4 * r * N * N)


def _units(modes: List[int]) -> List[Unit]:
    return [(j, side) for j in modes for side in (0, 1)]


def unit_sets(r: int, N: int, J: int, include_zero: bool = False) -> Tuple[List[Unit], List[Unit]]:
    head = [j for j in range(-N, N + 1) if j != 0 or include_zero]
    cap = tail_cap(r, N, J)
    tail = [j for j in range(-cap, cap + 1) if abs(j) > N]
    return _units(head), _units(tail)


def candidate_count(r: int, N: int, J: int, include_zero: bool = False) -> int:
    """Number of unit multisets visited before the membership predicate"""
    head, tail = unit_sets(r, N, J, include_zero)
    total = 0
    for t in range(3, r + 1):
        for n_tail in range(0, 3):
            if n_tail > t or (n_tail and not tail):
                continue
            total += math.comb(len(head) + t - n_tail - 1, t - n_tail) * math.comb(len(tail) + n_tail - 1, n_tail)
    return total


def _mirror_defect(mi: MultiIndexPair, only_tail_above: Optional[int] = None) -> int:
    """sum_j |l_j + l_-j - k_j - k_-j| over the pairs {j, -j} (restricted to |j| > N if asked)"""
    net = {}
    for j, lj, kj in mi.triples:
        if only_tail_above is not None and abs(j) <= only_tail_above:
            continue
        net[abs(j)] = net.get(abs(j), 0) + lj - kj
    return sum(abs(v) for v in net.values())


def in_O(mi: MultiIndexPair, N: int, theta: int) -> bool:
    """
    Membership predicate for an index with 3 <= |l+k| and at most two tail units

    At most one tail unit: theta * sum|l_j - k_j| + (1 - theta) * mirror defect != 0.
    Exactly two tail units: mirror defect restricted to |j| > N != 0.
    """
    n_tail = mi.tail_units(N)
    if n_tail > 2:
        return False
    if n_tail == 2:
        return _mirror_defect(mi, only_tail_above=N) != 0
    if theta == 1:
        return any(lj != kj for _, lj, kj in mi.triples)
    return _mirror_defect(mi) != 0


def _from_units(units) -> MultiIndexPair:
    l_modes = [j for j, side in units if side == 0]
    k_modes = [j for j, side in units if side == 1]
    return MultiIndexPair.from_modes(l_modes, k_modes)


def _stream(r: int, N: int, theta: int, head: List[Unit], tail: List[Unit]) -> Iterator[MultiIndexPair]:
    for t in range(3, r + 1):
        for n_tail in range(0, 3):
            if n_tail > t:
                continue
            for tail_part in combinations_with_replacement(tail, n_tail):
                for head_part in combinations_with_replacement(head, t - n_tail):
                    mi = _from_units(head_part + tail_part)
                    if mi.triples > mi.swapped().triples:
                        continue
                    if in_O(mi, N, theta):
                        yield mi


def enumerate_O(r: int, N: int, theta: int, J: int, include_zero: bool = False,
                budget: Optional[int] = None) -> Iterator[MultiIndexPair]:
    """
    Stream every (l,k) with 3 <= |l+k| <= r, at most two tail units, satisfying in_O

    Only one of (l,k), (k,l) is emitted since their divisors differ by sign.
    The order is deterministic: degree, then tail-unit count, then the
    lexicographic order of the unit combinations.

    Args:
        r: Maximal degree (>= 3)
        N: Head cutoff (1 <= N <= J)
        theta: Symplectic-form selector
        J: Lattice cutoff
        include_zero: Whether mode 0 is present
        budget: Candidate cap (None uses settings.ENUMERATION_BUDGET)

    Returns:
        Iterator over MultiIndexPair
    """
    if r < 3:
        raise ValueError(f"degree bound r={r} must be at least 3")
    if not 1 <= N <= J:
        raise ValueError(f"N={N} outside [1, {J}]")
    if theta == 1 and include_zero:
        raise ValueError("theta=1 excludes mode 0")
    budget = settings.ENUMERATION_BUDGET if budget is None else budget
    needed = candidate_count(r, N, J, include_zero)
    if needed > budget:
        raise EnumerationBudgetError(needed, budget)
    head, tail = unit_sets(r, N, J, include_zero)
    return _stream(r, N, theta, head, tail)
