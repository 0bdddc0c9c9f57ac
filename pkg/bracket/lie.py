"""
Lie series f + {f,S} + (1/2){{f,S},S} + ... truncated by degree
"""
from typing import Optional, Tuple

from helper.exceptions import NonAscendingGeneratorError
from polynomial.polynomial import Polynomial
from bracket.poisson import BracketStats, poisson, poisson_with_generator
from bracket.symplectic import SymplecticForm


def _check_generator(S: Polynomial) -> None:
    if S.is_zero:
        return
    if S.min_degree <= 2:
        raise NonAscendingGeneratorError(S.min_degree)


def series_increments(seed: Polynomial, S: Polynomial, form: Optional[SymplecticForm] = None,
                      max_degree: Optional[int] = None, order: int = 0, structured: bool = False,
                      stats: Optional[BracketStats] = None) -> Polynomial:
    """
    Sum of f_(nu) for nu > order, where f_(order) = seed and f_(nu) = (1/nu) {f_(nu-1), S}

    Args:
        seed: The series element at index `order`
        S: Generator of minimal degree >= 3
        form: Symplectic form (None uses the lattice's theta)
        max_degree: Output degrees above this are skipped and counted
        order: Index of the seed inside the series
        structured: Propagate ledgers with poisson_with_generator
        stats: Optional counters updated in place

    Returns:
        The increments only, without the seed
    """
    _check_generator(S)
    if max_degree is None:
        raise ValueError("a degree cap is required for the series to terminate")
    total = Polynomial.zero(seed.lattice)
    if S.is_zero or seed.is_zero:
        return total
    current = seed
    nu = order
    while not current.is_zero:
        nu += 1
        if structured:
            bracket = poisson_with_generator(current, S, max_degree=max_degree, stats=stats)
        else:
            bracket = poisson(current, S, form, max_degree=max_degree, stats=stats)
        current = bracket.scale(1.0 / nu)
        if current.is_zero:
            break
        total = total + current
    return total


def lie_series(f: Polynomial, S: Polynomial, form: Optional[SymplecticForm] = None,
               max_degree: int = 3) -> Polynomial:
    """
    sum_nu f_(nu) with f_(0) = f, every term above max_degree discarded.

    Along the flow of X_S, d/dt g = {S, g}; the returned series is therefore
    f evaluated on the time -1 flow of X_S.
    """
    result, _ = lie_series_with_overflow(f, S, form, max_degree)
    return result


def lie_series_with_overflow(f: Polynomial, S: Polynomial, form: Optional[SymplecticForm] = None,
                             max_degree: int = 3) -> Tuple[Polynomial, int]:
    """lie_series plus the number of bracket contributions dropped for exceeding max_degree"""
    stats = BracketStats()
    base = f.truncate(max_degree)
    increments = series_increments(f, S, form, max_degree=max_degree, stats=stats)
    return base + increments, stats.skipped_over_degree
