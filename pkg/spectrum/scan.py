"""
Resonance scans over the enumerated index set and Monte-Carlo measure estimates
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats

from helper.parallel import chunked, ordered_map, resolve_threads
from logs.logger import spectrum_logger
from normalform.resonance import ResonanceParams, divisor_matrix, thresholds
from polynomial.lattice import LatticeConfig
from polynomial.multi_index import MultiIndexPair
from spectrum.enumeration import enumerate_O
from spectrum.potential import FrequencyVector, draw_potential_values, frequency_of


class ResonanceViolation(BaseModel):
    l: List[Tuple[int, int]]
    k: List[Tuple[int, int]]
    divisor: float
    threshold: float


class ResonanceReport(BaseModel):
    theta: int
    r: int
    gamma: float
    alpha: float
    N: int
    J: int
    checked: int = Field(..., description="Number of indices tested")
    violations: List[ResonanceViolation] = Field(default_factory=list)

    @property
    def nonresonant(self) -> bool:
        return not self.violations


class MeasureEstimate(BaseModel):
    theta: int
    m: float
    r: int
    gamma: float
    alpha: float
    N: int
    J: int
    samples: int
    failures: int
    fraction: float
    ci: Tuple[float, float]
    advisory_bound: float = Field(..., description="min(1, K gamma / N^(alpha - 2m - r - 4))")
    within_bound: bool


class MeasureSweep(BaseModel):
    rows: List[MeasureEstimate]
    gamma_slopes: List[Tuple[int, Optional[float]]] = Field(default_factory=list,
                                                           description="(N, log-log slope of fraction vs gamma)")
    doubling_ratios: List[Tuple[int, float, Optional[float]]] = Field(default_factory=list,
                                                                     description="(N, gamma, fraction(2 gamma)/fraction(gamma))")
    monotone_in_N: bool = True


def _lattice(theta: int, J: int, include_zero: bool = False) -> LatticeConfig:
    return LatticeConfig(theta=theta, J=J, include_zero=include_zero and theta == 0)


def _pairs(exponents) -> List[Tuple[int, int]]:
    return sorted(exponents.items())


def _compile_index_set(r: int, params: ResonanceParams, lattice: LatticeConfig):
    indices: List[MultiIndexPair] = list(enumerate_O(r, params.N, lattice.theta, lattice.J, lattice.include_zero))
    return indices, divisor_matrix(indices, lattice), thresholds(indices, params)


def resonance_scan(omega: FrequencyVector, r: int, params: ResonanceParams,
                   lattice: Optional[LatticeConfig] = None) -> ResonanceReport:
    """
    Every enumerated (l,k) with |<omega, I_theta (l-k)>| <= gamma M_lk / N^alpha

    Args:
        omega: Frequencies (theta is taken from here)
        r: Maximal degree
        params: gamma, alpha, N
        lattice: Lattice (None: modes of omega without 0 unless omega has it)

    Returns:
        ResonanceReport; an empty violation list certifies r-degree non-resonance
    """
    if lattice is None:
        J = max(abs(j) for j in omega.omega)
        lattice = _lattice(omega.theta, J, include_zero=0 in omega.omega)
    indices, A, thr = _compile_index_set(r, params, lattice)
    divisors = A @ omega.array(lattice) if indices else np.zeros(0)
    violations = [
        ResonanceViolation(l=_pairs(indices[row].l), k=_pairs(indices[row].k),
                           divisor=float(divisors[row]), threshold=float(thr[row]))
        for row in np.nonzero(np.abs(divisors) <= thr)[0]
    ]
    spectrum_logger.debug(f"Resonance scan r={r} N={params.N}: {len(indices)} indices, {len(violations)} violations")
    return ResonanceReport(theta=lattice.theta, r=r, gamma=params.gamma, alpha=params.alpha, N=params.N,
                           J=lattice.J, checked=len(indices), violations=violations)


def lemma_constant(r: int, m: float) -> float:
    """K = 4^(r+4+m) r^(m+3)"""
    return 4.0 ** (r + 4 + m) * r ** (m + 3)


def advisory_measure_bound(r: int, m: float, params: ResonanceParams) -> float:
    exponent = params.alpha - 2 * m - r - 4
    return min(1.0, lemma_constant(r, m) * params.gamma / params.N ** exponent)


def _frequency_matrix(theta: int, m: float, lattice: LatticeConfig, samples: int, seed: int) -> np.ndarray:
    """(samples, modes) frequencies of independently seeded potentials"""
    children = np.random.SeedSequence(seed).spawn(samples)
    modes = lattice.modes
    out = np.empty((samples, len(modes)))
    for row, child in enumerate(children):
        v = draw_potential_values(np.random.default_rng(child), theta, lattice.J, lattice.include_zero)
        out[row] = [frequency_of(theta, j, v.get(j, 0.0), m) for j in modes]
    return out


def _fail_flags(A, thr: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    if omegas.shape[0] == 0 or A.shape[0] == 0:
        return np.zeros(omegas.shape[0], dtype=bool)
    divisors = A @ omegas.T
    return np.any(np.abs(divisors) <= thr[:, None], axis=0)


def wilson_interval(failures: int, samples: int) -> Tuple[float, float]:
    ci = stats.binomtest(failures, samples).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def measure_estimate(theta: int, m: float, r: int, params: ResonanceParams, J: int, samples: int, seed: int,
                     threads: Optional[int] = None, include_zero: bool = False) -> MeasureEstimate:
    """
    Fraction of sampled potentials whose frequencies violate r-degree non-resonance

    Each sample draws from its own child of SeedSequence(seed), so the
    result is bit-identical for any thread count.
    """
    if samples < 100:
        raise ValueError("measure_estimate needs at least 100 samples")
    lattice = _lattice(theta, J, include_zero)
    _, A, thr = _compile_index_set(r, params, lattice)
    omegas = _frequency_matrix(theta, m, lattice, samples, seed)
    workers = resolve_threads(threads)
    blocks = chunked(list(range(samples)), workers)
    flags = ordered_map(lambda rows: _fail_flags(A, thr, omegas[rows]), blocks, workers)
    failures = int(sum(int(np.sum(block)) for block in flags))
    fraction = failures / samples
    ci = wilson_interval(failures, samples)
    bound = advisory_measure_bound(r, m, params)
    within = ci[0] <= bound
    if not within:
        spectrum_logger.warning(f"Measure estimate {fraction:.4f} exceeds the advisory bound {bound:.3e}")
    spectrum_logger.info(f"Measure estimate theta={theta} r={r} N={params.N} gamma={params.gamma}: "
                         f"{failures}/{samples} resonant, CI=({ci[0]:.4f}, {ci[1]:.4f})")
    return MeasureEstimate(theta=theta, m=m, r=r, gamma=params.gamma, alpha=params.alpha, N=params.N, J=J,
                           samples=samples, failures=failures, fraction=fraction, ci=ci,
                           advisory_bound=bound, within_bound=within)


def measure_sweep(theta: int, m: float, r: int, alpha: float, gammas: Sequence[float], Ns: Sequence[int],
                  J: int, samples: int, seed: int, threads: Optional[int] = None) -> MeasureSweep:
    """
    measure_estimate over a (gamma, N) grid with shared seeds.

    Reports per-N log-log slopes of fraction against gamma, the ratio of
    fractions across each gamma doubling, and whether the fraction is
    nonincreasing in N within the confidence intervals.
    """
    rows: List[MeasureEstimate] = []
    for N in sorted(Ns):
        for gamma in sorted(gammas):
            rows.append(measure_estimate(theta, m, r, ResonanceParams(gamma=gamma, alpha=alpha, N=N),
                                         J, samples, seed, threads))
    slopes: List[Tuple[int, Optional[float]]] = []
    ratios: List[Tuple[int, float, Optional[float]]] = []
    for N in sorted(Ns):
        by_gamma = {row.gamma: row for row in rows if row.N == N}
        positive = [(g, row.fraction) for g, row in sorted(by_gamma.items()) if row.fraction > 0]
        if len(positive) >= 2:
            x = np.log([g for g, _ in positive])
            y = np.log([f for _, f in positive])
            slopes.append((N, float(np.polyfit(x, y, 1)[0])))
        else:
            slopes.append((N, None))
        for gamma, row in sorted(by_gamma.items()):
            doubled = by_gamma.get(2 * gamma)
            if doubled is not None:
                ratios.append((N, gamma, doubled.fraction / row.fraction if row.fraction > 0 else None))
    monotone = True
    for gamma in sorted(gammas):
        series = [row for row in rows if row.gamma == gamma]
        for smaller, larger in zip(series, series[1:]):
            if larger.fraction > smaller.ci[1]:
                monotone = False
    return MeasureSweep(rows=rows, gamma_slopes=slopes, doubling_ratios=ratios, monotone_in_N=monotone)
