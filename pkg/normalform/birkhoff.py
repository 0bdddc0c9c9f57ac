"""
Iterative Birkhoff normalization H o T = H0 + Z + R_N + R_T
"""
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from bracket.lie import series_increments
from bracket.poisson import BracketStats
from bracket.symplectic import SymplecticForm, quadratic_hamiltonian
from logs.logger import normalform_logger
from normalform.homological import divisor_check, homological_residual, solve_homological
from normalform.resonance import ResonanceParams, class_counts, is_resonant_term
from polynomial.multi_index import momentum
from polynomial.polynomial import (
    Polynomial,
    conj_symmetry_check,
    gamma_gt2,
    gamma_le2,
    semi_bound_check,
)
from spectrum.potential import FrequencyVector


class NormalFormParams(ResonanceParams):
    gamma: float = Field(..., gt=0.0)
    alpha: float = Field(..., gt=1.0)
    r_star: int = Field(..., ge=1, description="Last stage index; Z reaches degree r_star + 3")
    p: float = Field(2.0, ge=0.0, description="Sobolev index of the stability argument")
    remainder_degree: Optional[int] = Field(
        None, description="Highest Lie-series degree kept; the default r_star + 4 keeps the leading degree of R_T")
    R: Optional[float] = Field(None, gt=0.0, description="Norm radius for the advisory N-window")
    beta: Optional[float] = Field(None, description="Decay exponent for the growth-constant diagnostics")

    @property
    def top_degree(self) -> int:
        return self.r_star + 3

    @property
    def cap(self) -> int:
        return self.remainder_degree if self.remainder_degree is not None else self.r_star + 4

    def resonance(self) -> ResonanceParams:
        return ResonanceParams(gamma=self.gamma, alpha=self.alpha, N=self.N)

    def n_window(self, R: float) -> Tuple[Optional[float], float]:
        """
        (lower, upper) bounds on N for radius R:
        (R^{r*-2} gamma^{r*+1})^{-1/(p-2-2 alpha (r*+1))} <= N <= (gamma R^{-1/((r*+1)(r*+2))})^{1/(2 alpha)}
        """
        r = self.r_star
        denominator = self.p - 2 - 2 * self.alpha * (r + 1)
        lower = None
        if denominator != 0:
            lower = (R ** (r - 2) * self.gamma ** (r + 1)) ** (-1.0 / denominator)
        upper = (self.gamma * R ** (-1.0 / ((r + 1) * (r + 2)))) ** (1.0 / (2 * self.alpha))
        return lower, upper

    def window_ok(self, R: float) -> bool:
        lower, upper = self.n_window(R)
        return (lower is None or lower <= self.N) and self.N <= upper


class StageDiagnostics(BaseModel):
    stage: int
    degree: int
    g_terms: int
    le2_terms: int
    gt2_terms: int
    generator_terms: int
    resonant_terms: int
    homological_residual: float
    min_divisor: Optional[float] = None
    stage_mismatch: float = Field(..., description="max |degree-d part of the new Hamiltonian - (Z_d + gt2)|")
    ledger_preserved: bool
    skipped_over_degree: int
    rest_terms: int
    remainder_terms: int


class NormalFormDiagnostics(BaseModel):
    theta: int
    stages: List[StageDiagnostics] = Field(default_factory=list)
    leftover_terms: int = Field(0, description="Unnormalized terms of degree <= r_star + 3 after the last stage")
    n_window: Optional[Tuple[Optional[float], float]] = None
    n_window_ok: Optional[bool] = None
    semi_bound_constant: Optional[float] = None
    growth_constants: List[float] = Field(default_factory=list)
    z_classes: Dict[str, int] = Field(default_factory=dict)
    structure: Dict[str, str] = Field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max((s.homological_residual for s in self.stages), default=0.0)


@dataclass
class NormalFormResult:
    omega: FrequencyVector
    params: NormalFormParams
    Z: Polynomial
    R_N: Polynomial
    R_T: Polynomial
    generators: List[Polynomial]
    diagnostics: NormalFormDiagnostics
    leftover: Optional[Polynomial] = None
    extra: dict = field(default_factory=dict)

    @property
    def lattice(self):
        return self.Z.lattice

    @property
    def H0(self) -> Polynomial:
        return quadratic_hamiltonian(self.lattice, self.omega)

    def parts(self) -> Dict[str, Polynomial]:
        return {"H0": self.H0, "Z": self.Z, "R_N": self.R_N, "R_T": self.R_T}

    def total(self) -> Polynomial:
        return self.H0.combine([(self.Z, 1.0), (self.R_N, 1.0), (self.R_T, 1.0)])


def _fully_ledgered(*polys: Polynomial) -> bool:
    return all(p.is_zero or p.has_ledger for p in polys)


def birkhoff_iterate(omega: FrequencyVector, P: Polynomial, params: NormalFormParams,
                     theta: Optional[int] = None) -> NormalFormResult:
    """
    Normalize degrees 3 .. r_star + 3 one stage at a time

    Stage s treats degree d = s + 3: the degree-d part g is split by
    gamma_le2/gamma_gt2, the homological equation is solved on the
    gamma_le2 part, and the whole current Hamiltonian is transported by
    the time-1 flow of S. Lie-series output above params.cap is dropped
    and counted; output of degree above r_star + 3 accumulates in R_T.

    Args:
        omega: Frequencies of H0
        P: Nonlinearity of minimal degree >= 3
        params: Normal-form parameters
        theta: Symplectic-form selector (None uses the lattice's theta)

    Returns:
        NormalFormResult
    """
    lattice = P.lattice
    theta = lattice.theta if theta is None else theta
    form = SymplecticForm(theta=theta)
    if not P.is_zero and P.min_degree < 3:
        raise ValueError(f"P has a term of degree {P.min_degree} < 3")
    resonance = params.resonance()
    top, cap = params.top_degree, params.cap
    diagnostics = NormalFormDiagnostics(theta=theta)
    _advisories(P, params, diagnostics)

    rest = P.degree_range(3, top)
    R_T = P.degree_range(low=top + 1)
    Z = Polynomial.zero(lattice)
    R_N = Polynomial.zero(lattice)
    generators: List[Polynomial] = []
    structured = theta == 0 and _fully_ledgered(P)

    for stage in range(params.r_star + 1):
        started = time.perf_counter()
        d = stage + 3
        g = rest.homogeneous(d)
        le = gamma_le2(g, params.N)
        gt = gamma_gt2(g, params.N)
        S, Z_d = solve_homological(omega, le, resonance, theta)
        residual = homological_residual(omega, S, Z_d, le, theta)
        nonresonant = le.filter(lambda mi, _: mi not in Z_d)

        K = rest.combine([(Z, 1.0), (R_N, 1.0), (R_T, 1.0)])
        structured = structured and _fully_ledgered(K, nonresonant)
        if theta == 0 and not structured and not K.is_zero:
            normalform_logger.warning(f"Stage {stage}: ledger lost, continuing with scalar coefficients")
        stats = BracketStats()
        generator = S.scale(-1.0)
        delta_K = series_increments(K, generator, form, max_degree=cap, structured=structured, stats=stats)
        seed = nonresonant.scale(-1.0)
        delta_H0 = seed.combine([(series_increments(seed, generator, form, max_degree=cap, order=1,
                                                    structured=structured, stats=stats), 1.0)])
        updated = rest.combine([(R_T, 1.0), (delta_K, 1.0), (delta_H0, 1.0)])

        mismatch = updated.homogeneous(d).max_abs_difference(Z_d + gt)
        higher = updated.degree_range(low=d + 1)
        rest = higher.degree_range(high=top)
        R_T = higher.degree_range(low=top + 1)
        Z = Z + Z_d
        R_N = R_N + gt
        generators.append(S)

        stage_diag = StageDiagnostics(
            stage=stage, degree=d, g_terms=len(g), le2_terms=len(le), gt2_terms=len(gt),
            generator_terms=len(S), resonant_terms=len(Z_d), homological_residual=residual,
            min_divisor=None if S.is_zero else divisor_check(omega, S, theta),
            stage_mismatch=mismatch, ledger_preserved=structured or theta == 1,
            skipped_over_degree=stats.skipped_over_degree, rest_terms=len(rest), remainder_terms=len(R_T),
        )
        diagnostics.stages.append(stage_diag)
        normalform_logger.info(
            f"Stage {stage} (degree {d}): |S|={len(S)} |Z_d|={len(Z_d)} |gt2|={len(gt)} "
            f"residual={residual:.2e} mismatch={mismatch:.2e} skipped={stats.skipped_over_degree} "
            f"in {time.perf_counter() - started:.2f}s"
        )

    diagnostics.leftover_terms = len(rest)
    diagnostics.z_classes = class_counts(Z, params.N, theta)
    diagnostics.structure = {"Z": Z.structure, "R_N": R_N.structure, "R_T": R_T.structure}
    return NormalFormResult(omega, params, Z, R_N, R_T, generators, diagnostics, leftover=rest)


def _advisories(P: Polynomial, params: NormalFormParams, diagnostics: NormalFormDiagnostics) -> None:
    if params.R is not None:
        window = params.n_window(params.R)
        diagnostics.n_window = window
        diagnostics.n_window_ok = params.window_ok(params.R)
        if not diagnostics.n_window_ok:
            normalform_logger.warning(f"N={params.N} outside the advisory window {window} for R={params.R}")
    if params.beta is not None and not P.is_zero and P.structure in ("ledger", "factored"):
        constant = semi_bound_check(P, params.beta, 1.0).smallest_C
        diagnostics.semi_bound_constant = constant
        if constant is not None:
            ratio = 2.0 ** params.beta * params.N ** (2 * params.alpha) / params.gamma
            diagnostics.growth_constants = [constant * ratio ** (r + 1) for r in range(params.r_star + 1)]


class CertificateReport(BaseModel):
    passed: bool
    z_resonant: bool = Field(..., description="Every Z term satisfies the resonance inequality")
    r_n_outside_le2: bool = Field(..., description="Every R_N term fails the gamma_le2 predicate")
    r_n_three_tail_units: bool = Field(..., description="Every R_N term has at least three tail units")
    r_t_min_degree_ok: bool
    max_residual: float
    conj_symmetric: bool
    leftover_terms: int


def certify(result: NormalFormResult, tol: float = 1e-10) -> CertificateReport:
    """
    Exact structural checks of a normal-form result

    An R_N term passes when it lies outside gamma_le2, that is it has at
    least three tail units or |momentum| > N. r_n_three_tail_units is the
    stricter reading and is reported without gating passed; the two agree
    whenever every momentum is at most N, as for x-independent F.
    """
    params = result.params
    theta = result.diagnostics.theta
    resonance = params.resonance()
    z_ok = all(is_resonant_term(result.omega, mi, resonance, theta) for mi in result.Z)
    le2_fail = all(mi.tail_units(params.N) > 2 or abs(momentum(mi)) > params.N for mi in result.R_N)
    three_tail = all(mi.tail_units(params.N) >= 3 for mi in result.R_N)
    rt_ok = result.R_T.is_zero or result.R_T.min_degree >= params.top_degree + 1
    conj_ok = conj_symmetry_check(result.total(), tol)
    leftover = result.diagnostics.leftover_terms
    passed = z_ok and le2_fail and rt_ok and conj_ok and leftover == 0
    return CertificateReport(passed=passed, z_resonant=z_ok, r_n_outside_le2=le2_fail,
                             r_n_three_tail_units=three_tail, r_t_min_degree_ok=rt_ok,
                             max_residual=result.diagnostics.max_residual, conj_symmetric=conj_ok,
                             leftover_terms=leftover)
