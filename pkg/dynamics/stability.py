"""
Sobolev-norm drift and stability-time experiments
"""
import math
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from bracket.poisson import bracket_with_sobolev_sq
from bracket.symplectic import SymplecticForm
from dynamics.integrators import IntegratorConfig, Stepper, VectorField, reference_flow, step_plan
from helper.exceptions import DegenerateLadderError, LatticeMismatchError
from helper.parallel import ordered_map
from logs.logger import dynamics_logger
from polynomial.lattice import LatticeConfig, State, japanese, scale_to_norm, sobolev_norm
from polynomial.polynomial import Polynomial
from polynomial.sampling import random_state

SURVIVED = "survived"
CONSERVED = "conserved"

Parts = Union[Mapping[str, Polynomial], Sequence[Polynomial]]


def _as_list(parts: Parts) -> List[Polynomial]:
    values = list(parts.values()) if isinstance(parts, Mapping) else list(parts)
    if not values:
        raise ValueError("no Hamiltonian parts given")
    lattice = values[0].lattice
    if any(part.lattice != lattice for part in values):
        raise LatticeMismatchError("Hamiltonian parts live on different lattices")
    return values


class DriftEvaluator:
    """
    Total d||u||_p^2/dt = sum over parts of {part, ||u||_p^2}, evaluated in batches.

    Each bracket is built once; parts commuting with the norm (H0) drop out
    as zero polynomials.
    """

    def __init__(self, parts: Parts, p: float, theta: Optional[int] = None):
        values = _as_list(parts)
        self.lattice: LatticeConfig = values[0].lattice
        form = None if theta is None else SymplecticForm(theta=theta)
        brackets = [bracket_with_sobolev_sq(part, p, form) for part in values]
        total = Polynomial.zero(self.lattice)
        for bracket in brackets:
            total = total + bracket
        self.bracket = total
        self.p = p
        self._compiled = total.compiled()

    @property
    def conserved(self) -> bool:
        return self.bracket.is_zero

    def __call__(self, s: State) -> float:
        if s.lattice != self.lattice:
            raise LatticeMismatchError("state is not on the Hamiltonian's lattice")
        return float(self.many(s.u[None, :])[0])

    def many(self, U: np.ndarray) -> np.ndarray:
        if self.conserved:
            return np.zeros(np.atleast_2d(U).shape[0])
        return self._compiled.value_many(U).real


def drift_functional(parts: Parts, s: State, p: float, theta: Optional[int] = None) -> float:
    """
    Instantaneous d||u||_p^2/dt at s

    Args:
        parts: Hamiltonian pieces, e.g. {"H0": ..., "Z": ..., "R_N": ..., "R_T": ...}
        s: State
        p: Sobolev index
        theta: Symplectic-form selector (None uses the lattice's theta)

    Returns:
        Real drift; H0 contributes exactly 0
    """
    return DriftEvaluator(parts, p, theta)(s)


class DriftRung(BaseModel):
    R: float
    max_drift: float
    mean_drift: float


class DriftScalingReport(BaseModel):
    p: float
    samples: int
    seed: int
    rungs: List[DriftRung] = Field(default_factory=list)
    status: str = Field(..., description="'fitted' or 'conserved'")
    slope: Optional[float] = None
    intercept: Optional[float] = None

    def rows(self):
        for rung in self.rungs:
            yield [rung.R, rung.max_drift, rung.mean_drift]


def check_ladder(ladder: Sequence[float], rel_tol: float = 1e-6) -> np.ndarray:
    """Validate a geometric ladder with at least four positive rungs"""
    values = np.asarray(list(ladder), dtype=float)
    if values.size < 4:
        raise DegenerateLadderError(f"ladder has {values.size} rungs, at least 4 are needed")
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise DegenerateLadderError("ladder rungs must be positive and finite")
    ratios = values[1:] / values[:-1]
    if np.any(np.abs(ratios - 1.0) < rel_tol):
        raise DegenerateLadderError("ladder has repeated rungs")
    if np.max(np.abs(ratios / ratios[0] - 1.0)) > rel_tol:
        raise DegenerateLadderError(f"ladder is not geometric (ratios {ratios.tolist()})")
    return values


def drift_scaling(parts: Parts, p: float, ladder: Sequence[float], theta: Optional[int] = None,
                  samples: int = 50, seed: int = 0, max_mode: Optional[int] = None,
                  threads: Optional[int] = None) -> DriftScalingReport:
    """
    Fit log max|drift| against log R over a geometric norm ladder

    The same seeded unit directions are used on every rung, so an exactly
    homogeneous part of degree d gives slope d exactly.

    Args:
        parts: Hamiltonian pieces
        p: Sobolev index of both the norm and the drift
        ladder: Geometric norm radii, at least 4
        theta: Symplectic-form selector
        samples: Random directions per rung (at least 50)
        seed: Seed of the directions
        max_mode: Restrict directions to |j| <= max_mode (None uses all modes)
        threads: Worker cap across rungs

    Returns:
        DriftScalingReport with status "conserved" and no slope when the drift vanishes identically
    """
    radii = check_ladder(ladder)
    if samples < 50:
        raise ValueError(f"drift_scaling needs at least 50 samples per rung, got {samples}")
    evaluator = DriftEvaluator(parts, p, theta)
    rng = np.random.default_rng(seed)
    directions = np.array([random_state(evaluator.lattice, 1.0, p, rng, max_mode).u for _ in range(samples)])

    def rung(R: float) -> DriftRung:
        drifts = np.abs(evaluator.many(R * directions))
        return DriftRung(R=float(R), max_drift=float(np.max(drifts)), mean_drift=float(np.mean(drifts)))

    rungs = ordered_map(rung, radii.tolist(), threads)
    report = DriftScalingReport(p=p, samples=samples, seed=seed, rungs=rungs, status=CONSERVED)
    maxima = np.array([r.max_drift for r in rungs])
    if evaluator.conserved or np.all(maxima == 0.0):
        dynamics_logger.info("Drift vanishes identically on the ladder: conserved")
        return report
    if np.any(maxima == 0.0):
        raise DegenerateLadderError("drift vanishes on some rungs only, no log-log fit possible")
    slope, intercept = np.polyfit(np.log(radii), np.log(maxima), 1)
    report.status = "fitted"
    report.slope, report.intercept = float(slope), float(intercept)
    dynamics_logger.info(f"Drift scaling over R in [{radii[0]:.3e}, {radii[-1]:.3e}]: slope {slope:.3f}")
    return report


def default_dt(omega: np.ndarray) -> float:
    """1e-3 * 2 pi / max|omega_j|"""
    peak = float(np.max(np.abs(omega))) if np.size(omega) else 0.0
    return 1e-3 * 2 * math.pi / peak if peak > 0 else 1e-3


def default_shape(lattice: LatticeConfig, p: float, seed: int = 0) -> State:
    """u_j = <j>^{-(p+1)} e^{i phi_j} with seeded phases"""
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2 * math.pi, lattice.size)
    magnitudes = np.array([float(japanese(j)) ** (-(p + 1)) for j in lattice.modes])
    return State(lattice, magnitudes * np.exp(1j * phases))


def stability_time(H, epsilon: float, p: float, cfg: IntegratorConfig, T_max: float,
                   threshold_factor: float = 2.0, shape: Optional[State] = None,
                   seed: int = 0) -> Union[float, str]:
    """
    First time ||u(t)||_p reaches threshold_factor * epsilon from ||u(0)||_p = epsilon

    Args:
        H: Hamiltonian with lattice, omega (FrequencyVector) and P
        epsilon: Initial p-norm (> 0)
        p: Sobolev index
        cfg: Integrator configuration
        T_max: Horizon
        threshold_factor: Escape factor
        shape: Initial direction (None uses default_shape with seed)
        seed: Phase seed of the default shape

    Returns:
        Escape time, or "survived" when the norm stays below the threshold up to T_max
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    lattice = H.lattice
    shape = default_shape(lattice, p, seed) if shape is None else shape
    if shape.lattice != lattice:
        raise LatticeMismatchError("initial shape is not on the Hamiltonian's lattice")
    u = np.array(scale_to_norm(shape, epsilon, p).u)
    field = VectorField(lattice, SymplecticForm.of(lattice), H.P, H.omega.array(lattice))
    threshold = threshold_factor * epsilon
    n, h = step_plan(T_max, cfg.dt)
    stepper = None if cfg.scheme == "dop853" else Stepper(field, cfg)
    for k in range(1, n + 1):
        u = reference_flow(field, u, h) if stepper is None else stepper.step(u, h)
        norm = sobolev_norm(State(lattice, u), p)
        if norm >= threshold:
            t = T_max if k == n else k * h
            dynamics_logger.info(f"Escape at t={t:.4g} for epsilon={epsilon:.3e} (||u||_{p}={norm:.3e})")
            return t
    dynamics_logger.info(f"Survived to T={T_max} for epsilon={epsilon:.3e}")
    return SURVIVED


def stability_sweep(H, epsilons: Sequence[float], p: float, cfg: IntegratorConfig, T_max: float,
                    threshold_factor: float = 2.0, seed: int = 0,
                    threads: Optional[int] = None) -> List[Tuple[float, Union[float, str]]]:
    """stability_time over several epsilons with one shared shape"""
    shape = default_shape(H.lattice, p, seed)
    H.P.compiled()
    return list(zip(epsilons, ordered_map(
        lambda eps: stability_time(H, eps, p, cfg, T_max, threshold_factor, shape), epsilons, threads)))
