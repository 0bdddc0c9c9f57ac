"""
Time integration of u_j' = -i sgn^theta(j) dH/dubar_j on the Fourier lattice
"""
import math
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy.integrate import solve_ivp

from bracket.symplectic import SymplecticForm, resolve_form
from helper.exceptions import IntegratorConvergenceError, LatticeMismatchError
from logs.logger import dynamics_logger
from polynomial.lattice import LatticeConfig, State, momentum_functional, sobolev_norm
from polynomial.polynomial import Polynomial
from settings import settings

Scheme = Literal["implicit_midpoint", "rk4_reference", "dop853"]


class IntegratorConfig(BaseModel):
    scheme: Scheme = "implicit_midpoint"
    dt: float = Field(1e-3, gt=0.0)
    fixed_point_tol: float = Field(default_factory=lambda: settings.FIXED_POINT_TOL, gt=0.0)
    max_iters: int = Field(default_factory=lambda: settings.FIXED_POINT_MAX_ITERS, ge=1)
    sample_every: int = Field(1, ge=1, description="Record every n-th step")
    record_modes: bool = Field(False, description="Write per-mode magnitudes into trajectory CSVs")


class VectorField:
    """
    Splits the flow into the diagonal rotation of H0 and the nonlinear field of P.

    rates[j] = sgn^theta(j) omega_j, so the linear flow is u_j e^{-i rates_j t}.
    """

    def __init__(self, lattice: LatticeConfig, form: SymplecticForm, P: Polynomial,
                 omega: Optional[np.ndarray] = None):
        if P.lattice != lattice:
            raise LatticeMismatchError("nonlinearity and state lattice differ")
        self.lattice = lattice
        self.form = form
        self.weights = form.weights(lattice)
        self.rates = self.weights * (np.zeros(lattice.size) if omega is None else np.asarray(omega, dtype=float))
        self.P = P
        self._compiled = P.compiled()

    @property
    def has_nonlinearity(self) -> bool:
        return not self.P.is_zero

    def nonlinear(self, u: np.ndarray) -> np.ndarray:
        if not self.has_nonlinearity:
            return np.zeros_like(u)
        return -1j * self.weights * self._compiled.grad_ubar(u)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        return -1j * self.rates * u + self.nonlinear(u)

    def rotate(self, u: np.ndarray, h: float) -> np.ndarray:
        return np.exp(-1j * self.rates * h) * u


def _midpoint_solve(field: VectorField, u: np.ndarray, h: float, tol: float, max_iters: int) -> Optional[np.ndarray]:
    """v = u + h N((u+v)/2) by fixed-point iteration, None when it does not settle"""
    v = u + h * field.nonlinear(u)
    for _ in range(max_iters):
        v_next = u + h * field.nonlinear(0.5 * (u + v))
        if not np.all(np.isfinite(v_next)):
            return None
        err = np.max(np.abs(v_next - v))
        v = v_next
        if err <= tol * (1.0 + np.max(np.abs(v))):
            return v
    return None


def strang_midpoint_step(field: VectorField, u: np.ndarray, h: float, tol: float, max_iters: int) -> Optional[np.ndarray]:
    """Half rotation, implicit midpoint on the nonlinear field, half rotation"""
    u_half = field.rotate(u, 0.5 * h)
    if field.has_nonlinearity:
        u_half = _midpoint_solve(field, u_half, h, tol, max_iters)
        if u_half is None:
            return None
    return field.rotate(u_half, 0.5 * h)


def rk4_step(field: VectorField, u: np.ndarray, h: float) -> np.ndarray:
    k1 = field(u)
    k2 = field(u + 0.5 * h * k1)
    k3 = field(u + 0.5 * h * k2)
    k4 = field(u + h * k3)
    return u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


class Stepper:
    """One fixed step of the configured scheme with the dt-halving fallback"""

    def __init__(self, field: VectorField, cfg: IntegratorConfig):
        if cfg.scheme == "dop853":
            raise ValueError("dop853 is a reference flow, use reference_flow instead of a stepper")
        self.field = field
        self.cfg = cfg

    def step(self, u: np.ndarray, h: float) -> np.ndarray:
        if self.cfg.scheme == "rk4_reference":
            return rk4_step(self.field, u, h)
        for halvings in range(settings.MAX_DT_HALVINGS + 1):
            substeps = 2 ** halvings
            v = u
            for _ in range(substeps):
                v = strang_midpoint_step(self.field, v, h / substeps, self.cfg.fixed_point_tol, self.cfg.max_iters)
                if v is None:
                    break
            if v is not None:
                if halvings:
                    dynamics_logger.debug(f"Fixed-point iteration needed {substeps} substeps at h={h:.3e}")
                return v
        raise IntegratorConvergenceError(
            f"fixed-point iteration did not converge after {settings.MAX_DT_HALVINGS} dt halvings (h={h:.3e})"
        )


def _to_real(u: np.ndarray) -> np.ndarray:
    return np.concatenate([u.real, u.imag])


def _to_complex(y: np.ndarray) -> np.ndarray:
    n = y.shape[0] // 2
    return y[:n] + 1j * y[n:]


def reference_flow(field: VectorField, u0: np.ndarray, time: float, t_eval: Optional[np.ndarray] = None,
                   rtol: float = 1e-12, atol: float = 1e-14) -> np.ndarray:
    """
    High-accuracy DOP853 flow over [0, time]

    Returns:
        The final state, or the states at t_eval as rows
    """
    if time == 0:
        return np.array(u0, dtype=complex) if t_eval is None else np.tile(u0, (len(t_eval), 1))
    sol = solve_ivp(lambda _, y: _to_real(field(_to_complex(y))), (0.0, time), _to_real(np.asarray(u0, dtype=complex)),
                    method="DOP853", rtol=rtol, atol=atol, t_eval=t_eval)
    if not sol.success:
        raise IntegratorConvergenceError(f"DOP853 failed: {sol.message}")
    if t_eval is None:
        return _to_complex(sol.y[:, -1])
    return np.array([_to_complex(sol.y[:, i]) for i in range(sol.y.shape[1])])


def step_plan(T: float, dt: float) -> tuple:
    """(number of steps, uniform step) covering [0, T] with steps of at most dt"""
    n = max(1, math.ceil(abs(T) / dt - 1e-12))
    return n, T / n


def polynomial_flow(S: Polynomial, form: Optional[SymplecticForm], u0: np.ndarray, time: float,
                    step: Optional[float] = None, scheme: str = "implicit_midpoint",
                    watch: Optional[Callable[[np.ndarray], None]] = None) -> np.ndarray:
    """
    Time-`time` flow of X_S from u0 (time may be negative)

    Args:
        S: Generating Hamiltonian
        form: Symplectic form (None uses the lattice's theta)
        u0: Initial amplitudes
        time: Flow time
        step: Step size (None uses settings.FLOW_STEP)
        scheme: "implicit_midpoint" or "dop853"
        watch: Called on every intermediate state, may raise to abort

    Returns:
        Final amplitudes
    """
    form = resolve_form(S.lattice, form)
    field = VectorField(S.lattice, form, S)
    u = np.asarray(u0, dtype=complex)
    if S.is_zero or time == 0:
        return u.copy()
    if scheme == "dop853":
        result = reference_flow(field, u, time)
        if watch is not None:
            watch(result)
        return result
    cfg = IntegratorConfig(scheme="implicit_midpoint", dt=step or settings.FLOW_STEP)
    stepper = Stepper(field, cfg)
    n, h = step_plan(time, cfg.dt)
    for _ in range(n):
        u = stepper.step(u, h)
        if watch is not None:
            watch(u)
    return u


@dataclass
class Trajectory:
    """Sampled solution with per-sample diagnostics"""
    lattice: LatticeConfig
    p: float
    times: np.ndarray
    states: np.ndarray
    energy: np.ndarray = field(default_factory=lambda: np.zeros(0))
    norm_p: np.ndarray = field(default_factory=lambda: np.zeros(0))
    momentum: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def state(self, index: int) -> State:
        return State(self.lattice, self.states[index])

    @property
    def final(self) -> State:
        return self.state(-1)

    def columns(self, record_modes: bool = False) -> List[str]:
        cols = ["t", "norm_p", "H", "momentum"]
        if record_modes:
            cols += [f"abs_u[{j}]" for j in self.lattice.modes]
        return cols

    def rows(self, record_modes: bool = False):
        for i, t in enumerate(self.times):
            row = [float(t), float(self.norm_p[i]), float(self.energy[i]), float(self.momentum[i])]
            if record_modes:
                row += [float(x) for x in np.abs(self.states[i])]
            yield row


def hamiltonian_energy(omega: np.ndarray, P: Polynomial, U: np.ndarray) -> np.ndarray:
    """Real part of H0 + P on each state row of U"""
    U = np.atleast_2d(U)
    linear = np.sum(omega[None, :] * np.abs(U) ** 2, axis=1)
    return (linear + P.compiled().value_many(U)).real


def integrate(H, u0: State, cfg: IntegratorConfig, T: float, p: float = 2.0) -> Trajectory:
    """
    Advance u0 under H = H0 + P for time T

    Args:
        H: Hamiltonian with lattice, theta, omega (FrequencyVector) and P
        u0: Initial state on H's lattice
        cfg: Integrator configuration
        T: Final time (> 0)
        p: Sobolev index of the recorded norm

    Returns:
        Trajectory sampled every cfg.sample_every steps, always including t=0 and t=T
    """
    if u0.lattice != H.lattice:
        raise LatticeMismatchError("initial state is not on the Hamiltonian's lattice")
    if T <= 0:
        raise ValueError("integration time must be positive")
    lattice = H.lattice
    form = SymplecticForm.of(lattice)
    omega = H.omega.array(lattice)
    field = VectorField(lattice, form, H.P, omega)
    advisory = cfg.dt * float(np.max(np.abs(omega))) if omega.size else 0.0
    if advisory > 1.0:
        dynamics_logger.warning(f"dt * max|omega| = {advisory:.3f} exceeds 1")
    n, h = step_plan(T, cfg.dt)
    if cfg.scheme == "dop853":
        sample_steps = list(range(0, n + 1, cfg.sample_every))
        if sample_steps[-1] != n:
            sample_steps.append(n)
        times = np.array([k * h for k in sample_steps])
        times[-1] = T
        states = reference_flow(field, u0.u, T, t_eval=times)
    else:
        stepper = Stepper(field, cfg)
        u = np.array(u0.u, dtype=complex)
        times_list, states_list = [0.0], [u.copy()]
        for k in range(1, n + 1):
            u = stepper.step(u, h)
            if k % cfg.sample_every == 0 or k == n:
                times_list.append(T if k == n else k * h)
                states_list.append(u.copy())
        times, states = np.array(times_list), np.array(states_list)
    trajectory = Trajectory(lattice, p, times, states)
    trajectory.energy = hamiltonian_energy(omega, H.P, states)
    trajectory.norm_p = np.array([sobolev_norm(State(lattice, s), p) for s in states])
    trajectory.momentum = np.array([momentum_functional(State(lattice, s)) for s in states])
    dynamics_logger.debug(f"Integrated {n} steps of {cfg.scheme} to T={T}")
    return trajectory
