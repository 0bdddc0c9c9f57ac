"""
Numerical realization of the normalizing change of coordinates T = Phi_{S0} o ... o Phi_{Sr*}
"""
from typing import Literal, Optional, Sequence

from bracket.symplectic import SymplecticForm
from dynamics.integrators import polynomial_flow
from helper.exceptions import TransformDomainError
from logs.logger import normalform_logger
from polynomial.lattice import State, sobolev_norm
from polynomial.polynomial import Polynomial
from settings import settings

Direction = Literal["forward", "inverse"]


def _escape_watch(lattice, p: float, reference: float):
    limit = settings.FLOW_ESCAPE_FACTOR * reference

    def watch(u):
        norm = sobolev_norm(State(lattice, u), p)
        if norm > limit:
            raise TransformDomainError(f"||u||_{p} reached {norm:.3e} > {limit:.3e} mid-flow")

    return watch


def transform_state(generators: Sequence[Polynomial], s: State, direction: Direction = "forward",
                    theta: Optional[int] = None, step: Optional[float] = None,
                    scheme: str = "implicit_midpoint", p: float = 2.0) -> State:
    """
    Apply T (forward) or its inverse to a state

    The forward map flows the last generator first, each for time +1;
    the inverse flows S0 first, each for time -1.

    Args:
        generators: S^(0) .. S^(r*) as produced by birkhoff_iterate
        s: State on the generators' lattice
        direction: "forward" or "inverse"
        theta: Symplectic-form selector (None uses the lattice's theta)
        step: Flow step (None uses settings.FLOW_STEP)
        scheme: "implicit_midpoint" or "dop853"
        p: Sobolev index of the escape watch

    Returns:
        Transformed state

    Raises:
        TransformDomainError: the p-norm grew past FLOW_ESCAPE_FACTOR times its initial value
    """
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    form = None if theta is None else SymplecticForm(theta=theta)
    reference = sobolev_norm(s, p)
    u = s.u.copy()
    if reference == 0.0:
        return State(s.lattice, u)
    watch = _escape_watch(s.lattice, p, reference)
    if direction == "forward":
        order, time = list(reversed(generators)), 1.0
    else:
        order, time = list(generators), -1.0
    for S in order:
        if S.is_zero:
            continue
        u = polynomial_flow(S, form, u, time, step=step, scheme=scheme, watch=watch)
    return State(s.lattice, u)


def near_identity_ratio(generators: Sequence[Polynomial], s: State, r_star: int, p: float = 2.0,
                        step: Optional[float] = None) -> float:
    """||T(s) - s||_p / ||s||_p^(2 - 1/(2 (r*+1)^2)), a diagnostic of the near-identity bound"""
    norm = sobolev_norm(s, p)
    if norm == 0.0:
        return 0.0
    moved = transform_state(generators, s, "forward", step=step, p=p)
    ratio = sobolev_norm(moved - s, p) / norm ** (2.0 - 1.0 / (2.0 * (r_star + 1) ** 2))
    normalform_logger.debug(f"Near-identity ratio at ||s||_{p}={norm:.3e}: {ratio:.3e}")
    return ratio
