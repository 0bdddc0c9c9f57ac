"""
Physical-space synthesis of psi and trapezoidal quadrature of the nonlinear energy
"""
import math
from typing import Tuple

import numpy as np

from frontend.nonlinearity import NonlinearitySpec
from polynomial.lattice import State


def grid_size(F: NonlinearitySpec, J: int) -> int:
    """Even n > r J + Kmax, enough for the trapezoid rule to be exact on every integrand"""
    n = max(F.max_degree * J + F.kmax + 1, 2 * J + 2)
    return n + (n % 2)


def fourier_amplitudes(s: State, kind: str) -> np.ndarray:
    """psi_j = u_j (type1) or |j|^(1/2) u_j (type2), in lattice mode order"""
    if kind == "type2":
        return np.sqrt(np.abs(s.lattice.mode_array())) * s.u
    return np.array(s.u, dtype=complex)


def synthesize(s: State, kind: str, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    psi(x) and psi_x(x) on x_k = 2 pi k / n from psi = sum psi_j e^{ijx} / sqrt(2 pi)

    Returns:
        (x, psi, psi_x)
    """
    modes = np.array(s.lattice.modes)
    if n <= 2 * int(np.max(np.abs(modes))):
        raise ValueError(f"grid of {n} points aliases modes up to {np.max(np.abs(modes))}")
    amplitudes = fourier_amplitudes(s, kind)
    spectrum = np.zeros(n, dtype=complex)
    derivative = np.zeros(n, dtype=complex)
    spectrum[modes % n] = amplitudes
    derivative[modes % n] = 1j * modes * amplitudes
    scale = n / math.sqrt(2 * math.pi)
    x = 2 * math.pi * np.arange(n) / n
    return x, scale * np.fft.ifft(spectrum), scale * np.fft.ifft(derivative)


def physical_energy(F: NonlinearitySpec, s: State, kind: str, include_quadratic: bool = False) -> complex:
    """
    Nonlinear energy by the trapezoidal rule

    type1: int (i/2) dF/dx + i dF/dpsi psi_x dx, with dF/dx the explicit x-derivative
    type2: int F dx

    Quadratic F terms are skipped unless include_quadratic, matching P.
    """
    n = grid_size(F, s.lattice.J)
    x, psi, psi_x = synthesize(s, kind, n)
    psibar = np.conj(psi)
    density = np.zeros(n, dtype=complex)
    for (a, b, kappa), c in sorted(F.flattened().items()):
        if a + b < 3 and not include_quadratic:
            continue
        wave = c * np.exp(1j * kappa * x)
        if kind == "type2":
            density += wave * psi ** a * psibar ** b
            continue
        density += 0.5j * (1j * kappa) * wave * psi ** a * psibar ** b
        if a > 0:
            density += 1j * a * wave * psi ** (a - 1) * psibar ** b * psi_x
    return complex(2 * math.pi / n * np.sum(density))
