"""Rotating-frame Hamiltonians and exact unitary evolution.

All Hamiltonians are stored divided by hbar (rad/s).  Propagators are
built by eigendecomposition so they stay unitary to rounding.
"""

from dataclasses import dataclass

import numpy as np

from .spin_ops import SpinSystem, angular_momentum, expm_hermitian, require_hermitian
from .states import coherent_state, projector


@dataclass(frozen=True)
class NmrParams:
    """Rotating-frame parameters: Larmor, carrier, quadrupolar and RF
    angular frequencies (rad/s) plus the RF phase upsilon (rad)."""

    omega_L: float
    omega_RF: float
    omega_Q: float
    omega_1: float = 0.0
    upsilon: float = 0.0

    def __post_init__(self):
        for name in ("omega_L", "omega_RF", "omega_Q", "omega_1", "upsilon"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class QuadrupolarParams:
    omega_Q: float
    eta: float = 0.0

    def __post_init__(self):
        if not 0 <= self.eta <= 1:
            raise ValueError("asymmetry parameter must lie in [0, 1]")


def nmr_hamiltonian(sys: SpinSystem, params: NmrParams) -> np.ndarray:
    """-(wL-wRF) Iz + (wQ/6)(3 Iz^2 - I^2) + w1 (Ix cos v + Iy sin v)."""
    ops = angular_momentum(sys)
    H = (-(params.omega_L - params.omega_RF) * ops.Iz
         + params.omega_Q / 6 * (3 * ops.Iz @ ops.Iz - ops.Isq)
         + params.omega_1 * (ops.Ix * np.cos(params.upsilon)
                             + ops.Iy * np.sin(params.upsilon)))
    return H


def effective_hamiltonian(sys: SpinSystem, omega_Q: float, p: int) -> np.ndarray:
    """Resonant nonlinear Hamiltonian -(wQ/2)(p Iz - Iz^2 + I^2/3), the
    on-resonance limit of the rotating-frame Hamiltonian with the carrier
    tuned p half-quadrupolar-splittings below the Larmor frequency."""
    if p != round(p):
        raise ValueError("p must be an integer")
    ops = angular_momentum(sys)
    return -omega_Q / 2 * (p * ops.Iz - ops.Iz @ ops.Iz + ops.Isq / 3)


def atom_field_hamiltonian(sys: SpinSystem, kappa: float, nbar: float) -> np.ndarray:
    """Dispersive atom-field form kappa ((2 nbar + 1) Iz - Iz^2 + I^2)."""
    if nbar < 0:
        raise ValueError("mean photon number must be non-negative")
    ops = angular_momentum(sys)
    return kappa * ((2 * nbar + 1) * ops.Iz - ops.Iz @ ops.Iz + ops.Isq)


def quadrupolar_hamiltonian(sys: SpinSystem, params: QuadrupolarParams) -> np.ndarray:
    """(wQ/6)[(3 Iz^2 - I^2) + eta (Ix^2 - Iy^2)]."""
    ops = angular_momentum(sys)
    return params.omega_Q / 6 * ((3 * ops.Iz @ ops.Iz - ops.Isq)
                                 + params.eta * (ops.Ix @ ops.Ix - ops.Iy @ ops.Iy))


def evolve(state_or_rho: np.ndarray, H: np.ndarray, t: float) -> np.ndarray:
    """Apply U = exp(-i H t); U|psi> for vectors, U rho U^dag for matrices."""
    require_hermitian(H, "Hamiltonian")
    U = expm_hermitian(H, t)
    if state_or_rho.ndim == 1:
        return U @ state_or_rho
    return U @ state_or_rho @ U.conj().T


def cat_time(nu_Q: float) -> float:
    """Quarter-period t_S = pi/omega_Q = 1/(2 nu_Q) in seconds."""
    if nu_Q <= 0:
        raise ValueError("nu_Q must be positive")
    return 1.0 / (2.0 * nu_Q)


def free_evolution_schedule(sys: SpinSystem, p: int, nu_Q: float, checkpoints,
                            vartheta: float = np.pi / 2, varphi: float = 0.0):
    """Deviation matrices of an initial coherent state after free evolution
    at the requested multiples of t_S under the resonant nonlinear
    Hamiltonian.  Checkpoint times are formed as exact multiples of t_S."""
    omega_Q = 2 * np.pi * nu_Q
    H = effective_hamiltonian(sys, omega_Q, p)
    t_S = cat_time(nu_Q)
    rho0 = projector(coherent_state(sys, vartheta, varphi))
    return [evolve(rho0, H, k * t_S) for k in checkpoints]
