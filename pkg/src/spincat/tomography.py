"""Simulated state tomography by global rotations and phase cycling.

A tomography pulse is a hard rotation of nutation angle theta about an
axis in the transverse plane set by the transmitter phase; the receiver
phase multiplies the acquired signal.  Stepping the transmitter phase in
N steps with receiver phases -(q+1) * phase and summing isolates the
contribution of the coherence order q of the input density matrix (the
detected coherence order is -1, hence the q+1).

Stacking the cycled line amplitudes of a spanning set of cycles gives a
linear system A x = B for the irreducible-tensor coefficients of rho.
The identity component produces no spectral lines under any rotation, so
a trace-constraint row completes the system to full column rank d^2.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .spin_ops import (SpinSystem, angular_momentum, expm_hermitian,
                       spherical_tensor_basis, tensor_keys, require_hermitian)
from .dynamics import NmrParams, quadrupolar_hamiltonian, QuadrupolarParams

FID_POINTS = 4096
FID_DWELL = 12e-6
SVD_CUTOFF = 1e-10
COND_WARN = 1e6
NUQ_JITTER_HZ = 70.0


@dataclass(frozen=True)
class TomographyPulse:
    theta_qst: float
    phi_qst: float
    alpha_qst: float
    target_coherence: int = 0


@dataclass(frozen=True)
class SpectrumLines:
    frequencies: np.ndarray   # Hz offsets of the 2I single-quantum lines
    amplitudes: np.ndarray    # complex line amplitudes

    def __post_init__(self):
        if len(self.frequencies) != len(self.amplitudes):
            raise ValueError("frequency/amplitude length mismatch")


@dataclass
class DesignSystem:
    matrix: np.ndarray        # (n_measurements, d^2) complex
    keys: list                # (L, m) column labels
    condition_number: float
    rank: int


class TomographyRankError(ValueError):
    """Raised when a pulse set cannot determine every tensor coefficient."""

    def __init__(self, rank, needed, null_keys):
        self.rank = rank
        self.needed = needed
        self.null_keys = null_keys
        super().__init__(
            f"design matrix rank {rank} < {needed}; "
            f"weakly determined components: {null_keys}")


def zero_order_cycle(sys: SpinSystem):
    """The four-pulse cycle selecting zero-order coherences: nutation pi/2,
    transmitter phases (pi/2, pi, 3pi/2, 0), receiver phases
    (0, 3pi/2, pi, pi/2)."""
    phis = (np.pi / 2, np.pi, 3 * np.pi / 2, 0.0)
    alphas = (0.0, 3 * np.pi / 2, np.pi, np.pi / 2)
    return [TomographyPulse(np.pi / 2, p, a, 0) for p, a in zip(phis, alphas)]


def coherence_cycle(sys: SpinSystem, q: int, theta: float):
    """N-step cycle isolating order q; N = 4I+1 avoids aliasing over the
    available orders -2I..2I."""
    twoI = round(2 * sys.I)
    if abs(q) > twoI:
        raise ValueError(f"|q| must be <= {twoI}")
    N = 2 * twoI + 1
    pulses = []
    for k in range(N):
        phi = 2 * np.pi * k / N
        alpha = (-(q + 1) * phi) % (2 * np.pi)
        pulses.append(TomographyPulse(theta, phi, alpha, q))
    return pulses


def pulse_set(sys: SpinSystem, nutation_angles=(np.pi / 2, np.pi / 4)):
    """Full rotation/phase-cycling set: the literature zero-order quadruple
    plus cycles for every order at each nutation angle.

    Two nutation angles are required: an exact pi/2 pulse is blind to the
    tensor components whose reduced rotation elements d^L_{+-1,m}(pi/2)
    vanish (e.g. rank 2, m = 0), so a second angle fills those in.
    """
    twoI = round(2 * sys.I)
    cycles = [zero_order_cycle(sys)]
    for theta in nutation_angles:
        for q in range(-twoI, twoI + 1):
            cycles.append(coherence_cycle(sys, q, theta))
    return cycles


def _line_frequencies(sys: SpinSystem, nu_Q: float) -> np.ndarray:
    """Hz offsets of the 2I single-quantum transitions; (nu_Q/2)(2m+1) for
    the transition between m+1 and m."""
    ms = sys.m_values[1:]  # lower level of each transition
    return (nu_Q / 2) * (2 * ms + 1)


def _pulse_propagator(sys: SpinSystem, pulse: TomographyPulse) -> np.ndarray:
    ops = angular_momentum(sys)
    axis = ops.Ix * np.cos(pulse.phi_qst) + ops.Iy * np.sin(pulse.phi_qst)
    return expm_hermitian(axis, pulse.theta_qst)


def _coherence_amplitudes(sys: SpinSystem, rho_rotated: np.ndarray) -> np.ndarray:
    """Detected single-quantum amplitudes rho'_{j,j-1} (I+)_{j-1,j}."""
    ops = angular_momentum(sys)
    d = sys.d
    return np.array([rho_rotated[j, j - 1] * ops.Iplus[j - 1, j] for j in range(1, d)])


def synthesize_spectrum(sys: SpinSystem, rho: np.ndarray, pulse: TomographyPulse,
                        nmr: NmrParams, mode: str = "coherence",
                        n_points: int = FID_POINTS, dwell: float = FID_DWELL,
                        t2: float | None = None) -> SpectrumLines:
    """Line spectrum observed after one tomography pulse.

    "coherence" mode reads the single-quantum coherences directly;
    "fid" mode evolves through the pre-acquisition delay 1/nu_Q, samples
    the complex transverse signal at the given dwell time, and recovers
    the line amplitudes by least-squares projection onto the known line
    frequencies (optionally with a Lorentzian T2 decay).
    """
    require_hermitian(rho, "density matrix")
    nu_Q = nmr.omega_Q / (2 * np.pi)
    freqs = _line_frequencies(sys, nu_Q)
    U = _pulse_propagator(sys, pulse)
    rho_rot = U @ rho @ U.conj().T
    phase = np.exp(1j * pulse.alpha_qst)

    if mode == "coherence":
        amps = _coherence_amplitudes(sys, rho_rot) * phase
        return SpectrumLines(freqs, amps)
    if mode == "fid":
        tau_pre = 1.0 / nu_Q
        t = np.arange(n_points) * dwell
        base = _coherence_amplitudes(sys, rho_rot) * phase
        omega_lines = 2 * np.pi * freqs
        # each line rotates at its transition frequency through the
        # receiver-protection delay and the acquisition window
        start = base * np.exp(1j * omega_lines * tau_pre)
        sig = np.exp(1j * np.outer(t, omega_lines)) * start[None, :]
        if t2 is not None:
            sig = sig * np.exp(-(tau_pre + t) / t2)[:, None]
        s = sig.sum(axis=1)
        # exact line-amplitude extraction: least-squares fit of the sampled
        # signal to the known complex exponentials (removes DFT leakage)
        basis = np.exp(1j * np.outer(t, omega_lines))
        if t2 is not None:
            basis = basis * np.exp(-t / t2)[:, None]
        amps, *_ = np.linalg.lstsq(basis, s, rcond=None)
        if t2 is not None:
            amps = amps * np.exp(tau_pre / t2)
        return SpectrumLines(freqs, amps)
    raise ValueError(f"unknown mode {mode!r}")


def add_line_noise(lines: SpectrumLines, sigma: float, seed) -> SpectrumLines:
    """Seeded complex Gaussian perturbation of the line amplitudes."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return lines
    rng = np.random.default_rng(seed)
    noise = rng.normal(scale=sigma / np.sqrt(2), size=(len(lines.amplitudes), 2))
    return replace(lines, amplitudes=lines.amplitudes + noise[:, 0] + 1j * noise[:, 1])


def jitter_nmr_params(nmr: NmrParams, seed, bound_hz: float = NUQ_JITTER_HZ) -> NmrParams:
    """Quadrupolar-coupling jitter: nu_Q perturbed uniformly within +-70 Hz,
    modelling temperature-induced line broadening."""
    rng = np.random.default_rng(seed)
    return replace(nmr, omega_Q=nmr.omega_Q + 2 * np.pi * rng.uniform(-bound_hz, bound_hz))


def _cycle_amplitudes(sys, rho, cycle, nmr, mode, sigma=0.0, rng=None):
    acc = None
    for pulse in cycle:
        lines = synthesize_spectrum(sys, rho, pulse, nmr, mode=mode)
        amps = lines.amplitudes
        if sigma > 0:
            noise = rng.normal(scale=sigma / np.sqrt(2), size=(len(amps), 2))
            amps = amps + noise[:, 0] + 1j * noise[:, 1]
        acc = amps if acc is None else acc + amps
    return acc / len(cycle)


def measure(sys: SpinSystem, rho: np.ndarray, cycles, nmr: NmrParams,
            mode: str = "coherence", noise_sigma: float = 0.0, seed=None) -> np.ndarray:
    """Stacked cycled line amplitudes plus the trace-constraint entry.

    noise_sigma is expressed as a fraction of the largest noise-free line
    amplitude over the whole measurement set and is applied per acquired
    spectrum (before cycle summation).
    """
    clean = [_cycle_amplitudes(sys, rho, c, nmr, mode) for c in cycles]
    if noise_sigma > 0:
        scale = max(np.abs(np.concatenate(clean)).max(), 1e-300) * noise_sigma
        rng = np.random.default_rng(seed)
        noisy = [_cycle_amplitudes(sys, rho, c, nmr, mode, sigma=scale, rng=rng)
                 for c in cycles]
        stacked = np.concatenate(noisy)
    else:
        stacked = np.concatenate(clean)
    return np.concatenate([stacked, [np.trace(rho)]])


def build_design_matrix(sys: SpinSystem, cycles, nmr: NmrParams,
                        mode: str = "coherence") -> DesignSystem:
    """Columns are the measurement vectors of the unit-coefficient tensor
    operators; rows are cycled line amplitudes plus the trace row."""
    keys = tensor_keys(sys)
    basis = spherical_tensor_basis(sys)
    cols = []
    for key in keys:
        T = basis[key]
        Th = (T + T.conj().T) / 2
        Ta = (T - T.conj().T) / 2j
        # measurement is linear in rho; split the non-Hermitian basis
        # operator into Hermitian parts to reuse the Hermitian-only path
        col = (measure(sys, Th, cycles, nmr, mode)
               + 1j * measure(sys, Ta, cycles, nmr, mode))
        cols.append(col)
    A = np.array(cols).T
    svals = np.linalg.svd(A, compute_uv=False)
    rank = int((svals > SVD_CUTOFF * svals[0]).sum())
    if rank < len(keys):
        _, _, Vh = np.linalg.svd(A)
        null = Vh[rank:]
        null_keys = [keys[i] for i in range(len(keys))
                     if np.abs(null[:, i]).max() > 1e-6]
        raise TomographyRankError(rank, len(keys), null_keys)
    return DesignSystem(A, keys, float(svals[0] / svals[-1]), rank)


def reconstruct(design: DesignSystem, B: np.ndarray, sys: SpinSystem):
    """Least-squares solve for the tensor coefficients and reassembled
    density matrix.  Returns (rho, info) where rho is Hermitized and info
    reports coefficients, the Hermitian residual and conditioning."""
    if len(B) != design.matrix.shape[0]:
        raise ValueError("measurement vector length does not match design matrix")
    X = np.linalg.pinv(design.matrix, rcond=SVD_CUTOFF) @ B
    basis = spherical_tensor_basis(sys)
    raw = np.zeros((sys.d, sys.d), dtype=complex)
    for x, key in zip(X, design.keys):
        raw += x * basis[key]
    rho = (raw + raw.conj().T) / 2
    info = {
        "coefficients": dict(zip(design.keys, X)),
        "hermitian_residual": float(np.linalg.norm(raw - raw.conj().T) / 2),
        "condition_number": design.condition_number,
        "ill_conditioned": design.condition_number > COND_WARN,
    }
    return rho, info


def run_tomography(sys: SpinSystem, rho: np.ndarray, nmr: NmrParams,
                   mode: str = "coherence", noise_sigma: float = 0.0, seed=None,
                   design: DesignSystem | None = None, cycles=None):
    """Convenience pipeline: synthesize, stack, reconstruct."""
    if cycles is None:
        cycles = pulse_set(sys)
    if design is None:
        design = build_design_matrix(sys, cycles, nmr, mode)
    B = measure(sys, rho, cycles, nmr, mode, noise_sigma=noise_sigma, seed=seed)
    return reconstruct(design, B, sys)


def reconstruction_record(sys: SpinSystem, rho, info, target=None,
                          noise_settings=None) -> dict:
    """JSON-serializable record of one reconstruction."""
    from .states import fidelity
    rec = {
        "spin": sys.I,
        "coefficients": {f"{L},{m}": [c.real, c.imag]
                         for (L, m), c in info["coefficients"].items()},
        "rho_re": rho.real.tolist(),
        "rho_im": rho.imag.tolist(),
        "hermitian_residual": info["hermitian_residual"],
        "condition_number": info["condition_number"],
        "ill_conditioned": info["ill_conditioned"],
        "noise": noise_settings or {},
    }
    if target is not None:
        rec["fidelity_vs_target"] = fidelity(rho, target)
    return rec
