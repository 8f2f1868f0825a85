"""Numerical design of strongly modulating pulses.

A pulse sequence is a chain of piecewise-constant RF segments; each
segment evolves the system under the full rotating-frame Hamiltonian
with the segment's amplitude and phase (a zero-amplitude segment is a
free-evolution delay).  The optimizer tunes several independent
modulations at once and scores the temporal average of the evolved
deviation matrices against the traceless target deviation: averaging
over modulations is what lets a set of unitaries turn the equilibrium
Iz deviation into an effective pure-state deviation.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .spin_ops import SpinSystem, angular_momentum
from .states import projector, traceless_part
from .dynamics import NmrParams, nmr_hamiltonian

# twice the amplitude of a 10 us pi/2 pulse; a cap at the calibration
# amplitude itself leaves no rotation headroom to differentiate the
# modulations and stalls the achievable fidelity (see notes in README)
DEFAULT_AMPLITUDE_CAP = 2 * np.pi * 50e3


@dataclass(frozen=True)
class PulseSegment:
    omega: float       # RF amplitude, rad/s
    phase: float       # rad
    duration: float    # s

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("segment amplitude must be non-negative")
        if self.duration <= 0:
            raise ValueError("segment duration must be positive")


def delay(duration: float) -> PulseSegment:
    """Free-evolution interval (zero RF amplitude)."""
    return PulseSegment(0.0, 0.0, duration)


@dataclass
class PulseSequence:
    segments: list
    metadata: dict = field(default_factory=dict)

    @property
    def duration(self) -> float:
        return sum(s.duration for s in self.segments)

    def to_json(self) -> str:
        """Spectrometer-style interchange format: amplitudes in Hz, phases
        in degrees, durations in microseconds."""
        payload = {
            "segments": [{"amplitude_hz": s.omega / (2 * np.pi),
                          "phase_deg": np.degrees(s.phase),
                          "duration_us": s.duration * 1e6}
                         for s in self.segments],
            "metadata": self.metadata,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PulseSequence":
        payload = json.loads(text)
        segs = [PulseSegment(2 * np.pi * s["amplitude_hz"],
                             np.radians(s["phase_deg"]),
                             s["duration_us"] * 1e-6)
                for s in payload["segments"]]
        return cls(segs, payload.get("metadata", {}))


def segment_hamiltonian(sys: SpinSystem, seg: PulseSegment, nmr: NmrParams) -> np.ndarray:
    from dataclasses import replace
    return nmr_hamiltonian(sys, replace(nmr, omega_1=seg.omega, upsilon=seg.phase))


def sequence_propagator(sys: SpinSystem, seq: PulseSequence, nmr: NmrParams) -> np.ndarray:
    U = np.eye(sys.d, dtype=complex)
    for seg in seq.segments:
        H = segment_hamiltonian(sys, seg, nmr)
        lam, V = np.linalg.eigh(H)
        U = (V * np.exp(-1j * lam * seg.duration)) @ V.conj().T @ U
    return U


def simulate_sequence(sys: SpinSystem, rho0: np.ndarray, seq: PulseSequence,
                      nmr: NmrParams) -> np.ndarray:
    U = sequence_propagator(sys, seq, nmr)
    return U @ rho0 @ U.conj().T


def temporal_average(sys: SpinSystem, variants, rho0: np.ndarray,
                     nmr: NmrParams) -> np.ndarray:
    """Arithmetic mean of the deviation matrix evolved under each variant."""
    if not variants:
        raise ValueError("need at least one pulse sequence")
    if rho0.shape != (sys.d, sys.d):
        raise ValueError("deviation matrix dimension mismatch")
    acc = np.zeros((sys.d, sys.d), dtype=complex)
    for seq in variants:
        acc += simulate_sequence(sys, rho0, seq, nmr)
    return acc / len(variants)


# ---------------------------------------------------------------------------
# optimizer internals


def _batched_segment_propagators(H_static, ops, x, dt):
    """Propagators and their parameter derivatives for every segment.

    x has shape (n_seq, n_seg, 2) = (amplitude, phase).  Returns U and the
    Frechet derivatives dU/domega, dU/dphase, all (n_seq, n_seg, d, d).
    """
    w = x[..., 0]
    ph = x[..., 1]
    Ix, Iy = ops.Ix, ops.Iy
    axis = np.cos(ph)[..., None, None] * Ix + np.sin(ph)[..., None, None] * Iy
    daxis = -np.sin(ph)[..., None, None] * Ix + np.cos(ph)[..., None, None] * Iy
    H = H_static + w[..., None, None] * axis
    lam, V = np.linalg.eigh(H)
    e = np.exp(-1j * lam * dt)
    U = (V * e[..., None, :]) @ np.swapaxes(V, -1, -2).conj()
    # Loewner kernel for the Frechet derivative of exp(-i H dt)
    L = lam[..., :, None] - lam[..., None, :]
    num = e[..., :, None] - e[..., None, :]
    small = np.abs(L) < 1e-12 * np.maximum(1.0, np.abs(lam).max())
    mid = np.exp(-1j * dt * (lam[..., :, None] + lam[..., None, :]) / 2)
    G = np.where(small, -1j * dt * mid, num / np.where(small, 1.0, L))
    Vh = np.swapaxes(V, -1, -2).conj()

    def frechet(dH):
        M = Vh @ dH @ V
        return V @ (G * M) @ Vh

    return U, frechet(axis), frechet(w[..., None, None] * daxis)


def _objective_and_gradient(x, sys, H_static, ops, dt, rho0, target, n_variants, n_seg):
    """Negative fidelity of the temporal-averaged evolved deviation against
    the target deviation, with its exact gradient."""
    x = x.reshape(n_variants, n_seg, 2)
    d = sys.d
    U, dUw, dUp = _batched_segment_propagators(H_static, ops, x, dt)
    nt = np.linalg.norm(target)
    rho_bar = np.zeros((d, d), dtype=complex)
    per = []
    for v in range(n_variants):
        pre = [np.eye(d, dtype=complex)]
        for k in range(n_seg):
            pre.append(U[v, k] @ pre[-1])
        Utot = pre[-1]
        suf = [np.eye(d, dtype=complex)]
        for k in range(n_seg - 1, -1, -1):
            suf.append(suf[-1] @ U[v, k])
        suf = suf[::-1]
        per.append((pre, suf, Utot))
        rho_bar += Utot @ rho0 @ Utot.conj().T
    rho_bar /= n_variants
    a = np.trace(rho_bar @ target).real
    b = np.trace(rho_bar @ rho_bar).real
    F = a / (np.sqrt(b) * nt)
    # dF = Tr(drho_bar M) with M the derivative of the normalized overlap
    M = target / (np.sqrt(b) * nt) - (a / (nt * b ** 1.5)) * rho_bar
    grad = np.zeros((n_variants, n_seg, 2))
    for v in range(n_variants):
        pre, suf, Utot = per[v]
        rU = rho0 @ Utot.conj().T @ M
        for k in range(n_seg):
            right = pre[k] @ rU @ suf[k + 1]
            grad[v, k, 0] = 2 * np.einsum("ij,ji->", dUw[v, k], right).real / n_variants
            grad[v, k, 1] = 2 * np.einsum("ij,ji->", dUp[v, k], right).real / n_variants
    return -F, -grad.ravel()


@dataclass
class SmpResult:
    variants: list            # optimized PulseSequence per modulation
    fidelity: float
    history: list             # best objective value after each evaluation
    evaluations: int

    @property
    def sequence(self) -> PulseSequence:
        return self.variants[0]


def objective_for_test(sys, nmr, target_state, x, delta_t, n_variants, n_seg,
                       rho0=None):
    """Exposed objective/gradient hook for finite-difference checks."""
    ops = angular_momentum(sys)
    H_static = nmr_hamiltonian(sys, nmr)
    if rho0 is None:
        rho0 = ops.Iz.copy()
    target = traceless_part(projector(target_state))
    return _objective_and_gradient(np.asarray(x, float), sys, H_static, ops,
                                   delta_t, rho0, target, n_variants, n_seg)


def optimize_smp(sys: SpinSystem, nmr: NmrParams, target_state: np.ndarray,
                 n_segments: int, delta_t: float, budget: int = 40000,
                 n_variants: int = 4, n_starts: int = 3, seed: int = 0,
                 amplitude_cap: float = DEFAULT_AMPLITUDE_CAP,
                 rho0: np.ndarray | None = None) -> SmpResult:
    """Design n_variants modulations of n_segments slices of length delta_t
    that carry the equilibrium Iz deviation into the target state's
    deviation under temporal averaging.

    budget caps the total number of objective evaluations across all
    starts; budget = 0 returns the first initial guess unchanged.
    Deterministic for a fixed seed.
    """
    if n_segments < 1:
        raise ValueError("need at least one segment")
    if amplitude_cap <= 0:
        raise ValueError("amplitude cap leaves no rotation capability")
    ops = angular_momentum(sys)
    H_static = nmr_hamiltonian(sys, NmrParams(nmr.omega_L, nmr.omega_RF, nmr.omega_Q))
    if rho0 is None:
        rho0 = ops.Iz.copy()
    target = traceless_part(projector(target_state))

    history = []
    evals = [0]

    def fun(x):
        f, g = _objective_and_gradient(x, sys, H_static, ops, delta_t, rho0,
                                       target, n_variants, n_segments)
        evals[0] += 1
        history.append(min(history[-1], f) if history else f)
        return f, g

    rng = np.random.default_rng(seed)
    bounds = [(0.0, amplitude_cap), (None, None)] * (n_variants * n_segments)
    best_x = None
    best_f = np.inf
    for _ in range(max(1, n_starts)):
        x0 = np.empty((n_variants, n_segments, 2))
        x0[..., 0] = rng.uniform(0.3, 1.0, size=(n_variants, n_segments)) * amplitude_cap
        x0[..., 1] = rng.uniform(0, 2 * np.pi, size=(n_variants, n_segments))
        x0 = x0.ravel()
        if best_x is None:
            best_x = x0
            if budget > 0:
                best_f = fun(x0)[0]
        remaining = budget - evals[0]
        if remaining <= 0:
            break
        res = minimize(fun, x0, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxfun": remaining, "maxiter": remaining,
                                "ftol": 1e-14, "gtol": 1e-11})
        if res.fun < best_f:
            best_f, best_x = res.fun, res.x
    if budget == 0:
        best_f = _objective_and_gradient(best_x, sys, H_static, ops, delta_t,
                                         rho0, target, n_variants, n_segments)[0]

    xb = best_x.reshape(n_variants, n_segments, 2)
    variants = []
    for v in range(n_variants):
        segs = [PulseSegment(max(0.0, xb[v, k, 0]), xb[v, k, 1] % (2 * np.pi), delta_t)
                for k in range(n_segments)]
        variants.append(PulseSequence(segs, {"variant": v, "fidelity": -best_f}))
    return SmpResult(variants, -best_f, history, evals[0])
