"""End-to-end acceptance gate.

Each test exercises one release criterion at its stated tolerance and
prints a single PASS/FAIL line so the gate can be read off the verbose
pytest output directly.
"""

import time

import numpy as np
import pytest

from spincat.dynamics import (NmrParams, atom_field_hamiltonian, cat_time,
                              effective_hamiltonian, evolve,
                              free_evolution_schedule, nmr_hamiltonian)
from spincat.smp import objective_for_test, optimize_smp
from spincat.spin_ops import (SpinSystem, angular_momentum,
                              euler_rotation_matrix, rotation_operator,
                              spherical_tensor_basis)
from spincat.states import (NA23_EPSILON, cat_state, coherent_state, fidelity,
                            projector, traceless_part)
from spincat.tomography import (build_design_matrix, coherence_cycle, measure,
                                pulse_set, reconstruct, synthesize_spectrum,
                                zero_order_cycle)
from spincat.wigner import (grid_argmax, integrate_sphere, wigner_function,
                            wigner_point)

NU_Q = 15220.0
OMEGA_Q = 2 * np.pi * NU_Q


def _report(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def test_criterion_1_analytic_cat_equivalence():
    start = time.time()
    worst = 0.0
    for I in (1.0, 1.5, 2.0, 2.5, 3.0):
        sys = SpinSystem(I)
        H = effective_hamiltonian(sys, OMEGA_Q, 0)
        for p in (0, 1):
            H = effective_hamiltonian(sys, OMEGA_Q, p)
            for vp in (0.0, np.pi / 3):
                evolved = evolve(coherent_state(sys, np.pi / 2, vp), H,
                                 cat_time(NU_Q))
                err = np.linalg.norm(evolved - cat_state(sys, np.pi / 2, vp, p))
                worst = max(worst, err)
    elapsed = time.time() - start
    _report("criterion 1: analytic cat-state equivalence",
            worst < 1e-9 and elapsed < 1.0,
            f"max norm error {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_schedule_periodicity():
    sys = SpinSystem(1.5)
    devs_p1 = free_evolution_schedule(sys, 1, NU_Q, [2, 4])
    devs_p0 = free_evolution_schedule(sys, 0, NU_Q, [2])
    init = projector(coherent_state(sys, np.pi / 2, 0.0))
    flipped = projector(coherent_state(sys, np.pi / 2, np.pi))
    f1 = fidelity(devs_p1[0], flipped)
    f2 = fidelity(devs_p1[1], init)
    f3 = fidelity(devs_p0[0], init)
    ok = min(f1, f2, f3) >= 1 - 1e-10
    _report("criterion 2: free-evolution schedule periodicity", ok,
            f"fidelities {f1:.12f}, {f2:.12f}, {f3:.12f}")


def test_criterion_3_wigner_normalization_and_signature():
    start = time.time()
    sys = SpinSystem(1.5)
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(50):
        A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = A @ A.conj().T
        rho /= np.trace(rho).real
        grid = wigner_function(sys, rho)
        worst = max(worst, abs(integrate_sphere(grid) - 1))
    grid = wigner_function(sys, projector(coherent_state(sys, np.pi / 2, 0.0)))
    th, ph = grid_argmax(grid)
    cell_ok = (abs(th - np.pi / 2) < np.pi / grid.n_theta
               and min(ph, 2 * np.pi - ph) < 2 * np.pi / grid.n_phi)
    phi = np.arange(256) * 2 * np.pi / 256
    vals = wigner_point(sys, projector(cat_state(sys, np.pi / 2, 0.0, 1)),
                        np.full_like(phi, np.pi / 2), phi)
    # count extrema on the periodic scan so ones at phi = 0 are not missed
    slopes = np.sign(np.diff(vals, append=vals[0]))
    sign_changes = np.diff(slopes, append=slopes[0])
    n_max = int((sign_changes < 0).sum())
    n_min = int((sign_changes > 0).sum())
    elapsed = time.time() - start
    ok = worst < 1e-6 and cell_ok and n_max == 3 and n_min == 3 and elapsed < 10
    _report("criterion 3: quasiprobability normalization and signature", ok,
            f"max |int-1| {worst:.2e}, argmax-in-cell {cell_ok}, "
            f"{n_max} maxima / {n_min} minima, {elapsed:.1f}s")


def test_criterion_4_tomography_roundtrip():
    start = time.time()
    sys = SpinSystem(1.5)
    nmr = NmrParams(0.0, 0.0, OMEGA_Q)
    cycles = pulse_set(sys)
    design = build_design_matrix(sys, cycles, nmr)
    rng = np.random.default_rng(20)
    worst = 0.0
    for _ in range(100):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho = projector(psi / np.linalg.norm(psi))
        B = measure(sys, rho, cycles, nmr)
        rec, _ = reconstruct(design, B, sys)
        worst = max(worst, 1 - fidelity(rec, rho))
    fids = []
    for trial in range(50):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho = projector(psi / np.linalg.norm(psi))
        B = measure(sys, rho, cycles, nmr, noise_sigma=0.01, seed=trial)
        rec, _ = reconstruct(design, B, sys)
        fids.append(fidelity(rec, rho))
    fids = np.sort(fids)
    median = float(np.median(fids))
    p5 = float(fids[int(0.05 * len(fids))])
    elapsed = time.time() - start
    ok = worst < 1e-8 and median >= 0.98 and p5 >= 0.96 and elapsed < 30
    _report("criterion 4: tomography round-trip", ok,
            f"max noise-free infidelity {worst:.2e}, noisy median {median:.4f}, "
            f"5th pct {p5:.4f}, {elapsed:.1f}s")


def test_criterion_5_hamiltonian_identities():
    sys = SpinSystem(1.5)
    worst_a = worst_b = 0.0
    for p in (0, 1, 2, 3):
        nmr = NmrParams(omega_L=1e6, omega_RF=1e6 - p * OMEGA_Q / 2,
                        omega_Q=OMEGA_Q)
        Ha = nmr_hamiltonian(sys, nmr)
        Hb = effective_hamiltonian(sys, OMEGA_Q, p)
        worst_a = max(worst_a, np.abs(Ha - Hb).max())
        if p >= 1:
            Hc = atom_field_hamiltonian(sys, OMEGA_Q / 2, (p - 1) / 2)
            resid = np.abs(traceless_part(Hb) + traceless_part(Hc)).max()
            worst_b = max(worst_b, resid)
    scale = OMEGA_Q
    ok = worst_a / scale < 1e-12 and worst_b / scale < 1e-12
    _report("criterion 5: Hamiltonian identities", ok,
            f"relative residues {worst_a / scale:.2e}, {worst_b / scale:.2e}")


def test_criterion_6_numeric_constants():
    sys = SpinSystem(1.5)
    t_S_us = cat_time(NU_Q) * 1e6
    lines = synthesize_spectrum(sys, np.eye(4) / 4, zero_order_cycle(sys)[0],
                                NmrParams(0.0, 0.0, OMEGA_Q))
    freqs = np.sort(lines.frequencies)
    ok = (abs(t_S_us - 32.85) < 0.01
          and NA23_EPSILON == 0.426e-5
          and len(freqs) == 3
          and abs(freqs[0] + 15220.0) < 1e-9
          and abs(freqs[2] - 15220.0) < 1e-9)
    _report("criterion 6: numeric constants", ok,
            f"t_S {t_S_us:.4f} us, epsilon {NA23_EPSILON}, "
            f"satellites {freqs[0]:.1f}/{freqs[2]:.1f} Hz")


def test_criterion_7_smp_optimizer():
    start = time.time()
    sys = SpinSystem(1.5)
    nmr = NmrParams(0.0, 0.0, OMEGA_Q)
    target = coherent_state(sys, np.pi / 2, 0.0)
    res = optimize_smp(sys, nmr, target, n_segments=20, delta_t=0.5e-6, seed=0)
    elapsed = time.time() - start
    # analytic gradient vs central differences on a random point
    rng = np.random.default_rng(7)
    nv, ns, dt = 2, 4, 0.5e-6
    x = np.empty((nv, ns, 2))
    x[..., 0] = rng.uniform(0.2, 1.0, (nv, ns)) * 2 * np.pi * 40e3
    x[..., 1] = rng.uniform(0, 2 * np.pi, (nv, ns))
    x = x.ravel()
    _, g = objective_for_test(sys, nmr, target, x, dt, nv, ns)
    num = np.zeros_like(x)
    for i in range(len(x)):
        h = 1e-6 * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        num[i] = (objective_for_test(sys, nmr, target, xp, dt, nv, ns)[0]
                  - objective_for_test(sys, nmr, target, xm, dt, nv, ns)[0]) / (2 * h)
    grad_rel = np.abs(g - num).max() / np.abs(num).max()
    ok = res.fidelity >= 0.99 and elapsed < 60 and grad_rel < 1e-5
    _report("criterion 7: modulated-pulse optimizer", ok,
            f"fidelity {res.fidelity:.6f}, {elapsed:.1f}s, "
            f"gradient rel err {grad_rel:.2e}")


def test_criterion_8_property_suites():
    start = time.time()
    ok = True
    details = []
    # commutators and Casimir across spins
    for I in (0.5, 1.0, 1.5, 2.5, 5.0):
        sys = SpinSystem(I)
        ops = angular_momentum(sys)
        ok &= np.allclose(ops.Ix @ ops.Iy - ops.Iy @ ops.Ix, 1j * ops.Iz,
                          atol=1e-12)
        ok &= np.allclose(ops.Isq, I * (I + 1) * np.eye(sys.d), atol=1e-10)
    details.append("algebra")
    # tensor completeness
    sys = SpinSystem(1.5)
    rng = np.random.default_rng(30)
    M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    basis = spherical_tensor_basis(sys)
    rebuilt = sum(np.trace(M @ t.conj().T) * t for t in basis.values())
    ok &= np.allclose(rebuilt, M, atol=1e-10)
    details.append("tensor completeness")
    # propagator unitarity
    H = effective_hamiltonian(sys, OMEGA_Q, 1)
    U = evolve(np.eye(4, dtype=complex), H, 1e-4)
    ok &= bool(np.abs(U @ U.conj().T - np.eye(4)).max() < 1e-12)
    details.append("unitarity")
    # Wigner reality and covariance
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = A @ A.conj().T
    rho /= np.trace(rho).real
    a, b, g = rng.uniform(0, 2 * np.pi, 3)
    Urot = rotation_operator(sys, a, b, g)
    R = euler_rotation_matrix(a, b, g)
    for _ in range(10):
        th = rng.uniform(0.1, np.pi - 0.1)
        ph = rng.uniform(0, 2 * np.pi)
        n = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph),
                      np.cos(th)])
        nb = R.T @ n
        w1 = wigner_point(sys, Urot @ rho @ Urot.conj().T, th, ph)
        w2 = wigner_point(sys, rho, np.arccos(np.clip(nb[2], -1, 1)),
                          np.arctan2(nb[1], nb[0]))
        ok &= bool(abs(w1 - w2) < 1e-8)
    details.append("covariance")
    # phase-cycling selectivity for one off-target order
    nmr = NmrParams(0.0, 0.0, OMEGA_Q)
    cycle = coherence_cycle(sys, 2, np.pi / 2)
    T = basis[(3, 1)]
    acc = np.zeros(3, dtype=complex)
    for pulse in cycle:
        Th = (T + T.conj().T) / 2
        acc += synthesize_spectrum(sys, Th, pulse, nmr).amplitudes
    ok &= bool(np.abs(acc).max() / len(cycle) < 1e-10)
    details.append("selectivity")
    elapsed = time.time() - start
    ok = bool(ok) and elapsed < 120
    _report("criterion 8: property suites", ok,
            ", ".join(details) + f", {elapsed:.1f}s")
