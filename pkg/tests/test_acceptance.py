"""Acceptance suite: one test per numbered criterion, at the stated tolerance.

The conftest terminal-summary hook prints a PASS/FAIL line per criterion at
the end of the run.
"""

import math
import time

import numpy as np

from qrouter.circuit import Circuit, Gate, Measure, circuit_unitary
from qrouter.config import parse_config
from qrouter.correction import (
    ChannelParams,
    analytic_p1,
    channel_subcircuit,
    choose_theta,
    correction_subcircuit,
)
from qrouter.experiment import (
    RouterInputs,
    build_router_circuit,
    exact_router_state,
    ideal_density,
    run_point,
)
from qrouter.gates import GateKind
from qrouter.linalg import fidelity, trace_distance
from qrouter.sim import NoiseSpec, exact_register_distribution, run_statevector, sample_shots
from qrouter.tomo import (
    build_calibration,
    expectations_from_counts,
    mitigate,
    reconstruct,
    settings,
)
from qrouter.transpile import CouplingMap, transpile, verify_equivalence

from test_transpile import random_library_circuit

GRID = [round(0.1 * k, 1) for k in range(11)]


def p_curve(gamma):
    """P(gamma) at the gamma_g = 0.5 operating point (verified in
    test_correction against brute-force branch probabilities)."""
    return ((3 - 2 * gamma) / (3 * (2 - gamma))) ** 2


def test_criterion_1_ideal_routing():
    start = time.perf_counter()
    rho, acc = exact_router_state(ChannelParams(0.0, 0.5), "no-noise")
    f = fidelity(ideal_density(), rho)
    elapsed = time.perf_counter() - start
    assert abs(f - 1.0) <= 1e-10
    assert abs(acc - 1.0) <= 1e-12
    assert elapsed < 1.0


def test_criterion_2_matched_correction_identity():
    signal = RouterInputs().signal
    target = signal.vector()
    for gamma in [round(0.1 * k, 1) for k in range(10)]:
        ops = [Gate(GateKind.H, (0,)), Gate(GateKind.T, (0,))]
        ops += list(channel_subcircuit(gamma, 0, 1))
        ops += list(correction_subcircuit(choose_theta(gamma), 0, 2))
        st = run_statevector(Circuit(3, ops))
        # ancilla and environment are post-selected back to |0>, so the full
        # state is (signal qubit) x |00>
        got = st.amplitudes.reshape(2, 4)[:, 0]
        f = abs(np.vdot(target, got)) ** 2
        assert abs(f - 1.0) <= 1e-10, (gamma, f)


def test_criterion_3_success_probability_curve():
    # spot values of the curve itself
    assert abs(p_curve(0.0) - 0.25) < 1e-12
    assert abs(p_curve(0.5) - (4 / 9) ** 2) < 1e-12
    assert abs(p_curve(0.5) - 0.19753086419753085) < 1e-12
    assert abs(p_curve(0.9) - 0.13223140495867766) < 1e-12
    shots = 100_000
    for gi, gamma in enumerate(GRID):
        rc = build_router_circuit(ChannelParams(gamma, 0.5), "both-qubits", ("Z", "Z", "Z"))
        rec = sample_shots(rc.circuit, shots, NoiseSpec(rng_seed=3000 + gi))
        n_channel = rec.postselect_survivors[rc.channel_ps_count - 1]
        p_est = rec.shots_kept / n_channel
        expected = p_curve(gamma)
        sigma = math.sqrt(expected * (1 - expected) / n_channel)
        assert abs(p_est - expected) <= 3 * sigma, (gamma, p_est, expected)


def test_criterion_4_channel_analytics():
    signal = RouterInputs().signal
    # exact-mode branch probabilities match p1 to 1e-10 across the grid
    for gamma in GRID:
        ops = [Gate(GateKind.H, (0,)), Gate(GateKind.T, (0,))]
        ops += list(channel_subcircuit(gamma, 0, 1))
        st = run_statevector(Circuit(2, ops))
        assert abs(st.accumulated_postselect_prob - analytic_p1(signal, gamma)) <= 1e-10
    # sampled survival fractions match p1 within 3 binomial sigma
    shots = 100_000
    for gi, gamma in enumerate((0.2, 0.5, 0.8)):
        ops = [Gate(GateKind.H, (0,)), Gate(GateKind.T, (0,))]
        ops += list(channel_subcircuit(gamma, 0, 1))
        ops += [Measure(0, "c0", 0)]
        rec = sample_shots(Circuit(2, ops, {"c0": 1}), shots, NoiseSpec(rng_seed=4000 + gi))
        p1 = analytic_p1(signal, gamma)
        sigma = math.sqrt(p1 * (1 - p1) / shots)
        assert abs(rec.shots_kept / shots - p1) <= 3 * sigma, gamma


def test_criterion_5_tomography_round_trip():
    tomo_settings = settings(3)
    assert len(tomo_settings) == 27
    # exact-expectation reconstruction: trace distance < 1e-9
    sigma = ideal_density()
    counts = {}
    for s in tomo_settings:
        rc = build_router_circuit(ChannelParams(0.0, 0.5), "no-noise", s)
        counts[s] = exact_register_distribution(rc.circuit, "c0")
    rho = reconstruct(expectations_from_counts(counts))
    assert trace_distance(sigma, rho) < 1e-9
    # sampled reconstruction at 100k shots/setting: fidelity >= 0.99
    cfg = parse_config({"variant": "no-noise", "shots_per_setting": 100_000})
    res = run_point(cfg, 0.0, 0)
    assert res.fidelity >= 0.99


def test_criterion_6_transpiler_soundness():
    start = time.perf_counter()
    rng = np.random.default_rng(606)
    cmap = CouplingMap.jakarta()
    for k in range(200):
        circ = random_library_circuit(rng, n_gates=int(rng.integers(5, 21)))
        result = transpile(circ, cmap)
        report = verify_equivalence(circ, result)
        assert report.equivalent and report.max_deviation < 1e-9, (k, report.max_deviation)
    # CSWAP decomposition: exhaustive check on all 8 basis states
    cswap = Circuit(3, [Gate(GateKind.CSWAP, (0, 1, 2))])
    u = circuit_unitary(transpile(cswap, CouplingMap(3, ((0, 1), (1, 2)))).circuit)
    # routed on a line map, wires may move; verify through the checker first
    res = transpile(cswap, CouplingMap(3, ((0, 1), (1, 2))))
    assert verify_equivalence(cswap, res).equivalent
    # and on a map where no swap is needed, check the raw action per basis state
    from qrouter.transpile import decompose_to_basis

    u = circuit_unitary(decompose_to_basis(cswap))
    u = u * np.exp(-1j * np.angle(u[0, 0]))
    for c in (0, 1):
        for a in (0, 1):
            for b in (0, 1):
                src = (c << 2) | (a << 1) | b
                dst = (c << 2) | ((b << 1) | a if c else (a << 1) | b)
                col = np.zeros(8)
                col[dst] = 1.0
                assert np.max(np.abs(u[:, src] - col)) < 1e-9
    assert time.perf_counter() - start < 60.0


def test_criterion_7_mitigation_efficacy():
    rc = build_router_circuit(ChannelParams(0.0, 0.5), "no-noise", ("Z", "Z", "Z"))
    ideal = exact_register_distribution(rc.circuit, "c0")
    rec = sample_shots(rc.circuit, 100_000, NoiseSpec.uniform_readout(0.02, 0.02, 7, rng_seed=777))
    raw = np.zeros(8)
    for bits, c in rec.counts["c0"].items():
        raw[int(bits, 2)] = c / rec.shots_kept
    cal = build_calibration(3, NoiseSpec(((0.02, 0.02),) * 3))
    corrected = mitigate(rec.counts["c0"], cal)
    tv_raw = 0.5 * float(np.abs(raw - ideal).sum())
    tv_corrected = 0.5 * float(np.abs(corrected - ideal).sum())
    assert tv_raw >= 5.0 * tv_corrected, (tv_raw, tv_corrected)


def test_criterion_8_error_correction_trend_with_device_noise():
    # The hardware-device fidelities (0.85 baseline, 0.48 -> 0.61) are
    # device-specific and are NOT targets; the substitute property is the
    # direction of the EC-vs-no-EC separation under synthetic depolarizing
    # noise (0.01 per CX) for gamma >= 0.5, averaged over 10 repetitions.
    base = {
        "variant": "signal-only",
        "shots_per_setting": 10_000,
        "noise": {"depolarizing_per_cx": 0.01},
        "base_seed": 88,
    }
    cfg_ec = parse_config(base)
    cfg_no = parse_config({**base, "error_correction": False})
    for gamma in (0.5, 0.7, 0.9):
        f_ec = np.mean([run_point(cfg_ec, gamma, rep).fidelity for rep in range(10)])
        f_no = np.mean([run_point(cfg_no, gamma, rep).fidelity for rep in range(10)])
        assert f_ec > f_no, (gamma, f_ec, f_no)


def test_criterion_9_determinism(tmp_path):
    from qrouter.sweep import run_sweep

    cfg = parse_config(
        {
            "gamma_grid": [0.0, 0.6],
            "repetitions": 2,
            "shots_per_setting": 1_000,
            "base_seed": 99,
            "noise": {"readout_p01": 0.01, "readout_p10": 0.01, "depolarizing_per_cx": 0.005},
            "mitigation": True,
        }
    )
    a, b = tmp_path / "a", tmp_path / "b"
    run_sweep(cfg, out_dir=str(a))
    run_sweep(cfg, out_dir=str(b))
    names = ["results.csv", "summary.csv", "ideal_density.json"]
    names += sorted(p.name for p in a.glob("dm_gamma*.json"))
    assert len(names) == 3 + 4
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
