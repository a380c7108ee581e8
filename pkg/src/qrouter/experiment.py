"""Full router protocol: state prep, channels, corrections, controlled-swap
routing, tomography, and per-run metrics.

Wire layout of the 7-qubit circuit:

    q0 control        q1 env(control)   q2 ancilla(control)
    q3 signal         q4 env(signal)    q5 ancilla(signal)
    q6 blank (path 2)

The control is prepared with H; the signal with H then T, i.e.
cos(pi/4)|0> + e^{i pi/4} sin(pi/4)|1>. Channels run before corrections
(states traverse the noisy links in transit, the router corrects on
arrival), so post-selection ops are ordered: all channel environments, then
all correction ancillas. The routed output lives on (q0, q3, q6) =
(control, path 1, path 2).

The success-probability estimate conditions on channel survival: it is the
fraction of channel-surviving shots that also pass every correction
post-selection. Channel survival itself (p1 per noisy qubit) is reported
separately.
"""

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate
from .correction import (
    ChannelParams,
    QubitSpec,
    analytic_p1,
    analytic_p2,
    channel_subcircuit,
    choose_theta,
    correction_subcircuit,
)
from .errors import ConfigError
from .gates import GateKind
from .linalg import fidelity, partial_trace
from .sim import NoiseSpec, run_statevector, sample_shots
from .tomo import build_calibration, expectations_from_counts, measurement_rotation, mitigate, reconstruct
from .transpile import CouplingMap, transpile

VARIANTS = ("both-qubits", "signal-only", "no-noise")

_SQ2 = 1.0 / math.sqrt(2.0)

# seed strides decorrelating repetitions and tomography settings
_REP_STRIDE = 10007
_SETTING_STRIDE = 7919

CONTROL, ENV_C, ANC_C, SIGNAL, ENV_S, ANC_S, BLANK = range(7)
OUTPUT_QUBITS = (CONTROL, SIGNAL, BLANK)


@dataclass(frozen=True)
class RouterInputs:
    control: QubitSpec = QubitSpec(_SQ2, _SQ2)
    signal: QubitSpec = QubitSpec(
        complex(math.cos(math.pi / 4)),
        np.exp(1j * math.pi / 4) * math.sin(math.pi / 4),
    )


@dataclass(frozen=True)
class RouterCircuit:
    circuit: Circuit
    channel_ps_count: int
    correction_ps_count: int


@dataclass(frozen=True)
class ExperimentResult:
    gamma: float
    gamma_guess: float
    fidelity: float
    success_prob_estimate: float
    success_prob_theory: float
    p1_theory: float
    shots_requested: int
    shots_kept: int
    channel_survivors: int
    reconstructed: np.ndarray
    repetition_index: int
    status: str


def ideal_output(inputs=None):
    """The noiseless routed state over (control, path 1, path 2)."""
    inputs = inputs or RouterInputs()
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([0.0, 1.0], dtype=complex)
    phi_s = inputs.signal.vector()
    out = inputs.control.alpha * np.kron(e0, np.kron(phi_s, e0))
    out += inputs.control.beta * np.kron(e1, np.kron(e0, phi_s))
    return out


def ideal_density(inputs=None):
    v = ideal_output(inputs)
    return np.outer(v, v.conj())


def _noisy_slots(variant):
    if variant == "both-qubits":
        return ((CONTROL, ENV_C, ANC_C), (SIGNAL, ENV_S, ANC_S))
    if variant == "signal-only":
        return ((SIGNAL, ENV_S, ANC_S),)
    if variant == "no-noise":
        return ()
    raise ConfigError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _noisy_specs(inputs, variant):
    return {
        "both-qubits": (inputs.control, inputs.signal),
        "signal-only": (inputs.signal,),
        "no-noise": (),
    }[variant]


def build_router_circuit(params, variant, tomo_setting=None, error_correction=True):
    """Assemble the 7-qubit router circuit for one tomography setting.

    ``tomo_setting=None`` omits rotations and measurements (exact-mode use).
    ``error_correction=False`` keeps the channels but drops the correction
    fragments, for no-EC baselines.
    """
    slots = _noisy_slots(variant)
    ops = [
        Gate(GateKind.H, (CONTROL,)),
        Gate(GateKind.H, (SIGNAL,)),
        Gate(GateKind.T, (SIGNAL,)),
    ]
    for system, env, _ in slots:
        ops.extend(channel_subcircuit(params.gamma, system, env))
    n_corr = 0
    if error_correction and slots:
        theta = choose_theta(params.gamma_guess)
        for system, _, ancilla in slots:
            ops.extend(correction_subcircuit(theta, system, ancilla))
            n_corr += 1
    ops.append(Gate(GateKind.CSWAP, OUTPUT_QUBITS))
    registers = {}
    n_ps = len(slots) + n_corr
    if n_ps:
        registers["c1"] = n_ps
    if tomo_setting is not None:
        registers["c0"] = 3
        ops.extend(measurement_rotation(tomo_setting, OUTPUT_QUBITS, "c0"))
    return RouterCircuit(Circuit(7, ops, registers), len(slots), n_corr)


def exact_router_state(params, variant, error_correction=True, transpiled=False, cmap=None):
    """Exact reduced state on (control, path1, path2) and the accumulated
    post-selection probability."""
    rc = build_router_circuit(params, variant, None, error_correction)
    circ = rc.circuit
    positions = OUTPUT_QUBITS
    n = circ.n_qubits
    if transpiled:
        tr = transpile(circ, cmap or CouplingMap.jakarta())
        circ = tr.circuit
        positions = tuple(tr.final_permutation[q] for q in OUTPUT_QUBITS)
        n = circ.n_qubits
    state = run_statevector(circ)
    rho_full = np.outer(state.amplitudes, state.amplitudes.conj())
    order = np.argsort(np.argsort(positions))  # partial_trace sorts; undo relabeling
    rho = partial_trace(rho_full, positions, n)
    if not np.array_equal(order, np.arange(3)):
        perm = list(order)
        t = rho.reshape((2,) * 6)
        t = np.transpose(t, perm + [p + 3 for p in perm])
        rho = t.reshape(8, 8)
    return rho, state.accumulated_postselect_prob


def _theory(inputs, params, variant, error_correction):
    specs = _noisy_specs(inputs, variant)
    if not specs:
        return 1.0, 1.0
    p1 = analytic_p1(inputs.signal, params.gamma)
    if not error_correction:
        return 1.0, p1
    theta = choose_theta(params.gamma_guess)
    p = 1.0
    for q in specs:
        p *= analytic_p2(q, params.gamma, theta)
    return p, p1


def run_point(config, gamma, repetition):
    """One full tomography run at one gamma: 3**3 settings through the sampler,
    optional mitigation, reconstruction, and F/P metrics."""
    from .tomo import settings as tomo_settings  # local alias for readability

    inputs = RouterInputs()
    params = ChannelParams(gamma, config.gamma_guess)
    sigma = ideal_density(inputs)
    seed = config.base_seed * _REP_STRIDE + repetition

    cmap = config.resolved_coupling_map()
    counts = {}
    requested = kept = channel_surv = 0
    n_channels = None
    for s_idx, setting in enumerate(tomo_settings(3)):
        rc = build_router_circuit(params, config.variant, setting, config.error_correction)
        circ = rc.circuit
        if config.transpile:
            circ = transpile(circ, cmap).circuit
        noise = NoiseSpec(
            readout_confusion=config.readout_pairs(circ.n_qubits),
            depolarizing_per_cx=config.depolarizing_per_cx,
            rng_seed=seed + _SETTING_STRIDE * (s_idx + 1),
        )
        rec = sample_shots(circ, config.shots_per_setting, noise)
        counts[setting] = rec.counts["c0"]
        requested += rec.shots_requested
        kept += rec.shots_kept
        n_channels = rc.channel_ps_count
        if rc.channel_ps_count:
            channel_surv += rec.postselect_survivors[rc.channel_ps_count - 1]
        else:
            channel_surv += rec.shots_requested

    p_theory, p1_theory = _theory(inputs, params, config.variant, config.error_correction)
    if kept == 0:
        return ExperimentResult(
            gamma=gamma, gamma_guess=config.gamma_guess, fidelity=float("nan"),
            success_prob_estimate=float("nan"), success_prob_theory=p_theory,
            p1_theory=p1_theory, shots_requested=requested, shots_kept=0,
            channel_survivors=channel_surv, reconstructed=np.eye(8, dtype=complex) / 8,
            repetition_index=repetition, status="empty",
        )

    if config.mitigation:
        pairs = config.readout_pairs(7)
        out_pairs = tuple(pairs[q] for q in OUTPUT_QUBITS) if pairs else None
        cal = build_calibration(3, NoiseSpec(out_pairs) if out_pairs else None)
        counts = {s: mitigate(c, cal) for s, c in counts.items()}

    rho = reconstruct(expectations_from_counts(counts))
    p_est = 1.0 if n_channels == 0 or not config.error_correction else kept / channel_surv
    return ExperimentResult(
        gamma=gamma,
        gamma_guess=config.gamma_guess,
        fidelity=fidelity(sigma, rho),
        success_prob_estimate=p_est,
        success_prob_theory=p_theory,
        p1_theory=p1_theory,
        shots_requested=requested,
        shots_kept=kept,
        channel_survivors=channel_surv,
        reconstructed=rho,
        repetition_index=repetition,
        status="ok",
    )
