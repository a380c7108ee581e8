"""Statevector execution engine.

Two modes share one gate-application kernel:

- exact mode (``run_statevector``): post-selections project and renormalize,
  branch probabilities accumulate multiplicatively; Measure ops are illegal.
- sampling mode (``sample_shots``): shot-by-shot semantics with rejection on
  post-selection. Because a measured or post-selected qubit is never touched
  by a later gate (an IR invariant), every Z-measurement commutes to the end
  of the circuit, so each shot samples one basis outcome from the final
  state's Born distribution and reads its bits. Per-gate depolarizing noise
  is realized as a per-shot Pauli error pattern; shots sharing a pattern
  share one statevector evolution.

Randomness is a counter-based stream: shot ``k`` draws from a stream keyed
by ``seed + k`` (see ``_kernels.uniform_block``), so results do not depend
on chunking or thread count. The per-shot draw schedule, in stream order:
two draws per CX op (error?, which Pauli) when depolarizing is enabled, one
draw for the measurement outcome, then one draw per read (post-select and
measure ops in circuit order) when readout confusion is enabled. Readout
confusion flips every recorded bit independently, including the post-select
reads that decide whether a shot is kept.

Measured bits land in named registers; bitstrings are rendered little-endian
(clbit 0 is the rightmost character). If a circuit declares a register named
``c1`` that no Measure op writes, the sampler records post-selection
outcomes there positionally, matching the router circuit's layout.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import apply_unitary, uniform_block
from .circuit import Gate, Measure, PostSelect
from .constants import ATOL_EXACT, MAX_QUBITS, MIN_BRANCH_PROB
from .errors import CapacityError, ContractError, ImpossibleBranchError
from .gates import GateKind, PAULI_1Q

_CHUNK = 1 << 16

# 15 non-identity two-qubit Paulis, indexed 0..14
_PAULI_NAMES = "IXYZ"
_PAULI_2Q = [
    np.kron(PAULI_1Q[_PAULI_NAMES[(i + 1) // 4]], PAULI_1Q[_PAULI_NAMES[(i + 1) % 4]])
    for i in range(15)
]


def n_threads():
    raw = os.environ.get("QROUTE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def bits_to_string(value, width):
    """Render a register value as a little-endian bitstring (clbit 0 last)."""
    return format(int(value), f"0{width}b")


@dataclass(frozen=True)
class SimState:
    n_qubits: int
    amplitudes: np.ndarray
    accumulated_postselect_prob: float = 1.0

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        if a.shape != (2**self.n_qubits,):
            raise ValueError(f"amplitude vector has wrong shape {a.shape}")


def make_state(n_qubits, label=None):
    """|0...0>, or the computational basis state named by a big-endian label."""
    if n_qubits > MAX_QUBITS:
        raise CapacityError(f"{n_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit")
    amps = np.zeros(2**n_qubits, dtype=complex)
    idx = 0
    if label is not None:
        if len(label) != n_qubits or set(label) - {"0", "1"}:
            raise ValueError(f"bad basis label {label!r} for {n_qubits} qubits")
        idx = int(label, 2)
    amps[idx] = 1.0
    return SimState(n_qubits, amps)


@dataclass(frozen=True)
class NoiseSpec:
    """Synthetic device noise: per-qubit readout confusion and per-CX depolarizing.

    ``readout_confusion`` is one (p(read 1 | true 0), p(read 0 | true 1))
    pair per qubit, or None for ideal readout.
    """

    readout_confusion: tuple | None = None
    depolarizing_per_cx: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.readout_confusion is not None:
            pairs = tuple((float(a), float(b)) for a, b in self.readout_confusion)
            if any(not (0.0 <= p <= 1.0) for pair in pairs for p in pair):
                raise ValueError("confusion probabilities must lie in [0, 1]")
            object.__setattr__(self, "readout_confusion", pairs)
        if not 0.0 <= self.depolarizing_per_cx <= 1.0:
            raise ValueError("depolarizing_per_cx must lie in [0, 1]")

    @classmethod
    def uniform_readout(cls, p01, p10, n_qubits, depolarizing_per_cx=0.0, rng_seed=0):
        return cls(((p01, p10),) * n_qubits, depolarizing_per_cx, rng_seed)


@dataclass(frozen=True)
class ShotRecord:
    counts: dict
    shots_requested: int
    shots_kept: int
    postselect_survivors: tuple = ()
    status: str = "ok"

    def to_json(self):
        doc = {reg: dict(c) for reg, c in self.counts.items()}
        doc["shots_requested"] = self.shots_requested
        doc["shots_kept"] = self.shots_kept
        return doc


def apply_gate(state, op):
    """Apply one gate op to a state; norm is preserved."""
    if not isinstance(op, Gate):
        raise ContractError(f"apply_gate expects a Gate op, got {type(op).__name__}")
    amps = apply_unitary(state.amplitudes, op.unitary(), op.qubits, state.n_qubits)
    return SimState(state.n_qubits, amps, state.accumulated_postselect_prob)


def post_select(state, qubit, outcome):
    """Project a qubit onto an outcome and renormalize.

    Returns (new state, branch probability). Selecting a branch with
    probability below MIN_BRANCH_PROB raises ImpossibleBranchError.
    """
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range")
    t = state.amplitudes.reshape((2,) * n).copy()
    sel = [slice(None)] * n
    sel[qubit] = 1 - outcome
    branch = float(1.0 - np.sum(np.abs(t[tuple(sel)]) ** 2))
    if branch < MIN_BRANCH_PROB:
        raise ImpossibleBranchError(
            f"post-selecting outcome {outcome} on qubit {qubit} has probability {branch:.3e}"
        )
    t[tuple(sel)] = 0.0
    amps = t.reshape(-1) / np.sqrt(branch)
    return SimState(n, amps, state.accumulated_postselect_prob * branch), branch


def run_statevector(circuit, initial=None):
    """Execute gates and post-selections exactly; Measure ops are an error here."""
    n = circuit.n_qubits
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
    if initial is None or isinstance(initial, str):
        state = make_state(n, initial)
    else:
        state = initial
    for op in circuit.ops:
        if isinstance(op, Measure):
            raise ContractError("run_statevector cannot execute Measure ops; use sample_shots")
        if isinstance(op, PostSelect):
            state, _ = post_select(state, op.qubit, op.outcome)
        else:
            state = apply_gate(state, op)
    assert abs(np.linalg.norm(state.amplitudes) - 1.0) < ATOL_EXACT
    return state


# -- sampling ------------------------------------------------------------------


class _SamplePlan:
    """Per-circuit constants shared by all chunks of one sample_shots call."""

    def __init__(self, circuit, shots, noise):
        n = circuit.n_qubits
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
        if shots < 1:
            raise ValueError("shots must be >= 1")
        meas_seen = False
        for op in circuit.ops:
            if isinstance(op, Measure):
                meas_seen = True
            elif meas_seen:
                raise ContractError("sampled circuits must end in a block of Measure ops")
        if not meas_seen:
            raise ContractError("sampled circuits need at least one Measure op")

        self.n = n
        self.dim = 2**n
        self.shots = shots
        self.seed = noise.rng_seed
        self.gates = []  # (matrix, qubits) in order
        self.cx_slots = []  # index into self.gates of each CX (depolarizing targets)
        self.reads = []  # ("ps"|"meas", qubit, extra) in circuit op order
        self.ps_count = 0
        for op in circuit.ops:
            if isinstance(op, Gate):
                self.gates.append((op.unitary(), op.qubits))
                if op.kind is GateKind.CX:
                    self.cx_slots.append(len(self.gates) - 1)
            elif isinstance(op, PostSelect):
                self.reads.append(("ps", op.qubit, op.outcome))
                self.ps_count += 1
            else:
                self.reads.append(("meas", op.qubit, (op.register, op.bit)))

        self.depol = float(noise.depolarizing_per_cx)
        if self.depol == 0.0:
            self.cx_slots = []
        conf = noise.readout_confusion
        if conf is not None and len(conf) != n:
            raise ValueError(f"readout_confusion has {len(conf)} entries for {n} qubits")
        if conf is not None and all(a == 0.0 and b == 0.0 for a, b in conf):
            conf = None
        self.confusion = conf
        self.draw_meas = 2 * len(self.cx_slots)
        self.draw_reads = self.draw_meas + 1

        self.registers = dict(circuit.registers)
        written = {reg for kind, _, extra in self.reads if kind == "meas" for reg in [extra[0]]}
        self.c1_synth = "c1" in self.registers and "c1" not in written
        if self.c1_synth and self.registers["c1"] < self.ps_count:
            raise ContractError(
                f"register c1 has {self.registers['c1']} bits but the circuit "
                f"post-selects {self.ps_count} qubits"
            )


def _evolve(plan, pattern):
    """Final statevector for one Pauli error pattern {cx_ordinal: pauli_idx}."""
    amps = np.zeros(plan.dim, dtype=complex)
    amps[0] = 1.0
    slot_to_ordinal = {slot: j for j, slot in enumerate(plan.cx_slots)}
    for i, (mat, qubits) in enumerate(plan.gates):
        amps = apply_unitary(amps, mat, qubits, plan.n)
        j = slot_to_ordinal.get(i)
        if j is not None and j in pattern:
            amps = apply_unitary(amps, _PAULI_2Q[pattern[j]], qubits, plan.n)
    return amps


def _chunk_counts(plan, start, count, cache):
    n, seed = plan.n, plan.seed
    ncx = len(plan.cx_slots)

    if ncx:
        err = np.zeros((count, ncx), dtype=np.int8)
        for j in range(ncx):
            ue = uniform_block(seed, start, count, 2 * j)
            up = uniform_block(seed, start, count, 2 * j + 1)
            pick = np.minimum((up * 15).astype(np.int8), 14)
            err[:, j] = np.where(ue < plan.depol, pick + 1, 0)
        rows, inverse = np.unique(err, axis=0, return_inverse=True)
        groups = [(tuple(row), np.nonzero(inverse == g)[0]) for g, row in enumerate(rows)]
    else:
        groups = [((), np.arange(count))]

    u_meas = uniform_block(seed, start, count, plan.draw_meas)
    bvals = np.zeros(count, dtype=np.int64)
    for row, idx in groups:
        key = row
        cum = cache.get(key)
        if cum is None:
            pattern = {j: int(p) - 1 for j, p in enumerate(row) if p}
            amps = _evolve(plan, pattern)
            cum = np.cumsum(np.abs(amps) ** 2)
            cache[key] = cum
        picked = np.searchsorted(cum, u_meas[idx] * cum[-1], side="right")
        bvals[idx] = np.minimum(picked, plan.dim - 1)

    alive = np.ones(count, dtype=bool)
    survivors = []
    reg_vals = {reg: np.zeros(count, dtype=np.int64) for reg in plan.registers}
    for ridx, (kind, qubit, extra) in enumerate(plan.reads):
        bit = (bvals >> (n - 1 - qubit)) & 1
        if plan.confusion is not None:
            f0, f1 = plan.confusion[qubit]
            u = uniform_block(seed, start, count, plan.draw_reads + ridx)
            bit = bit ^ (u < np.where(bit == 0, f0, f1))
        if kind == "ps":
            alive &= bit == extra
            survivors.append(int(alive.sum()))
        else:
            reg, pos = extra
            reg_vals[reg] |= bit.astype(np.int64) << pos

    kept = int(alive.sum())
    counts = {
        reg: np.bincount(vals[alive], minlength=2 ** plan.registers[reg])
        for reg, vals in reg_vals.items()
    }
    return counts, kept, survivors


def sample_shots(circuit, shots, noise=None):
    """Sample a measurement-terminated circuit shot by shot.

    Post-selection is rejection-based: shots whose recorded post-select bits
    differ from the required outcomes are discarded and show up only in
    ``shots_requested - shots_kept`` and ``postselect_survivors``.
    Deterministic for a fixed (circuit, shots, noise) regardless of
    QROUTE_THREADS.
    """
    noise = noise or NoiseSpec()
    plan = _SamplePlan(circuit, shots, noise)

    chunks = [(lo, min(_CHUNK, shots - lo)) for lo in range(0, shots, _CHUNK)]
    results = []
    workers = min(n_threads(), len(chunks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_chunk_counts, plan, lo, cnt, {}) for lo, cnt in chunks]
            results = [f.result() for f in futures]
    else:
        cache = {}
        results = [_chunk_counts(plan, lo, cnt, cache) for lo, cnt in chunks]

    kept = sum(r[1] for r in results)
    survivors = tuple(int(sum(r[2][i] for r in results)) for i in range(plan.ps_count))
    counts = {}
    for reg, size in plan.registers.items():
        total = np.sum([r[0][reg] for r in results], axis=0)
        counts[reg] = {
            bits_to_string(v, size): int(c) for v, c in enumerate(total) if c > 0
        }
    if plan.c1_synth:
        size = plan.registers["c1"]
        value = 0
        for pos, (kind, _, extra) in enumerate(op for op in plan.reads if op[0] == "ps"):
            value |= int(extra) << pos
        counts["c1"] = {bits_to_string(value, size): kept} if kept else {}

    return ShotRecord(
        counts=counts,
        shots_requested=shots,
        shots_kept=kept,
        postselect_survivors=survivors,
        status="ok" if kept else "empty",
    )


def exact_register_distribution(circuit, register):
    """Exact Born distribution over one register's bitstrings (no noise).

    Post-selections are applied as exact projections, so this is the
    infinite-shot, noiseless limit of ``sample_shots`` counts.
    """
    meas = [op for op in circuit.ops if isinstance(op, Measure)]
    if register not in circuit.registers:
        raise ValueError(f"unknown register {register!r}")
    stripped = [op for op in circuit.ops if not isinstance(op, Measure)]
    from .circuit import Circuit  # local import to avoid cycle at module load

    state = run_statevector(Circuit(circuit.n_qubits, stripped, {}))
    probs = np.abs(state.amplitudes) ** 2
    n = circuit.n_qubits
    size = circuit.registers[register]
    basis = np.arange(2**n)
    values = np.zeros(2**n, dtype=np.int64)
    for op in meas:
        if op.register == register:
            values |= ((basis >> (n - 1 - op.qubit)) & 1) << op.bit
    out = np.zeros(2**size)
    np.add.at(out, values, probs)
    return out
