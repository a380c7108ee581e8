"""Circuit intermediate representation.

A circuit is an immutable ordered list of operations over ``n_qubits`` wires
and named classical registers. Three op flavors exist: unitary gates,
terminal measurements into a (register, bit) slot, and post-selections that
pin a qubit's measured outcome. Once a qubit is measured or post-selected it
is retired: later gate ops may not touch it (checked at build time).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .constants import ATOL_EXACT, MAX_QUBITS
from .errors import BuildError, CapacityError, ContractError
from .gates import GateKind, gate_arity, gate_matrix
from ._kernels import apply_unitary


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple
    params: tuple = ()
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.matrix is not None:
            m = np.array(self.matrix, dtype=complex)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    def unitary(self):
        return gate_matrix(self.kind, self.params, self.matrix)


@dataclass(frozen=True)
class Measure:
    qubit: int
    register: str
    bit: int


@dataclass(frozen=True)
class PostSelect:
    qubit: int
    outcome: int


CircuitOp = Gate | Measure | PostSelect


def _validate_op(op, i, n_qubits, registers, retired, used_clbits):
    if isinstance(op, Gate):
        arity = gate_arity(op.kind, op.matrix)
        if len(op.qubits) != arity:
            raise BuildError(f"op {i}: {op.kind.value} takes {arity} qubits, got {len(op.qubits)}")
        if len(set(op.qubits)) != len(op.qubits):
            raise BuildError(f"op {i}: repeated qubit in {op.qubits}")
        if any(q < 0 or q >= n_qubits for q in op.qubits):
            raise BuildError(f"op {i}: qubit index out of range for {n_qubits}-qubit circuit")
        hit = retired.intersection(op.qubits)
        if hit:
            raise BuildError(f"op {i}: gate on measured/post-selected qubit(s) {sorted(hit)}")
        try:
            m = op.unitary()
        except ValueError as exc:
            raise BuildError(f"op {i}: {exc}") from exc
        if op.kind is GateKind.CUSTOM and np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) >= ATOL_EXACT:
            raise BuildError(f"op {i}: custom matrix is not unitary")
    elif isinstance(op, Measure):
        if not 0 <= op.qubit < n_qubits:
            raise BuildError(f"op {i}: measure qubit {op.qubit} out of range")
        if op.qubit in retired:
            raise BuildError(f"op {i}: qubit {op.qubit} already measured/post-selected")
        if op.register not in registers:
            raise BuildError(f"op {i}: unknown register {op.register!r}")
        if not 0 <= op.bit < registers[op.register]:
            raise BuildError(f"op {i}: bit {op.bit} out of range for register {op.register!r}")
        if (op.register, op.bit) in used_clbits:
            raise BuildError(f"op {i}: register slot {op.register}[{op.bit}] written twice")
        used_clbits.add((op.register, op.bit))
        retired.add(op.qubit)
    elif isinstance(op, PostSelect):
        if not 0 <= op.qubit < n_qubits:
            raise BuildError(f"op {i}: post-select qubit {op.qubit} out of range")
        if op.outcome not in (0, 1):
            raise BuildError(f"op {i}: post-select outcome must be 0 or 1")
        if op.qubit in retired:
            raise BuildError(f"op {i}: qubit {op.qubit} already measured/post-selected")
        retired.add(op.qubit)
    else:
        raise BuildError(f"op {i}: unknown operation type {type(op).__name__}")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple = ()
    registers: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise BuildError("circuit needs at least one qubit")
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "registers", dict(self.registers))
        for name, size in self.registers.items():
            if not isinstance(name, str) or size < 1:
                raise BuildError(f"bad register {name!r}: {size}")
        retired, used = set(), set()
        for i, op in enumerate(self.ops):
            _validate_op(op, i, self.n_qubits, self.registers, retired, used)

    @property
    def is_unitary_only(self):
        return all(isinstance(op, Gate) for op in self.ops)

    def gate_ops(self):
        return [op for op in self.ops if isinstance(op, Gate)]

    def postselect_ops(self):
        return [op for op in self.ops if isinstance(op, PostSelect)]

    def measure_ops(self):
        return [op for op in self.ops if isinstance(op, Measure)]


def append(circuit, op):
    """Return a new circuit with ``op`` appended; all invariants re-checked."""
    return Circuit(circuit.n_qubits, circuit.ops + (op,), circuit.registers)


def extend(circuit, ops):
    return Circuit(circuit.n_qubits, circuit.ops + tuple(ops), circuit.registers)


def circuit_unitary(circuit):
    """Full 2**n x 2**n unitary of a measurement-free circuit."""
    if not circuit.is_unitary_only:
        raise ContractError("circuit_unitary requires a circuit without Measure/PostSelect ops")
    n = circuit.n_qubits
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit unitary-extraction limit")
    u = np.eye(2**n, dtype=complex)
    for op in circuit.ops:
        u = apply_unitary(u, op.unitary(), op.qubits, n)
    return u


# -- JSON wire format ---------------------------------------------------------
# {"n_qubits": n, "ops": [{"kind": ..., "qubits": [...], ...}], "registers": {...}}


def _op_to_json(op):
    if isinstance(op, Gate):
        doc = {"kind": op.kind.value, "qubits": list(op.qubits), "params": list(op.params)}
        if op.matrix is not None:
            doc["matrix"] = {
                "real": np.real(op.matrix).tolist(),
                "imag": np.imag(op.matrix).tolist(),
            }
        return doc
    if isinstance(op, Measure):
        return {"kind": "MEASURE", "qubits": [op.qubit], "register": op.register, "bit": op.bit}
    return {"kind": "POSTSELECT", "qubits": [op.qubit], "outcome": op.outcome}


def _op_from_json(doc):
    kind = doc["kind"]
    if kind == "MEASURE":
        return Measure(doc["qubits"][0], doc["register"], doc["bit"])
    if kind == "POSTSELECT":
        return PostSelect(doc["qubits"][0], doc["outcome"])
    matrix = None
    if "matrix" in doc:
        matrix = np.array(doc["matrix"]["real"]) + 1j * np.array(doc["matrix"]["imag"])
    return Gate(GateKind(kind), tuple(doc["qubits"]), tuple(doc.get("params", ())), matrix)


def circuit_to_json(circuit):
    return {
        "n_qubits": circuit.n_qubits,
        "ops": [_op_to_json(op) for op in circuit.ops],
        "registers": dict(circuit.registers),
    }


def circuit_from_json(doc):
    return Circuit(doc["n_qubits"], [_op_from_json(o) for o in doc["ops"]], doc.get("registers", {}))


def dumps(circuit, **kwargs):
    return json.dumps(circuit_to_json(circuit), **kwargs)


def loads(text):
    return circuit_from_json(json.loads(text))
