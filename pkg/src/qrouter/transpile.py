"""Lowering to the device basis {I, RZ, SX, X, CX} and coupling-map routing.

Decomposition rules:
- H -> RZ(pi/2) SX RZ(pi/2); T -> RZ(pi/4); any other single-qubit unitary
  goes through ZYZ Euler extraction into the RZ-SX-RZ-SX-RZ template (with
  the usual gimbal-lock merges when the middle angle degenerates);
- SWAP -> 3 CX; CSWAP -> CX-conjugated Toffoli (6 CX core);
- UG(gamma) is a rotation in the {|01>,|10>} plane, locally equivalent to an
  XX+ZZ interaction, which yields an exact 2-CX template;
- arbitrary two-qubit unitaries go through a magic-basis Cartan split into
  local factors and a commuting XX/YY/ZZ core (2 CX per non-trivial axis).

Routing is deterministic greedy SWAP insertion along BFS shortest paths with
lowest-index tie-breaking. Measurements and post-selections are emitted after
the gate schedule at each wire's final physical position; this preserves all
observable outcomes because a measured or post-selected wire never sees a
later gate, and it keeps inserted SWAP chains free to pass through any
position.

``verify_equivalence`` checks U_routed = P . U_embedded up to global phase,
where P is the net wire permutation the SWAPs implement.
"""

import collections
from dataclasses import dataclass
from math import atan2, pi, sqrt

import numpy as np

from .circuit import Circuit, Gate, Measure, PostSelect, circuit_unitary
from .constants import ATOL_EIGEN, EULER_ATOL, MAX_QUBITS
from .errors import CapacityError, ContractError, UnsupportedGateError
from .gates import BASIS_KINDS, GateKind

JAKARTA_EDGES = ((0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6))


@dataclass(frozen=True)
class CouplingMap:
    n_physical: int
    edges: tuple

    def __post_init__(self):
        edges = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in self.edges))
        object.__setattr__(self, "edges", edges)
        if any(a == b or a < 0 or b >= self.n_physical for a, b in edges):
            raise ValueError("edge endpoints must be distinct indices below n_physical")
        adj = collections.defaultdict(set)
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        queue = collections.deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        if len(seen) != self.n_physical:
            raise ValueError("coupling map must be connected")
        object.__setattr__(self, "_adj", {k: tuple(sorted(v)) for k, v in adj.items()})

    @classmethod
    def jakarta(cls):
        """Seven qubits in the horizontal H-shaped layout."""
        return cls(7, JAKARTA_EDGES)

    def neighbors(self, p):
        return self._adj.get(p, ())

    def has_edge(self, a, b):
        return tuple(sorted((a, b))) in set(self.edges)

    def shortest_path(self, a, b):
        """BFS shortest path, deterministic (lowest-index expansion order)."""
        if a == b:
            return [a]
        parent = {a: None}
        frontier = [a]
        while frontier:
            nxt = []
            for u in frontier:
                for v in self.neighbors(u):
                    if v not in parent:
                        parent[v] = u
                        if v == b:
                            path = [b]
                            while parent[path[-1]] is not None:
                                path.append(parent[path[-1]])
                            return path[::-1]
                        nxt.append(v)
            frontier = sorted(nxt)
        raise ValueError(f"no path between {a} and {b}")


@dataclass(frozen=True)
class TranspileResult:
    circuit: Circuit
    final_permutation: dict  # logical qubit -> physical position after routing
    swap_count: int
    cx_count: int
    depth: int
    initial_layout: tuple
    wire_permutation: tuple  # initial physical position -> final position


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    max_deviation: float


# -- single-qubit synthesis ----------------------------------------------------


def _fold_angle(a):
    return (a + pi) % (2 * pi) - pi


def _rz(q, angle):
    return Gate(GateKind.RZ, (q,), (angle,))


def _sx(q):
    return Gate(GateKind.SX, (q,))


def _zyz_angles(m):
    su = m / np.sqrt(np.linalg.det(m))
    theta = 2.0 * atan2(abs(su[1, 0]), abs(su[0, 0]))
    phiplam = 2.0 * np.angle(su[1, 1])
    phimlam = 2.0 * np.angle(su[1, 0])
    return theta, 0.5 * (phiplam + phimlam), 0.5 * (phiplam - phimlam)


def _euler_ops(m, q):
    """Synthesize a 2x2 unitary as RZ/SX basis ops (up to global phase)."""
    theta, phi, lam = _zyz_angles(m)
    if theta < EULER_ATOL:
        seq = [(q, phi + lam)]
        return [_rz(q, a) for q, a in seq if abs(_fold_angle(a)) > EULER_ATOL]
    if abs(theta - pi / 2) < EULER_ATOL:
        ops = []
        if abs(_fold_angle(lam - pi / 2)) > EULER_ATOL:
            ops.append(_rz(q, lam - pi / 2))
        ops.append(_sx(q))
        if abs(_fold_angle(phi + pi / 2)) > EULER_ATOL:
            ops.append(_rz(q, phi + pi / 2))
        return ops
    ops = []
    if abs(_fold_angle(lam)) > EULER_ATOL:
        ops.append(_rz(q, lam))
    ops.append(_sx(q))
    ops.append(_rz(q, theta + pi))
    ops.append(_sx(q))
    if abs(_fold_angle(phi + pi)) > EULER_ATOL:
        ops.append(_rz(q, phi + pi))
    return ops


# -- two-qubit synthesis -------------------------------------------------------

_MAGIC = np.array(
    [[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]], dtype=complex
) / np.sqrt(2)

# phase signature of exp(-i(a XX + b YY + c ZZ)) on the magic-basis vectors
_PAULI_SIGNS = np.array([[1, -1, 1], [-1, 1, 1], [1, 1, -1], [-1, -1, -1]], dtype=float)


def _zz_ops(angle, q0, q1):
    """exp(-i angle Z.Z) on (q0, q1)."""
    return [Gate(GateKind.CX, (q0, q1)), _rz(q1, 2.0 * angle), Gate(GateKind.CX, (q0, q1))]


def _xx_ops(angle, q0, q1):
    h = [Gate(GateKind.H, (q0,)), Gate(GateKind.H, (q1,))]
    return h + _zz_ops(angle, q0, q1) + h


def _yy_ops(angle, q0, q1):
    pre = [_rz(q0, -pi / 2), Gate(GateKind.H, (q0,)), _rz(q1, -pi / 2), Gate(GateKind.H, (q1,))]
    post = [Gate(GateKind.H, (q0,)), _rz(q0, pi / 2), Gate(GateKind.H, (q1,)), _rz(q1, pi / 2)]
    return pre + _zz_ops(angle, q0, q1) + post


def _diag_simult(A, B):
    """Real orthogonal basis diagonalizing two commuting real symmetrics."""
    for t in (0.95071431, 0.23199394, 0.59865848, 0.15601864, 0.70807258, 0.02058449):
        w, P = np.linalg.eigh(A + t * B)
        da = P.T @ A @ P
        db = P.T @ B @ P
        if (
            np.max(np.abs(da - np.diag(np.diag(da)))) < 1e-9
            and np.max(np.abs(db - np.diag(np.diag(db)))) < 1e-9
        ):
            return P
    raise ValueError("simultaneous diagonalization failed")


def _factor_kron(m):
    """Split a (phase times) A (x) B matrix into its 2x2 factors."""
    r = m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(r)
    if s[1] > 1e-8:
        raise ValueError("matrix is not a Kronecker product")
    a = (u[:, 0] * np.sqrt(s[0])).reshape(2, 2)
    b = (vh[0, :] * np.sqrt(s[0])).reshape(2, 2)
    return a, b


def _kak_ops(m, q0, q1):
    """Cartan decomposition of an arbitrary two-qubit unitary into basis ops."""
    u = m / np.linalg.det(m) ** 0.25
    mm = _MAGIC.conj().T @ u @ _MAGIC
    q = mm.T @ mm
    P = _diag_simult(np.real(q), np.imag(q))
    if np.linalg.det(P) < 0:
        P[:, 0] = -P[:, 0]
    theta = np.angle(np.diag(P.T @ q @ P)) / 2.0
    o1 = mm @ P @ np.diag(np.exp(-1j * theta))
    if np.linalg.det(np.real(o1)) < 0:
        theta[0] += pi
        o1 = mm @ P @ np.diag(np.exp(-1j * theta))
    if np.max(np.abs(np.imag(o1))) > 1e-8:
        raise ValueError("Cartan split failed to produce a real orthogonal factor")
    k1 = _MAGIC @ np.real(o1) @ _MAGIC.conj().T
    k2 = _MAGIC @ P.T @ _MAGIC.conj().T
    abc = np.linalg.solve(np.hstack([-_PAULI_SIGNS, np.ones((4, 1))]), theta)[:3]

    a1, b1 = _factor_kron(k1)
    a2, b2 = _factor_kron(k2)
    ops = _euler_ops(a2, q0) + _euler_ops(b2, q1)
    for angle, builder in zip(abc, (_xx_ops, _yy_ops, _zz_ops)):
        if abs(angle) > 1e-12:
            ops += builder(angle, q0, q1)
    return ops + _euler_ops(a1, q0) + _euler_ops(b1, q1)


def _ug_ops(gamma, system, env):
    """UG(gamma) as an exact 2-CX circuit.

    UG is the rotation exp(theta(|01><10| - |10><01|)) with
    cos(theta) = sqrt(1-gamma); conjugating by S on the system qubit and SX
    on both turns it into exp(-i theta/2 (XX+ZZ)), which a single CX
    sandwich realizes from RX(theta) x RZ(theta).
    """
    th = atan2(sqrt(gamma), sqrt(1.0 - gamma))
    rx = np.array(
        [
            [np.cos(th / 2), -1j * np.sin(th / 2)],
            [-1j * np.sin(th / 2), np.cos(th / 2)],
        ],
        dtype=complex,
    )
    sxd = [_rz(system, pi), _sx(system), _rz(system, pi)]
    sxd_env = [_rz(env, pi), _sx(env), _rz(env, pi)]
    return (
        [_rz(system, pi / 2)]
        + sxd
        + sxd_env
        + [Gate(GateKind.CX, (system, env))]
        + _euler_ops(rx, system)
        + [_rz(env, th)]
        + [Gate(GateKind.CX, (system, env))]
        + [_sx(system), _sx(env), _rz(system, -pi / 2)]
    )


def _ccx_ops(c1, c2, t):
    """Standard 6-CX Toffoli with T = RZ(pi/4) phases."""
    T, Td = pi / 4, -pi / 4
    return [
        Gate(GateKind.H, (t,)),
        Gate(GateKind.CX, (c2, t)),
        _rz(t, Td),
        Gate(GateKind.CX, (c1, t)),
        _rz(t, T),
        Gate(GateKind.CX, (c2, t)),
        _rz(t, Td),
        Gate(GateKind.CX, (c1, t)),
        _rz(c2, T),
        _rz(t, T),
        Gate(GateKind.CX, (c1, c2)),
        Gate(GateKind.H, (t,)),
        _rz(c1, T),
        _rz(c2, Td),
        Gate(GateKind.CX, (c1, c2)),
    ]


def _rewrite(op):
    kind, q = op.kind, op.qubits
    if kind is GateKind.H:
        return [_rz(q[0], pi / 2), _sx(q[0]), _rz(q[0], pi / 2)]
    if kind is GateKind.T:
        return [_rz(q[0], pi / 4)]
    if kind is GateKind.H_THETA:
        return _euler_ops(op.unitary(), q[0])
    if kind is GateKind.SWAP:
        return [Gate(GateKind.CX, (q[0], q[1])), Gate(GateKind.CX, (q[1], q[0])), Gate(GateKind.CX, (q[0], q[1]))]
    if kind is GateKind.UG:
        return _ug_ops(op.params[0], q[0], q[1])
    if kind is GateKind.CSWAP:
        wrap = Gate(GateKind.CX, (q[2], q[1]))
        return [wrap] + _ccx_ops(q[0], q[1], q[2]) + [wrap]
    if kind is GateKind.CUSTOM:
        if len(q) == 1:
            return _euler_ops(op.unitary(), q[0])
        if len(q) == 2:
            return _kak_ops(op.unitary(), q[0], q[1])
        raise UnsupportedGateError(f"no decomposition rule for a {len(q)}-qubit custom gate")
    raise UnsupportedGateError(f"no decomposition rule for {kind.value}")


def _is_identity_product(a, b):
    m = b.unitary() @ a.unitary()
    d = abs(m[0, 0])
    if d < 0.5:
        return False
    return np.max(np.abs(m - (m[0, 0] / d) * np.eye(m.shape[0]))) < 1e-12


def _cancel_adjacent_inverses(ops):
    out = []
    for op in ops:
        if (
            isinstance(op, Gate)
            and out
            and isinstance(out[-1], Gate)
            and out[-1].qubits == op.qubits
            and _is_identity_product(out[-1], op)
        ):
            out.pop()
        else:
            out.append(op)
    return out


def decompose_to_basis(circuit):
    """Rewrite every gate into the {I, RZ, SX, X, CX} basis.

    Output unitary equals the input up to global phase; measurements and
    post-selections pass through untouched.
    """
    ops = list(circuit.ops)
    changed = True
    while changed:
        changed = False
        nxt = []
        for op in ops:
            if isinstance(op, Gate) and op.kind not in BASIS_KINDS:
                nxt.extend(_rewrite(op))
                changed = True
            else:
                nxt.append(op)
        ops = nxt
    return Circuit(circuit.n_qubits, _cancel_adjacent_inverses(ops), circuit.registers)


# -- routing -------------------------------------------------------------------


def _depth(ops):
    frontier = collections.defaultdict(int)
    depth = 0
    for op in ops:
        qubits = op.qubits if isinstance(op, Gate) else (op.qubit,)
        d = 1 + max(frontier[q] for q in qubits)
        for q in qubits:
            frontier[q] = d
        depth = max(depth, d)
    return depth


def route(circuit, cmap, initial_layout=None):
    """Insert SWAPs (as 3 CX) so every CX acts on a coupling-map edge.

    The input must already be basis-only. Greedy strategy: while a CX's
    operands are not adjacent, swap the first operand one step along the BFS
    shortest path. Reads (Measure/PostSelect) are re-emitted after the gate
    schedule at each wire's final position, preserving their relative order.
    """
    for op in circuit.ops:
        if isinstance(op, Gate) and op.kind not in BASIS_KINDS:
            raise ContractError(f"route requires a basis-only circuit, found {op.kind.value}")
    n, n_phys = circuit.n_qubits, cmap.n_physical
    if n > n_phys:
        raise ValueError(f"circuit needs {n} qubits but the map has {n_phys}")
    layout = list(initial_layout) if initial_layout is not None else list(range(n))
    if sorted(set(layout)) != sorted(layout) or len(layout) != n or any(
        not 0 <= p < n_phys for p in layout
    ):
        raise ValueError("initial layout must be an injective map into physical indices")

    # wires 0..n-1 are the logical qubits; the rest pad untouched positions
    pos_of = [None] * n_phys
    p2w = [None] * n_phys
    for wire, p in enumerate(layout):
        pos_of[wire] = p
        p2w[p] = wire
    free = (p for p in range(n_phys) if p2w[p] is None)
    for wire in range(n, n_phys):
        p = next(free)
        pos_of[wire] = p
        p2w[p] = wire
    init_pos = list(pos_of)

    out = []
    swap_count = 0

    def do_swap(pa, pb):
        nonlocal swap_count
        out.extend(
            [Gate(GateKind.CX, (pa, pb)), Gate(GateKind.CX, (pb, pa)), Gate(GateKind.CX, (pa, pb))]
        )
        wa, wb = p2w[pa], p2w[pb]
        p2w[pa], p2w[pb] = wb, wa
        pos_of[wa], pos_of[wb] = pb, pa
        swap_count += 1

    reads = []
    for op in circuit.ops:
        if isinstance(op, Measure) or isinstance(op, PostSelect):
            reads.append(op)
        elif len(op.qubits) == 1:
            out.append(Gate(op.kind, (pos_of[op.qubits[0]],), op.params, op.matrix))
        else:
            a, b = op.qubits
            pa, pb = pos_of[a], pos_of[b]
            while not cmap.has_edge(pa, pb):
                path = cmap.shortest_path(pa, pb)
                do_swap(pa, path[1])
                pa = path[1]
            out.append(Gate(GateKind.CX, (pa, pb)))

    for op in reads:
        if isinstance(op, PostSelect):
            out.append(PostSelect(pos_of[op.qubit], op.outcome))
        else:
            out.append(Measure(pos_of[op.qubit], op.register, op.bit))

    wire_perm = [0] * n_phys
    for wire in range(n_phys):
        wire_perm[init_pos[wire]] = pos_of[wire]
    cx_count = sum(1 for op in out if isinstance(op, Gate) and op.kind is GateKind.CX)
    return TranspileResult(
        circuit=Circuit(n_phys, out, circuit.registers),
        final_permutation={q: pos_of[q] for q in range(n)},
        swap_count=swap_count,
        cx_count=cx_count,
        depth=_depth(out),
        initial_layout=tuple(layout),
        wire_permutation=tuple(wire_perm),
    )


def transpile(circuit, cmap=None, initial_layout=None):
    """decompose_to_basis followed by route."""
    cmap = cmap or CouplingMap.jakarta()
    return route(decompose_to_basis(circuit), cmap, initial_layout)


def verify_equivalence(original, result):
    """Check the routed circuit implements the original up to permutation + phase.

    Compares P_perm^T . U_routed against the original embedded at its initial
    layout (identity on untouched wires); global phase is stripped by
    normalizing both matrices at the embedded unitary's largest entry.
    """
    routed = result.circuit
    if not original.is_unitary_only or not routed.is_unitary_only:
        raise ContractError("verify_equivalence requires unitary-only circuits")
    n_phys = routed.n_qubits
    if n_phys > MAX_QUBITS:
        raise CapacityError(f"{n_phys} qubits exceeds the {MAX_QUBITS}-qubit limit")

    embedded_ops = []
    for op in original.ops:
        qubits = tuple(result.initial_layout[q] for q in op.qubits)
        embedded_ops.append(Gate(op.kind, qubits, op.params, op.matrix))
    u_emb = circuit_unitary(Circuit(n_phys, embedded_ops, {}))
    u_routed = circuit_unitary(Circuit(n_phys, routed.ops, {}))

    # apply the inverse wire permutation to the routed unitary's rows
    perm = result.wire_permutation
    basis = np.arange(2**n_phys)
    image = np.zeros_like(basis)
    for p in range(n_phys):
        image |= ((basis >> (n_phys - 1 - p)) & 1) << (n_phys - 1 - perm[p])
    u_cmp = u_routed[image, :]

    idx = np.unravel_index(np.argmax(np.abs(u_emb)), u_emb.shape)
    ref = u_emb * np.exp(-1j * np.angle(u_emb[idx]))
    got = u_cmp * np.exp(-1j * np.angle(u_cmp[idx]))
    dev = float(np.max(np.abs(ref - got)))
    return EquivalenceReport(equivalent=dev < ATOL_EIGEN, max_deviation=dev)
