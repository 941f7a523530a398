"""Stabilizer tableaux, Clifford circuits and Clifford gate teleportation.

Tableau rows follow the destabilizer/stabilizer layout: row j holds
C X_j C^dag and row n+j holds C Z_j C^dag, each as x bits, z bits and a
sign bit over Hermitian Pauli letters (Y = i X Z). Gate updates are the
standard conjugation rules for H, S and CNOT.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.logger import get_logger
from .ensembles import prepare_epr
from .pauli import PauliString
from .statevector import (
    STANDARD_GATES,
    StateVector,
    apply_gate,
    index_to_bits,
    measure_computational,
)
from .teleport import SpacetimeTrace, TeleportTrace, depth_budget, teleport_gate

logger = get_logger(__name__)

Gate = Tuple[str, Tuple[int, ...]]
GATE_ARITY = {"H": 1, "S": 1, "CX": 2}


# Conjugation rules on arrays of rows: x, z have shape (rows, n), r shape (rows,).

def _rule_h(x: np.ndarray, z: np.ndarray, r: np.ndarray, q: int) -> None:
    r ^= x[:, q] & z[:, q]
    x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()


def _rule_s(x: np.ndarray, z: np.ndarray, r: np.ndarray, q: int) -> None:
    r ^= x[:, q] & z[:, q]
    z[:, q] ^= x[:, q]


def _rule_cx(x: np.ndarray, z: np.ndarray, r: np.ndarray, c: int, t: int) -> None:
    r ^= x[:, c] & z[:, t] & (x[:, t] ^ z[:, c] ^ 1)
    x[:, t] ^= x[:, c]
    z[:, c] ^= z[:, t]


def _apply_rule(x: np.ndarray, z: np.ndarray, r: np.ndarray, gate: Gate) -> None:
    name, qubits = gate
    if name == "H":
        _rule_h(x, z, r, qubits[0])
    elif name == "S":
        _rule_s(x, z, r, qubits[0])
    elif name == "CX":
        _rule_cx(x, z, r, qubits[0], qubits[1])
    else:
        raise ValueError(f"Unsupported Clifford gate: {name}")


@dataclass
class CliffordCircuit:
    """Layers of {H, S, CX} gates; gates in one layer act on disjoint qubits."""

    num_qubits: int
    layers: List[List[Gate]] = field(default_factory=list)

    def __post_init__(self):
        for i, layer in enumerate(self.layers):
            used: List[int] = []
            for name, qubits in layer:
                if name not in GATE_ARITY:
                    raise ValueError(f"Unsupported Clifford gate: {name}")
                if len(qubits) != GATE_ARITY[name]:
                    raise ValueError(f"{name} acts on {GATE_ARITY[name]} qubits, got {qubits}")
                if any(q < 0 or q >= self.num_qubits for q in qubits):
                    raise ValueError(f"Gate {name}{qubits} out of range for {self.num_qubits} qubits")
                used.extend(qubits)
            if len(set(used)) != len(used):
                raise ValueError(f"Layer {i} reuses a qubit: {layer}")

    @classmethod
    def from_gates(cls, num_qubits: int, gates: Sequence[Gate]) -> "CliffordCircuit":
        """Schedule a gate sequence into as-soon-as-possible layers."""
        frontier = [0] * num_qubits
        layers: List[List[Gate]] = []
        for name, qubits in gates:
            qubits = tuple(int(q) for q in qubits)
            slot = max(frontier[q] for q in qubits)
            if slot == len(layers):
                layers.append([])
            layers[slot].append((name, qubits))
            for q in qubits:
                frontier[q] = slot + 1
        return cls(num_qubits, layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self) -> Iterator[Gate]:
        for layer in self.layers:
            yield from layer

    def apply(self, state: StateVector, offset: int = 0) -> StateVector:
        out = state
        for name, qubits in self.gates():
            out = apply_gate(out, STANDARD_GATES[name], [offset + q for q in qubits])
        return out

    def unitary(self) -> np.ndarray:
        dim = 1 << self.num_qubits
        columns = [
            self.apply(StateVector.from_bits(index_to_bits(i, self.num_qubits))).amplitudes
            for i in range(dim)
        ]
        return np.stack(columns, axis=1)

    def then(self, other: "CliffordCircuit") -> "CliffordCircuit":
        """``other`` applied after ``self``, layers kept as they are."""
        return CliffordCircuit(self.num_qubits, self.layers + other.layers)

    def transpose(self) -> "CliffordCircuit":
        """C^T; H, S and CX are symmetric matrices, so only the order reverses."""
        return CliffordCircuit(self.num_qubits, [list(layer) for layer in reversed(self.layers)])

    def inverse(self) -> "CliffordCircuit":
        gates: List[Gate] = []
        for name, qubits in reversed(list(self.gates())):
            gates.extend([(name, qubits)] * (3 if name == "S" else 1))
        return CliffordCircuit.from_gates(self.num_qubits, gates)

    def segments(self, k: int) -> List["CliffordCircuit"]:
        """Split into k contiguous layer chunks C_1..C_k of ceil(t/k) layers (short chunks padded)."""
        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        size = math.ceil(self.depth / k)
        chunks = []
        for i in range(k):
            layers = [list(layer) for layer in self.layers[i * size:(i + 1) * size]]
            layers += [[] for _ in range(size - len(layers))]
            chunks.append(CliffordCircuit(self.num_qubits, layers))
        return chunks

    def to_text(self) -> str:
        lines = [f"QUBITS {self.num_qubits}", f"DEPTH {self.depth}"]
        for i, layer in enumerate(self.layers):
            if i:
                lines.append("---")
            for name, qubits in layer:
                lines.append(" ".join([name] + [str(q) for q in qubits]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CliffordCircuit":
        num_qubits: Optional[int] = None
        depth: Optional[int] = None
        layers: List[List[Gate]] = [[]]
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            head = tokens[0].upper()
            if head == "QUBITS":
                num_qubits = int(tokens[1])
            elif head == "DEPTH":
                depth = int(tokens[1])
            elif head == "---":
                layers.append([])
            elif head in GATE_ARITY:
                layers[-1].append((head, tuple(int(q) for q in tokens[1:])))
            else:
                raise ValueError(f"Unknown gate line: {raw!r}")
        if depth == 0:
            layers = []
        if num_qubits is None:
            used = [q for layer in layers for _, qs in layer for q in qs]
            num_qubits = max(used) + 1 if used else 1
        return cls(num_qubits, layers)


@dataclass
class CliffordTableau:
    """Binary symplectic tableau with sign bits."""

    num_qubits: int
    x: np.ndarray
    z: np.ndarray
    r: np.ndarray

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        eye = np.eye(n, dtype=np.uint8)
        zero = np.zeros((n, n), dtype=np.uint8)
        return cls(
            n,
            np.vstack([eye, zero]),
            np.vstack([zero, eye]),
            np.zeros(2 * n, dtype=np.uint8),
        )

    @classmethod
    def from_circuit(cls, circuit: CliffordCircuit) -> "CliffordTableau":
        return cls.identity(circuit.num_qubits).apply_circuit(circuit)

    def copy(self) -> "CliffordTableau":
        return CliffordTableau(self.num_qubits, self.x.copy(), self.z.copy(), self.r.copy())

    def apply_gate(self, name: str, qubits: Sequence[int]) -> "CliffordTableau":
        """Compose a gate after the represented Clifford (in place)."""
        _apply_rule(self.x, self.z, self.r, (name, tuple(qubits)))
        return self

    def apply_circuit(self, circuit: CliffordCircuit) -> "CliffordTableau":
        if circuit.num_qubits != self.num_qubits:
            raise ValueError(
                f"Circuit on {circuit.num_qubits} qubits applied to {self.num_qubits}-qubit tableau"
            )
        for gate in circuit.gates():
            _apply_rule(self.x, self.z, self.r, gate)
        return self

    def symplectic_matrix(self) -> np.ndarray:
        return np.hstack([self.x, self.z]).astype(np.uint8)

    def is_symplectic(self) -> bool:
        n = self.num_qubits
        m = self.symplectic_matrix().astype(np.int64)
        omega = np.block(
            [[np.zeros((n, n), dtype=np.int64), np.eye(n, dtype=np.int64)],
             [np.eye(n, dtype=np.int64), np.zeros((n, n), dtype=np.int64)]]
        )
        return bool(np.array_equal((m @ omega @ m.T) % 2, omega))

    def row_pauli(self, row: int) -> PauliString:
        x = tuple(int(v) for v in self.x[row])
        z = tuple(int(v) for v in self.z[row])
        num_y = sum(a & b for a, b in zip(x, z))
        return PauliString(x, z, 2 * int(self.r[row]) + num_y)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return (
            self.num_qubits == other.num_qubits
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
            and np.array_equal(self.r, other.r)
        )


def conjugate_pauli(circuit: CliffordCircuit, p: PauliString) -> PauliString:
    """V P V^dag for the Clifford V of ``circuit``, phase included."""
    if circuit.num_qubits != p.num_qubits:
        raise ValueError(f"Pauli on {p.num_qubits} qubits, circuit on {circuit.num_qubits}")
    # i^k X^x Z^z = i^(k - #Y) * (Hermitian letters); the odd part of the
    # exponent is invariant, the sign bit follows the tableau rules
    hermitian_exp = (p.phase_exp - p.num_y) % 4
    x = np.array([p.x_bits], dtype=np.uint8)
    z = np.array([p.z_bits], dtype=np.uint8)
    r = np.array([hermitian_exp // 2], dtype=np.uint8)
    for gate in circuit.gates():
        _apply_rule(x, z, r, gate)
    xs = tuple(int(v) for v in x[0])
    zs = tuple(int(v) for v in z[0])
    num_y = sum(a & b for a, b in zip(xs, zs))
    return PauliString(xs, zs, (hermitian_exp % 2) + 2 * int(r[0]) + num_y)


def apply_clifford(
    target: Union[CliffordTableau, StateVector], circuit: CliffordCircuit
) -> Union[CliffordTableau, StateVector]:
    """Apply a circuit to a tableau (copy) or a statevector."""
    if isinstance(target, CliffordTableau):
        return target.copy().apply_circuit(circuit)
    return circuit.apply(target)


def _symplectic_form(u: np.ndarray, v: np.ndarray, n: int) -> int:
    return int((u[:n] @ v[n:] + u[n:] @ v[:n]) % 2)


def random_symplectic(n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Uniformly random symplectic basis (images of X_j and Z_j).

    Each pair (v_j, w_j) is drawn uniformly from the symplectic complement
    of the earlier pairs: v_j nonzero, w_j with <v_j, w_j> = 1. Every step
    has a choice count independent of earlier choices, so the resulting
    group element is uniform.

    Returns:
        (x, z) arrays of shape (2n, n) in tableau row order
    """
    pairs: List[Tuple[np.ndarray, np.ndarray]] = []

    def project(u: np.ndarray) -> np.ndarray:
        for v, w in pairs:
            u = (u + _symplectic_form(u, w, n) * v + _symplectic_form(u, v, n) * w) % 2
        return u

    for _ in range(n):
        while True:
            v = project(rng.integers(0, 2, size=2 * n))
            if v.any():
                break
        while True:
            w = project(rng.integers(0, 2, size=2 * n))
            if _symplectic_form(v, w, n) == 1:
                break
        pairs.append((v, w))

    rows = [v for v, _ in pairs] + [w for _, w in pairs]
    matrix = np.array(rows, dtype=np.uint8)
    return matrix[:, :n].copy(), matrix[:, n:].copy()


def random_clifford_tableau(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Uniformly random Clifford (modulo global phase) as a tableau."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    x, z = random_symplectic(n, rng)
    r = rng.integers(0, 2, size=2 * n).astype(np.uint8)
    return CliffordTableau(n, x, z, r)


def synthesize(tableau: CliffordTableau) -> CliffordCircuit:
    """
    Build an {H, S, CX} circuit whose tableau equals ``tableau`` exactly.

    Gates are applied to a working copy until it reduces to a Pauli
    frame; the circuit is that Pauli followed by the inverse reduction.
    """
    n = tableau.num_qubits
    work = tableau.copy()
    ops: List[Gate] = []

    def emit(name: str, *qubits: int) -> None:
        work.apply_gate(name, qubits)
        ops.append((name, tuple(qubits)))

    for i in range(n):
        row = i
        pivot = next((j for j in range(i, n) if work.x[row, j]), None)
        if pivot is None:
            pivot = next(j for j in range(i, n) if work.z[row, j])
            emit("H", pivot)
        if pivot != i:
            emit("CX", i, pivot)
            emit("CX", pivot, i)
            emit("CX", i, pivot)
        for j in range(i + 1, n):
            if work.x[row, j]:
                emit("CX", i, j)
        if work.z[row, i]:
            emit("S", i)
        for j in range(i + 1, n):
            if work.z[row, j]:
                emit("H", j)
                emit("CX", i, j)
                emit("H", j)

        row = n + i
        if work.x[row, i]:
            emit("H", i)
            emit("S", i)
            emit("H", i)
        for j in range(i + 1, n):
            if work.x[row, j] and work.z[row, j]:
                emit("S", j)
            if work.x[row, j]:
                emit("H", j)
            if work.z[row, j]:
                emit("CX", j, i)

    gates: List[Gate] = []
    for q in range(n):
        if work.r[q]:
            gates += [("S", (q,)), ("S", (q,))]
        if work.r[n + q]:
            gates += [("H", (q,)), ("S", (q,)), ("S", (q,)), ("H", (q,))]
    for name, qubits in reversed(ops):
        gates.extend([(name, qubits)] * (3 if name == "S" else 1))
    return CliffordCircuit.from_gates(n, gates)


def random_clifford(n: int, rng: np.random.Generator) -> CliffordCircuit:
    """Uniformly random n-qubit Clifford as a generator-gate circuit."""
    return synthesize(random_clifford_tableau(n, rng))


def random_layered_clifford(n: int, depth: int, rng: np.random.Generator) -> CliffordCircuit:
    """
    Random circuit of exactly ``depth`` layers.

    Each layer places CX gates (random direction) on a random subset of a
    staggered pair pattern and H or S on some of the remaining qubits.
    """
    layers: List[List[Gate]] = []
    for i in range(depth):
        layer: List[Gate] = []
        free = set(range(n))
        for j in range(i % 2, n - 1, 2):
            if rng.random() < 0.5:
                pair = (j, j + 1) if rng.random() < 0.5 else (j + 1, j)
                layer.append(("CX", pair))
                free -= {j, j + 1}
        for q in sorted(free):
            choice = int(rng.integers(0, 3))
            if choice < 2:
                layer.append((("H", "S")[choice], (q,)))
        layers.append(layer)
    return CliffordCircuit(n, layers)


def _full_gate(name: str, qubits: Tuple[int, ...], n: int) -> np.ndarray:
    return CliffordCircuit(n, [[(name, qubits)]]).unitary()


def _canonical_rows(states: np.ndarray) -> np.ndarray:
    first = np.argmax(np.abs(states) > 1e-9, axis=1)
    lead = states[np.arange(states.shape[0]), first]
    return states * (np.abs(lead) / lead)[:, None]


def enumerate_stabilizer_states(n: int) -> np.ndarray:
    """
    Every n-qubit stabilizer state, found by breadth-first search from |0^n>.

    States are phase-normalized so their first nonzero amplitude is real
    and positive; rows are ordered by discovery.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    gates = [_full_gate("H", (q,), n) for q in range(n)]
    gates += [_full_gate("S", (q,), n) for q in range(n)]
    gates += [_full_gate("CX", (c, t), n) for c in range(n) for t in range(n) if c != t]

    start = np.zeros((1, 1 << n), dtype=complex)
    start[0, 0] = 1.0
    found: Dict[bytes, int] = {}
    table: List[np.ndarray] = []

    def key(row: np.ndarray) -> bytes:
        return (np.round(row.view(float), 8) + 0.0).tobytes()

    for row in start:
        found[key(row)] = 0
        table.append(row)
    frontier = start
    while frontier.size:
        fresh = []
        for g in gates:
            for row in _canonical_rows(frontier @ g.T):
                k = key(row)
                if k not in found:
                    found[k] = len(table)
                    table.append(row)
                    fresh.append(row)
        frontier = np.array(fresh) if fresh else np.zeros((0, 1 << n), dtype=complex)
    logger.debug("stabilizer states enumerated", n=n, count=len(table))
    return np.array(table)


def clifford_teleport(
    circuit: CliffordCircuit,
    input_state: StateVector,
    rng: np.random.Generator,
    choi: Optional[StateVector] = None,
) -> Tuple[StateVector, PauliString, TeleportTrace]:
    """
    Teleport ``input_state`` through the Choi state of a Clifford V.

    The post state is (P' V (x) I)|psi> with P' = V X^a Z^b V^dag; applying
    ``correction.dagger()`` to the first n qubits recovers (V (x) I)|psi>.

    Returns:
        (post state, correction P', teleport trace)
    """
    n = circuit.num_qubits
    if choi is None:
        choi = circuit.apply(prepare_epr(n), offset=n)
    if choi.num_qubits != 2 * n:
        raise ValueError(f"Choi state has {choi.num_qubits} qubits, expected {2 * n}")
    post, trace = teleport_gate(choi, input_state, rng)
    return post, conjugate_pauli(circuit, trace.pauli_error), trace


def _swap_halves(state: StateVector, n: int) -> StateVector:
    return state.permute(list(range(n, 2 * n)) + list(range(n)))


def clifford_spacetime(
    circuit: CliffordCircuit,
    k: int,
    rng: np.random.Generator,
    input_state: Optional[StateVector] = None,
) -> Tuple[StateVector, SpacetimeTrace]:
    """
    Run a depth-t Clifford circuit with k*n qubits at depth floor(t/k) + 4.

    C = C_k ... C_1 is cut into k segments. Choi blocks carry
    |I, C_{j+1} C_j> for consecutive segment pairs and are chained by one
    Bell layer (measuring each left block's B half against the next
    block's A half). For even k the chain holds |I, Q C> and reading out
    A gives Q C X^j |0>; for odd k the first segment acts on the input,
    which is teleported through the chain. The Pauli frame is tracked in
    the Heisenberg picture and undone at the end.

    Returns:
        (corrected output state, trace with the applied correction)
    """
    n = circuit.num_qubits
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if input_state is not None:
        if k % 2 == 0:
            raise ValueError(f"Arbitrary input states need odd k, got {k}")
        if input_state.num_qubits != n:
            raise ValueError(f"Input has {input_state.num_qubits} qubits, circuit has {n}")

    t = circuit.depth
    segments = circuit.segments(k)
    trace = SpacetimeTrace(depth_used=depth_budget(t, k), qubits_used=k * n, effective_t=t)

    head = segments[0] if k % 2 else None
    body = segments[1:] if k % 2 else segments

    def block(first: CliffordCircuit, second: CliffordCircuit) -> StateVector:
        epr = prepare_epr(n)
        return second.apply(first.transpose().apply(epr), offset=n)

    state = block(body[0], body[1])
    carried = body[0].then(body[1])
    frame = PauliString.identity(n)
    for j in range(2, len(body), 2):
        right_circuit = body[j].then(body[j + 1])
        right = block(body[j], body[j + 1])
        post, merge = teleport_gate(right, _swap_halves(state, n), rng)
        state = _swap_halves(post, n)
        frame = conjugate_pauli(right_circuit, merge.pauli_error * frame)
        carried = carried.then(right_circuit)
        trace.merges.append(merge)

    if head is None:
        readout, post, _ = measure_computational(state, list(range(n)), rng)
        trace.readout = readout
        flip = PauliString.from_xz(readout, (0,) * n)
        correction = frame * conjugate_pauli(carried, flip)
    else:
        source = input_state if input_state is not None else StateVector.zeros(n)
        post, merge = teleport_gate(state, head.apply(source), rng)
        trace.merges.append(merge)
        correction = frame * conjugate_pauli(carried, merge.pauli_error)

    trace.correction = correction
    return correction.dagger().apply(post), trace
