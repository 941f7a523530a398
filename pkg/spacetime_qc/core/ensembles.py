"""Random circuit and state ensembles.

Brickwork circuits U_{m,d}: layer i (0-based) of a circuit with first
parity p holds Haar-random two-qubit gates on pairs (j, j+1) with
j = (p + i) mod 2, (p + i) mod 2 + 2, ... and open boundaries.
"""

import copy
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import qr

from ..utils.logger import get_logger
from .statevector import (
    I2,
    GateMatrix,
    StateVector,
    apply_gate,
    apply_matrix,
    index_to_bits,
    xz_matrix,
)

logger = get_logger(__name__)

Descriptor = Tuple[int, ...]

# Per-qubit ancilla choices of the local ensemble: |0>, |+>, |+i>.
LOCAL_STAB_STATES = np.array(
    [[1, 0], [1, 1], [1, 1j]], dtype=complex
) / np.array([[1.0], [np.sqrt(2)], [np.sqrt(2)]])

# Six single-qubit stabilizer states: |0>, |1>, |+>, |->, |+i>, |-i>.
SIX_STATES = np.array(
    [[1, 0], [0, 1], [1, 1], [1, -1], [1, 1j], [1, -1j]], dtype=complex
) / np.array([[1.0], [1.0], [np.sqrt(2)], [np.sqrt(2)], [np.sqrt(2)], [np.sqrt(2)]])


class EnsembleKind(str, Enum):
    """Supported state ensembles."""

    BRICKWORK_STATES = "brickwork-states"
    BRICKWORK_CHOI = "brickwork-choi"
    HAAR_STATES = "haar-states"
    LOCAL_STAB = "local-stab"
    STABILIZER_STATES = "stabilizer-states"
    COMPUTATIONAL = "computational"


@dataclass(frozen=True)
class EnsembleSpec:
    """
    An ensemble selector.

    ``num_qubits`` is m for brickwork states and n otherwise; ``depth`` is d
    (brickwork states) or t (Choi states) and ignored by the other kinds.
    """

    kind: EnsembleKind
    num_qubits: int
    depth: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", EnsembleKind(self.kind))
        if self.num_qubits < 1:
            raise ValueError(f"num_qubits must be positive, got {self.num_qubits}")
        if self.depth < 0:
            raise ValueError(f"depth must be nonnegative, got {self.depth}")
        if self.kind == EnsembleKind.BRICKWORK_STATES and self.num_qubits < 2:
            raise ValueError("Brickwork states need at least 2 qubits")
        if self.kind == EnsembleKind.BRICKWORK_CHOI and self.num_qubits < 2:
            raise ValueError("Brickwork Choi states need n >= 2")

    @classmethod
    def brickwork_states(cls, m: int, d: int) -> "EnsembleSpec":
        return cls(EnsembleKind.BRICKWORK_STATES, m, d)

    @classmethod
    def brickwork_choi(cls, n: int, t: int) -> "EnsembleSpec":
        return cls(EnsembleKind.BRICKWORK_CHOI, n, t)

    @classmethod
    def haar_states(cls, n: int) -> "EnsembleSpec":
        return cls(EnsembleKind.HAAR_STATES, n)

    @classmethod
    def local_stab(cls, n: int) -> "EnsembleSpec":
        return cls(EnsembleKind.LOCAL_STAB, n)

    @classmethod
    def stabilizer_states(cls, n: int) -> "EnsembleSpec":
        return cls(EnsembleKind.STABILIZER_STATES, n)

    @classmethod
    def computational(cls, n: int) -> "EnsembleSpec":
        return cls(EnsembleKind.COMPUTATIONAL, n)

    @property
    def register_qubits(self) -> int:
        """Qubits of each sampled state."""
        if self.kind == EnsembleKind.BRICKWORK_CHOI:
            return 2 * self.num_qubits
        return self.num_qubits

    def to_dict(self) -> Dict[str, Union[str, int]]:
        return {"kind": self.kind.value, "num_qubits": self.num_qubits, "depth": self.depth}


def sample_haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """
    Haar-random dim x dim unitary.

    Ginibre matrix, QR, then each column of Q is rephased so that the
    diagonal of R becomes positive.
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def sample_haar_su4(rng: np.random.Generator) -> GateMatrix:
    """Haar-random two-qubit gate (global phase is irrelevant downstream)."""
    return GateMatrix(sample_haar_unitary(4, rng))


@dataclass
class GatePlacement:
    """A two-qubit gate on neighbouring qubits (j, j+1)."""

    gate: GateMatrix
    pair: Tuple[int, int]


def layer_pairs(num_qubits: int, parity: int) -> List[Tuple[int, int]]:
    return [(j, j + 1) for j in range(parity, num_qubits - 1, 2)]


def _embed(op: np.ndarray, slot: int) -> np.ndarray:
    return np.kron(op, I2) if slot == 0 else np.kron(I2, op)


@dataclass
class BrickworkCircuit:
    """Layered nearest-neighbour two-qubit gate program."""

    num_qubits: int
    layers: List[List[GatePlacement]] = field(default_factory=list)
    first_parity: int = 0
    # single-qubit operators on qubits no gate ever touches
    idle_ops: Dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def layer_parity(self, index: int) -> int:
        return (self.first_parity + index) % 2

    @property
    def last_parity(self) -> int:
        return self.layer_parity(self.depth - 1)

    @property
    def gate_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def declared_volume(self) -> int:
        """floor(m/2) * d, independent of the open-boundary gate count."""
        return (self.num_qubits // 2) * self.depth

    def check_structure(self) -> None:
        """Raise ValueError unless every layer is a staggered brickwork layer."""
        for i, layer in enumerate(self.layers):
            expected = layer_pairs(self.num_qubits, self.layer_parity(i))
            pairs = [p.pair for p in layer]
            if sorted(pairs) != expected:
                raise ValueError(f"Layer {i} pairs {pairs} differ from {expected}")

    def apply(self, state: StateVector, offset: int = 0) -> StateVector:
        """Apply the circuit on qubits offset .. offset+num_qubits-1."""
        out = state
        for q, op in sorted(self.idle_ops.items()):
            out = apply_gate(out, op, [offset + q])
        for layer in self.layers:
            for placement in layer:
                j, k = placement.pair
                out = apply_gate(out, placement.gate, [offset + j, offset + k])
        return out

    def unitary(self) -> np.ndarray:
        """Dense 2^m x 2^m matrix of the circuit."""
        dim = 1 << self.num_qubits
        columns = []
        for index in range(dim):
            basis = StateVector.from_bits(index_to_bits(index, self.num_qubits))
            columns.append(self.apply(basis).amplitudes)
        return np.stack(columns, axis=1)

    def transpose(self) -> "BrickworkCircuit":
        """Circuit of U^T: reversed layer order with transposed gates."""
        layers = [
            [GatePlacement(p.gate.transpose, p.pair) for p in layer]
            for layer in reversed(self.layers)
        ]
        first = self.last_parity if self.depth else self.first_parity
        idle = {q: op.T for q, op in self.idle_ops.items()}
        return BrickworkCircuit(self.num_qubits, layers, first, idle)

    def compose(
        self,
        other: "BrickworkCircuit",
        a: Optional[Sequence[int]] = None,
        b: Optional[Sequence[int]] = None,
    ) -> "BrickworkCircuit":
        """
        Program of ``other . X^a Z^b . self`` with the Pauli absorbed into gates.

        The Pauli (and any idle operators) is folded into the first gate of
        ``other`` on each qubit, else the last gate of ``self``. When the
        last layer of ``self`` and the first layer of ``other`` share parity
        the two layers are multiplied into one, so the depth is
        d1 + d2 - 1 instead of d1 + d2.
        """
        if other.num_qubits != self.num_qubits:
            raise ValueError(
                f"Cannot compose circuits on {self.num_qubits} and {other.num_qubits} qubits"
            )
        m = self.num_qubits
        a = list(a) if a is not None else [0] * m
        b = list(b) if b is not None else [0] * m
        before = copy.deepcopy(self.layers)
        after = copy.deepcopy(other.layers)
        idle: Dict[int, np.ndarray] = {}

        for q in range(m):
            op = other.idle_ops.get(q, I2) @ xz_matrix(a[q], b[q]) @ self.idle_ops.get(q, I2)
            if np.allclose(op, I2):
                continue
            if not _absorb(after, q, op, first=True) and not _absorb(before, q, op, first=False):
                idle[q] = op

        if before and after and self.last_parity == other.first_parity:
            head = {p.pair: p for p in after[0]}
            merged = [
                GatePlacement(GateMatrix(head[p.pair].gate.entries @ p.gate.entries), p.pair)
                for p in before[-1]
            ]
            layers = before[:-1] + [merged] + after[1:]
        else:
            layers = before + after
        first = self.first_parity if self.layers else other.first_parity
        return BrickworkCircuit(m, layers, first, idle)

    def to_text(self) -> str:
        """Reproducible text record with 17 significant digits per real number."""
        lines = [f"brickwork {self.num_qubits} {self.depth} {self.first_parity}"]
        for q, op in sorted(self.idle_ops.items()):
            lines.append(f"idle {q} " + _format_entries(op))
        for i, layer in enumerate(self.layers):
            lines.append(f"layer {i}")
            for p in layer:
                lines.append(f"gate {p.pair[0]} {p.pair[1]} " + _format_entries(p.gate.entries))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BrickworkCircuit":
        rows = [line.split() for line in text.strip().splitlines() if line.strip()]
        if not rows or rows[0][0] != "brickwork":
            raise ValueError("Missing 'brickwork' header line")
        num_qubits, depth, first_parity = (int(v) for v in rows[0][1:4])
        circuit = cls(num_qubits, [], first_parity)
        for row in rows[1:]:
            if row[0] == "idle":
                circuit.idle_ops[int(row[1])] = _parse_entries(row[2:], 2)
            elif row[0] == "layer":
                circuit.layers.append([])
            elif row[0] == "gate":
                gate = GateMatrix(_parse_entries(row[3:], 4))
                circuit.layers[-1].append(GatePlacement(gate, (int(row[1]), int(row[2]))))
            else:
                raise ValueError(f"Unknown record type: {row[0]}")
        if circuit.depth != depth:
            raise ValueError(f"Header depth {depth} but {circuit.depth} layers found")
        return circuit


def _absorb(layers: List[List[GatePlacement]], q: int, op: np.ndarray, first: bool) -> bool:
    order = layers if first else reversed(layers)
    for layer in order:
        for p in layer:
            if q in p.pair:
                embedded = _embed(op, p.pair.index(q))
                entries = p.gate.entries @ embedded if first else embedded @ p.gate.entries
                p.gate = GateMatrix(entries)
                return True
    return False


def _format_entries(matrix: np.ndarray) -> str:
    values = []
    for z in np.asarray(matrix).reshape(-1):
        values.append(f"{z.real:.17g}")
        values.append(f"{z.imag:.17g}")
    return " ".join(values)


def _parse_entries(tokens: Sequence[str], dim: int) -> np.ndarray:
    if len(tokens) != 2 * dim * dim:
        raise ValueError(f"Expected {2 * dim * dim} numbers, got {len(tokens)}")
    values = np.array([float(t) for t in tokens])
    return (values[0::2] + 1j * values[1::2]).reshape(dim, dim)


def build_brickwork(
    m: int, d: int, rng: np.random.Generator, first_parity: int = 0
) -> BrickworkCircuit:
    """
    Sample a brickwork circuit from U_{m,d}.

    Args:
        m: Number of qubits (>= 2)
        d: Number of layers (>= 0)
        rng: Random stream
        first_parity: Parity of the first layer (0 puts it on (0,1),(2,3),...)

    Returns:
        BrickworkCircuit with independent Haar gates
    """
    if m < 2:
        raise ValueError(f"Brickwork circuits need at least 2 qubits, got {m}")
    if d < 0:
        raise ValueError(f"Depth must be nonnegative, got {d}")
    layers = [
        [GatePlacement(sample_haar_su4(rng), pair) for pair in layer_pairs(m, (first_parity + i) % 2)]
        for i in range(d)
    ]
    return BrickworkCircuit(m, layers, first_parity)


def prepare_epr(n: int) -> StateVector:
    """n EPR pairs; A = qubits 0..n-1, B = n..2n-1, pair i = (i, n+i)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    dim = 1 << n
    amplitudes = np.zeros(dim * dim, dtype=complex)
    k = np.arange(dim)
    amplitudes[k * dim + k] = 1 / np.sqrt(dim)
    return StateVector(amplitudes)


def choi_from_unitary(unitary: np.ndarray) -> StateVector:
    """|I, U> = (I_A (x) U_B)|phi^n> for a dense unitary."""
    dim = unitary.shape[0]
    n = dim.bit_length() - 1
    return apply_matrix(prepare_epr(n), unitary, list(range(n, 2 * n))).normalize()


def sample_choi(n: int, t: int, rng: np.random.Generator) -> Tuple[StateVector, BrickworkCircuit]:
    """Choi state of a brickwork circuit from U_{n,t}, with the circuit."""
    if n < 2:
        raise ValueError(f"Brickwork Choi states need n >= 2, got {n}")
    circuit = build_brickwork(n, t, rng)
    return circuit.apply(prepare_epr(n), offset=n), circuit


def local_stab_state(indices: Sequence[int]) -> StateVector:
    """Product of per-qubit picks from {|0>, |+>, |+i>}."""
    amplitudes = np.ones(1, dtype=complex)
    for i in indices:
        amplitudes = np.kron(amplitudes, LOCAL_STAB_STATES[i])
    return StateVector(amplitudes)


def sample_state_with_descriptor(
    spec: EnsembleSpec, rng: np.random.Generator
) -> Tuple[StateVector, Descriptor]:
    """
    Sample a member together with a descriptor that rebuilds it.

    Descriptors are per-qubit indices for the local ensemble, the
    enumeration index for small stabilizer ensembles, the bitstring for
    the computational ensemble, and a 63-bit seed otherwise.
    """
    n = spec.num_qubits
    if spec.kind == EnsembleKind.LOCAL_STAB:
        descriptor = tuple(int(i) for i in rng.integers(0, 3, size=n))
    elif spec.kind == EnsembleKind.COMPUTATIONAL:
        descriptor = tuple(int(i) for i in rng.integers(0, 2, size=n))
    elif spec.kind == EnsembleKind.STABILIZER_STATES and n <= STABILIZER_TABLE_LIMIT:
        descriptor = (int(rng.integers(0, len(stabilizer_table(n)))),)
    else:
        descriptor = (int(rng.integers(0, 2**63 - 1)),)
    return state_from_descriptor(spec, descriptor), descriptor


def state_from_descriptor(spec: EnsembleSpec, descriptor: Descriptor) -> StateVector:
    """Deterministically rebuild an ensemble member."""
    n = spec.num_qubits
    if spec.kind == EnsembleKind.LOCAL_STAB:
        return local_stab_state(descriptor)
    if spec.kind == EnsembleKind.COMPUTATIONAL:
        return StateVector.from_bits(descriptor)
    if spec.kind == EnsembleKind.STABILIZER_STATES and n <= STABILIZER_TABLE_LIMIT:
        return StateVector(stabilizer_table(n)[descriptor[0]])

    rng = np.random.default_rng(descriptor[0])
    if spec.kind == EnsembleKind.HAAR_STATES:
        return StateVector(sample_haar_unitary(1 << n, rng)[:, 0])
    if spec.kind == EnsembleKind.BRICKWORK_STATES:
        return build_brickwork(n, spec.depth, rng).apply(StateVector.zeros(n))
    if spec.kind == EnsembleKind.BRICKWORK_CHOI:
        return sample_choi(n, spec.depth, rng)[0]
    if spec.kind == EnsembleKind.STABILIZER_STATES:
        from .cliffordsim import random_clifford

        return random_clifford(n, rng).apply(StateVector.zeros(n))
    raise ValueError(f"Unsupported ensemble kind: {spec.kind}")


def sample_state(spec: EnsembleSpec, rng: np.random.Generator) -> StateVector:
    """Draw one state from the ensemble."""
    n = spec.num_qubits
    if spec.kind == EnsembleKind.BRICKWORK_STATES:
        return build_brickwork(n, spec.depth, rng).apply(StateVector.zeros(n))
    if spec.kind == EnsembleKind.BRICKWORK_CHOI:
        return sample_choi(n, spec.depth, rng)[0]
    if spec.kind == EnsembleKind.HAAR_STATES:
        return StateVector(sample_haar_unitary(1 << n, rng)[:, 0])
    return sample_state_with_descriptor(spec, rng)[0]


STABILIZER_TABLE_LIMIT = 4


@lru_cache(maxsize=None)
def stabilizer_table(n: int) -> np.ndarray:
    """All n-qubit stabilizer states (one row each), in a fixed enumeration order."""
    from .cliffordsim import enumerate_stabilizer_states

    table = enumerate_stabilizer_states(n)
    table.setflags(write=False)
    return table
