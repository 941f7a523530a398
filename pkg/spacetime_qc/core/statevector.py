"""Dense statevector engine.

Qubit 0 is the most significant bit of the basis index: the bitstring
b_0 b_1 ... b_{m-1} labels basis state sum_i b_i * 2^(m-1-i). Amplitude
arrays are reshaped to one axis per qubit, axis i being qubit i, and gates
are contracted against the target axes with ``np.tensordot``.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import get_config
from ..utils.logger import get_logger
from ..utils.validators import require, validate_density_matrix, validate_unitary

logger = get_logger(__name__)

Bits = Tuple[int, ...]

SQRT2 = np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
S = np.array([[1, 0], [0, 1j]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

STANDARD_GATES: Dict[str, np.ndarray] = {
    "I": I2,
    "X": X,
    "Y": Y,
    "Z": Z,
    "H": H,
    "S": S,
    "CX": CNOT,
    "SWAP": SWAP,
}


def bits_to_index(bits: Sequence[int]) -> int:
    """Basis index of a bitstring, qubit 0 first."""
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def index_to_bits(index: int, length: int) -> Bits:
    """Bitstring of a basis index, qubit 0 first."""
    return tuple((index >> (length - 1 - i)) & 1 for i in range(length))


def xz_matrix(a: int, b: int) -> np.ndarray:
    """Single-qubit X^a Z^b."""
    m = I2
    if b:
        m = Z
    if a:
        m = X @ m
    return m


def _check_size(num_qubits: int) -> None:
    limit = get_config().simulation.max_dense_qubits
    if num_qubits > limit:
        raise ValueError(
            f"{num_qubits} qubits exceeds the dense simulation limit of {limit}"
        )


@dataclass
class GateMatrix:
    """A one- or two-qubit gate."""

    entries: np.ndarray
    arity: int = field(init=False)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        shape = self.entries.shape
        if shape not in ((2, 2), (4, 4)):
            raise ValueError(f"Gate must be 2x2 or 4x4, got shape {shape}")
        self.arity = 1 if shape == (2, 2) else 2
        sim = get_config().simulation
        if sim.validate_gates:
            valid, error = validate_unitary(self.entries, sim.unitarity_tol)
            if not valid:
                raise ValueError(error)

    @property
    def dagger(self) -> "GateMatrix":
        return GateMatrix(self.entries.conj().T)

    @property
    def transpose(self) -> "GateMatrix":
        return GateMatrix(self.entries.T)


@dataclass
class StateVector:
    """Dense amplitudes over ``num_qubits`` qubits, possibly unnormalized."""

    amplitudes: np.ndarray
    normalized: bool = True
    num_qubits: int = field(init=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        size = self.amplitudes.size
        if size == 0 or size & (size - 1):
            raise ValueError(f"Amplitude count must be a power of two, got {size}")
        self.num_qubits = size.bit_length() - 1
        _check_size(self.num_qubits)
        if self.normalized:
            norm = np.linalg.norm(self.amplitudes)
            if abs(norm - 1.0) > get_config().simulation.norm_tol:
                raise ValueError(f"State flagged normalized has norm {norm:.12f}")

    @classmethod
    def zeros(cls, num_qubits: int) -> "StateVector":
        """|0...0> on ``num_qubits`` qubits."""
        return cls.from_bits((0,) * num_qubits)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "StateVector":
        _check_size(len(bits))
        amplitudes = np.zeros(1 << len(bits), dtype=complex)
        amplitudes[bits_to_index(bits)] = 1.0
        return cls(amplitudes)

    @classmethod
    def from_unnormalized(cls, amplitudes: np.ndarray) -> "StateVector":
        return cls(amplitudes, normalized=False)

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes with one axis per qubit."""
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        norm = self.norm()
        if norm == 0.0:
            raise ValueError("Cannot normalize the zero vector")
        return StateVector(self.amplitudes / norm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def kron(self, other: "StateVector") -> "StateVector":
        """Tensor product with ``self`` on the leading qubits."""
        return StateVector(
            np.kron(self.amplitudes, other.amplitudes),
            normalized=self.normalized and other.normalized,
        )

    def permute(self, order: Sequence[int]) -> "StateVector":
        """Reorder qubits so that new qubit i is old qubit ``order[i]``."""
        if sorted(order) != list(range(self.num_qubits)):
            raise ValueError(f"Invalid qubit permutation {list(order)}")
        moved = np.transpose(self.tensor, list(order))
        return StateVector(moved.reshape(-1), normalized=self.normalized)

    def reduced_density(self, keep: Sequence[int]) -> np.ndarray:
        """Reduced density matrix on the ``keep`` qubits (in the given order)."""
        require("qubits", keep, self.num_qubits)
        rest = [q for q in range(self.num_qubits) if q not in keep]
        psi = np.transpose(self.tensor, list(keep) + rest).reshape(1 << len(keep), -1)
        return psi @ psi.conj().T

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), normalized=self.normalized)


@dataclass
class DensityMatrix:
    """A validated density matrix."""

    entries: np.ndarray
    num_qubits: int = field(init=False)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        valid, error = validate_density_matrix(self.entries)
        if not valid:
            raise ValueError(error)
        self.num_qubits = self.entries.shape[0].bit_length() - 1

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> "DensityMatrix":
        dim = 1 << num_qubits
        return cls(np.eye(dim, dtype=complex) / dim)

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def expectation(self, observable: np.ndarray) -> float:
        return float(np.real(np.trace(observable @ self.entries)))


GateLike = Union[GateMatrix, np.ndarray]


def as_gate(gate: GateLike) -> GateMatrix:
    return gate if isinstance(gate, GateMatrix) else GateMatrix(gate)


def apply_matrix(
    state: StateVector, matrix: np.ndarray, targets: Sequence[int]
) -> StateVector:
    """Contract a 2^k x 2^k operator against ``targets`` without unitarity checks."""
    targets = list(targets)
    k = len(targets)
    require("qubits", targets, state.num_qubits)
    if matrix.shape != (1 << k, 1 << k):
        raise ValueError(
            f"Operator of shape {matrix.shape} does not act on {k} target qubits"
        )
    op = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * k))
    psi = np.tensordot(op, state.tensor, axes=(list(range(k, 2 * k)), targets))
    psi = np.moveaxis(psi, list(range(k)), targets)
    return StateVector(psi.reshape(-1), normalized=False)


def apply_gate(state: StateVector, gate: GateLike, targets: Sequence[int]) -> StateVector:
    """
    Apply a unitary gate on the target qubits.

    Args:
        state: Input state (left untouched)
        gate: GateMatrix or raw 2x2 / 4x4 array
        targets: Target qubits, first target is the gate's most significant qubit

    Returns:
        New state with the gate applied
    """
    gate = as_gate(gate)
    if gate.arity != len(targets):
        raise ValueError(
            f"Gate arity {gate.arity} does not match {len(targets)} target qubits"
        )
    out = apply_matrix(state, gate.entries, targets)
    out.normalized = state.normalized
    return out


def apply_xz(
    state: StateVector, a: Sequence[int], b: Sequence[int], qubits: Sequence[int]
) -> StateVector:
    """Apply the Pauli X^a Z^b qubit-wise on ``qubits``."""
    out = state
    for q, ai, bi in zip(qubits, a, b):
        if ai or bi:
            out = apply_gate(out, xz_matrix(ai, bi), [q])
    return out


def project_computational(
    state: StateVector, qubits: Sequence[int], bits: Sequence[int]
) -> Tuple[StateVector, float]:
    """
    Project qubits onto a computational-basis bitstring.

    Returns:
        (unnormalized substate on the remaining qubits, squared norm)
    """
    qubits = list(qubits)
    require("qubits", qubits, state.num_qubits)
    require("bits", bits, len(qubits))
    psi = np.moveaxis(state.tensor, qubits, list(range(len(qubits))))
    sub = np.array(psi[tuple(int(b) for b in bits)], dtype=complex).reshape(-1)
    prob = float(np.vdot(sub, sub).real)
    return StateVector(sub, normalized=False), prob


def marginal_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Outcome probabilities of measuring ``qubits``, indexed qubits-first."""
    qubits = list(qubits)
    require("qubits", qubits, state.num_qubits)
    probs = np.abs(np.moveaxis(state.tensor, qubits, list(range(len(qubits))))) ** 2
    return probs.reshape(1 << len(qubits), -1).sum(axis=1)


def measure_computational(
    state: StateVector, qubits: Sequence[int], rng: np.random.Generator
) -> Tuple[Bits, StateVector, float]:
    """
    Sample a computational-basis measurement of ``qubits`` per the Born rule.

    Returns:
        (outcome bits, normalized post-measurement state, outcome probability)
    """
    probs = marginal_probabilities(state, qubits)
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise RuntimeError(f"Total outcome probability {total:.12f} deviates from 1")
    index = int(rng.choice(probs.size, p=probs / total))
    outcome = index_to_bits(index, len(qubits))
    sub, prob = project_computational(state, qubits, outcome)
    post = StateVector(sub.amplitudes / np.sqrt(prob))
    return outcome, post, prob


def bell_effect(a: int, b: int) -> np.ndarray:
    """
    Effect tensor <phi_ab| on one pair, indexed [first qubit, second qubit].

    |phi_ab> = (X^a Z^b (x) I)(|00> + |11>)/sqrt(2), so <ij|phi_ab> = (X^a Z^b)_ij / sqrt(2).
    """
    return xz_matrix(a, b).conj() / SQRT2


def project_bell_pair(
    psi: np.ndarray, labels: List[int], pair: Tuple[int, int], a: int, b: int
) -> Tuple[np.ndarray, List[int]]:
    """
    Contract one pair of axes of a labelled tensor with a Bell effect.

    Args:
        psi: Tensor with one axis per remaining qubit
        labels: Original qubit index of each axis
        pair: (first, second) original qubit indices of the Bell pair
        a, b: Bell outcome bits

    Returns:
        (projected tensor, remaining labels in unchanged order)
    """
    ia, ib = labels.index(pair[0]), labels.index(pair[1])
    out = np.tensordot(psi, bell_effect(a, b), axes=([ia, ib], [0, 1]))
    rest = [q for q in labels if q not in pair]
    return out, rest


def project_bell(
    state: StateVector,
    pairs: Sequence[Tuple[int, int]],
    a: Sequence[int],
    b: Sequence[int],
) -> Tuple[StateVector, float]:
    """Unnormalized projection of every pair onto its Bell outcome."""
    psi = state.tensor
    labels = list(range(state.num_qubits))
    for pair, ai, bi in zip(pairs, a, b):
        psi, labels = project_bell_pair(psi, labels, pair, ai, bi)
    sub = np.asarray(psi, dtype=complex).reshape(-1)
    return StateVector(sub, normalized=False), float(np.vdot(sub, sub).real)


def fidelity(a: StateVector, b: StateVector) -> float:
    """Phase-insensitive overlap |<a|b>|^2 of the normalized arguments."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"Qubit count mismatch: {a.num_qubits} vs {b.num_qubits}"
        )
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        raise ValueError("Fidelity undefined for a zero-norm state")
    overlap = np.vdot(a.amplitudes, b.amplitudes) / (na * nb)
    return float(min(1.0, abs(overlap) ** 2))


def density_from_state(state: StateVector) -> DensityMatrix:
    psi = state.normalize().amplitudes
    return DensityMatrix(np.outer(psi, psi.conj()))


def trace_norm(matrix: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    require("hermitian", matrix)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.size == 0:
        return 0.0
    return float(np.sum(np.abs(np.linalg.eigvalsh(matrix))))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * trace_norm(np.asarray(rho) - np.asarray(sigma))


def random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    dim = 1 << num_qubits
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(z / np.linalg.norm(z))


def random_density_matrix(
    num_qubits: int, rng: np.random.Generator, rank: Optional[int] = None
) -> DensityMatrix:
    """Random mixed state G G^dag / tr(G G^dag) with a Ginibre factor of given rank."""
    if rank == 1:
        return density_from_state(random_state(num_qubits, rng))
    dim = 1 << num_qubits
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real)
