"""Bell-state measurement, gate teleportation and spacetime conversion.

Register layout: a Choi state |I, U> lives on A = qubits 0..n-1 and
B = n..2n-1 with EPR pair i on (i, n+i). Bell outcome (a, b) on a pair
(q1, q2) projects onto (X^a Z^b (x) I)|Phi>, the Pauli acting on q1.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..utils.logger import get_logger
from .ensembles import BrickworkCircuit, build_brickwork, prepare_epr
from .pauli import PauliString
from .statevector import (
    Bits,
    StateVector,
    measure_computational,
    project_bell_pair,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class BellOutcome:
    """Outcome bits of n Bell measurements."""

    a: Bits
    b: Bits

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError(f"Outcome lengths differ: {len(self.a)} vs {len(self.b)}")

    @property
    def index(self) -> int:
        """Outcome as an integer over the 2n bits a_0..a_{n-1} b_0..b_{n-1}."""
        value = 0
        for bit in self.a + self.b:
            value = (value << 1) | bit
        return value

    def pauli(self) -> PauliString:
        return PauliString.from_xz(self.a, self.b)


@dataclass
class TeleportTrace:
    """Record of one Bell-measurement layer."""

    outcome: BellOutcome
    pauli_error: PauliString
    depth_used: int
    postselect_prob: float

    def to_dict(self) -> dict:
        return {
            "a": list(self.outcome.a),
            "b": list(self.outcome.b),
            "pauli_error": self.pauli_error.label,
            "depth_used": self.depth_used,
            "postselect_prob": self.postselect_prob,
        }


@dataclass
class SpacetimeTrace:
    """Record of a spacetime-conversion run."""

    merges: List[TeleportTrace] = field(default_factory=list)
    readout: Optional[Bits] = None
    depth_used: int = 0
    effective_t: int = 0
    qubits_used: int = 0
    correction: Optional[PauliString] = None
    circuit: Optional[BrickworkCircuit] = None

    def to_dict(self) -> dict:
        return {
            "merges": [m.to_dict() for m in self.merges],
            "readout": list(self.readout) if self.readout is not None else None,
            "depth_used": self.depth_used,
            "effective_t": self.effective_t,
            "qubits_used": self.qubits_used,
            "correction": self.correction.label if self.correction else None,
        }


def bell_measure(
    state: StateVector, pairs: Sequence[Tuple[int, int]], rng: np.random.Generator
) -> Tuple[BellOutcome, StateVector, float]:
    """
    Sample Bell measurements on the given qubit pairs.

    Pairs are measured one after another with exact conditional Born
    probabilities, which samples the joint outcome distribution exactly.

    Returns:
        (outcome, normalized residual state on unmeasured qubits, joint probability)
    """
    flat = [q for pair in pairs for q in pair]
    if len(set(flat)) != len(flat):
        raise ValueError(f"Bell pairs overlap: {list(pairs)}")
    if any(q < 0 or q >= state.num_qubits for q in flat):
        raise ValueError(f"Bell pair index out of range for {state.num_qubits} qubits")

    psi = state.tensor
    labels = list(range(state.num_qubits))
    norm_sq = float(np.vdot(state.amplitudes, state.amplitudes).real)
    a_bits, b_bits = [], []
    for pair in pairs:
        branches = []
        for a in (0, 1):
            for b in (0, 1):
                branch, rest = project_bell_pair(psi, labels, pair, a, b)
                branches.append((a, b, branch, float(np.vdot(branch, branch).real)))
        weights = np.array([w for *_, w in branches])
        choice = int(rng.choice(4, p=weights / weights.sum()))
        a, b, psi, _ = branches[choice]
        labels = rest
        a_bits.append(a)
        b_bits.append(b)

    residual = np.asarray(psi, dtype=complex).reshape(-1)
    weight = float(np.vdot(residual, residual).real)
    post = StateVector(residual / np.sqrt(weight))
    return BellOutcome(tuple(a_bits), tuple(b_bits)), post, weight / norm_sq


def _choi_size(choi: StateVector) -> int:
    if choi.num_qubits % 2:
        raise ValueError(f"Choi state must have an even qubit count, got {choi.num_qubits}")
    return choi.num_qubits // 2


def teleport_gate(
    choi: StateVector, input_state: StateVector, rng: np.random.Generator
) -> Tuple[StateVector, TeleportTrace]:
    """
    Teleport the first n qubits (C) of ``input_state`` through |I, U>_{AB}.

    The joint register is A, B, C, D; pairs (A_i, C_i) are Bell measured and
    the post state on B, D equals (U X^a Z^b (x) I)|psi>.
    """
    n = _choi_size(choi)
    if input_state.num_qubits < n:
        raise ValueError(
            f"Input has {input_state.num_qubits} qubits, fewer than the {n} teleported"
        )
    joint = choi.kron(input_state)
    pairs = [(i, 2 * n + i) for i in range(n)]
    outcome, post, prob = bell_measure(joint, pairs, rng)
    trace = TeleportTrace(outcome, outcome.pauli(), 1, prob)
    return post, trace


def merge_choi(
    left: StateVector, right: StateVector, rng: np.random.Generator
) -> Tuple[StateVector, TeleportTrace]:
    """
    Bell-merge |I, U>_{AB} and |I, V>_{CD} on pairs (A_i, C_i).

    Returns |I, V Z^b X^a U^T>_{BD}.
    """
    n = _choi_size(left)
    if _choi_size(right) != n:
        raise ValueError(f"Choi sizes differ: {left.num_qubits} vs {right.num_qubits}")
    joint = left.kron(right)
    pairs = [(i, 2 * n + i) for i in range(n)]
    outcome, post, prob = bell_measure(joint, pairs, rng)
    return post, TeleportTrace(outcome, outcome.pauli(), 1, prob)


def merged_program(
    left: BrickworkCircuit, right: BrickworkCircuit, outcome: BellOutcome
) -> BrickworkCircuit:
    """Recorded program of V Z^b X^a U^T for a merge_choi outcome."""
    # P^T = (X^a Z^b)^T = Z^b X^a, equal to X^a Z^b up to a sign
    return left.transpose().compose(right, outcome.a, outcome.b)


def depth_budget(t: int, k: int) -> int:
    """Circuit depth floor(t/k) + 4 of the k-fold spacetime conversion."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return t // k + 4


def _block(n: int, d2: int, rng: np.random.Generator) -> Tuple[StateVector, BrickworkCircuit]:
    """EPR block with U1 on A and U2 on B: |U1, U2> = |I, U2 U1^T>."""
    u1 = build_brickwork(n, d2, rng)
    u2 = build_brickwork(n, d2, rng)
    state = u2.apply(u1.apply(prepare_epr(n)), offset=n)
    return state, u1.transpose().compose(u2)


def _merge_chain(
    n: int, blocks: int, d2: int, rng: np.random.Generator, trace: SpacetimeTrace
) -> Tuple[StateVector, BrickworkCircuit]:
    state, program = _block(n, d2, rng)
    for _ in range(blocks - 1):
        right, right_program = _block(n, d2, rng)
        state, merge = merge_choi(state, right, rng)
        program = merged_program(program, right_program, merge.outcome)
        trace.merges.append(merge)
    return state, program


def _check_domain(n: int, k: int, t: int) -> None:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if t < 1:
        raise ValueError(f"t must be positive, got {t}")


def spacetime_convert_state(
    n: int, k: int, t: int, rng: np.random.Generator
) -> Tuple[StateVector, SpacetimeTrace, int]:
    """
    Prepare a member of S_{n,t'} (t' >= t) with k*n qubits at depth floor(t/k) + 4.

    Even k = 2m: m Choi blocks of depth d2 = floor(t/k) + 2 on each side are
    merged by one layer of Bell measurements and the surviving A register is
    read out. Odd k = 2m + 1: the extra n qubits carry a depth d2 + 1
    brickwork state that is teleported through the merged Choi state.

    Returns:
        (state, trace, effective_t)
    """
    _check_domain(n, k, t)
    if k % 2:
        state, trace = spacetime_convert_apply(StateVector.zeros(n), k, t, rng)
        return state, trace, trace.effective_t

    d2 = t // k + 2
    trace = SpacetimeTrace(depth_used=depth_budget(t, k), qubits_used=k * n)
    choi, program = _merge_chain(n, k // 2, d2, rng, trace)
    readout, post, _ = measure_computational(choi, list(range(n)), rng)
    trace.readout = readout
    # W|j> = W X^j |0>: fold X^j in front of the program
    prep = BrickworkCircuit(n, [], program.first_parity)
    trace.circuit = prep.compose(program, readout, [0] * n)
    trace.effective_t = trace.circuit.depth
    logger.debug(
        "spacetime state prepared", n=n, k=k, t=t, effective_t=trace.effective_t
    )
    return post, trace, trace.effective_t


def spacetime_convert_apply(
    input_state: StateVector, k: int, t: int, rng: np.random.Generator
) -> Tuple[StateVector, SpacetimeTrace]:
    """
    Apply a random circuit from U_{n,t'} (t' >= t) to ``input_state``, k odd.

    A depth d2 + 1 brickwork circuit acts on the input while (k-1)/2 Choi
    blocks are prepared; one Bell layer teleports the input through the
    merged Choi state.
    """
    n = input_state.num_qubits
    _check_domain(n, k, t)
    if k % 2 == 0:
        raise ValueError(f"Applying a random circuit to an input needs odd k, got {k}")

    d2 = t // k + 2
    trace = SpacetimeTrace(depth_used=depth_budget(t, k), qubits_used=k * n)
    head = build_brickwork(n, d2 + 1, rng)
    choi, program = _merge_chain(n, (k - 1) // 2, d2, rng, trace)
    post, teleport = teleport_gate(choi, head.apply(input_state), rng)
    trace.merges.append(teleport)
    trace.circuit = head.compose(program, teleport.outcome.a, teleport.outcome.b)
    trace.effective_t = trace.circuit.depth
    return post, trace
