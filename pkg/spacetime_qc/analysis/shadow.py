"""Ancilla-assisted shadow tomography.

An ancilla |phi> drawn from an ensemble is Bell-measured pairwise against
the unknown n-qubit state rho (ancilla qubit i paired with system qubit i).
Outcome (a, b) occurs with probability

    p_ab = 2^-n <v_ab| rho |v_ab>,   |v_ab> = Z^b X^a |phi*>,

and |v_ab> is the effective measured state from which snapshots are built.
Samples are kept as descriptors plus outcome bits; snapshot matrices are
only formed per query.
"""

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.ensembles import (
    LOCAL_STAB_STATES,
    SIX_STATES,
    STABILIZER_TABLE_LIMIT,
    Descriptor,
    EnsembleKind,
    EnsembleSpec,
    sample_state_with_descriptor,
    stabilizer_table,
    state_from_descriptor,
)
from ..core.pauli import PauliString
from ..core.statevector import (
    I2,
    X,
    Y,
    Z,
    DensityMatrix,
    StateVector,
    bits_to_index,
    index_to_bits,
)
from ..core.teleport import BellOutcome, bell_measure
from ..utils.logger import get_logger
from ..utils.validators import validate_hermitian

logger = get_logger(__name__)

GLOBAL_KINDS = (EnsembleKind.STABILIZER_STATES, EnsembleKind.HAAR_STATES)
LOCAL_DENSE_LIMIT = 12
COMPLETENESS_LIMIT = 6
LOCAL_COUNT_LIMIT = 8

StateLike = Union[DensityMatrix, np.ndarray, StateVector]


def _zx(a: int, b: int) -> np.ndarray:
    """Single-qubit Z^b X^a."""
    return (Z if b else I2) @ (X if a else I2)


# Effective single-qubit states Z^b X^a |phi_j*> of the local ensemble,
# indexed [j, a, b], with their Bloch vectors and six-state labels.
_LOCAL_EFFECTIVE = np.array(
    [[[_zx(a, b) @ LOCAL_STAB_STATES[j].conj() for b in (0, 1)] for a in (0, 1)] for j in range(3)]
)
_LOCAL_BLOCH = np.real(
    np.einsum("jabi,pik,jabk->jabp", _LOCAL_EFFECTIVE.conj(), np.array([X, Y, Z]), _LOCAL_EFFECTIVE)
)
_LOCAL_SIX_INDEX = np.argmax(
    np.abs(np.einsum("si,jabi->jabs", SIX_STATES.conj(), _LOCAL_EFFECTIVE)) ** 2, axis=-1
)
# tr[(3P - I)(3Q - I)] = 9 |<p|q>|^2 - 4 over the six states
_SIX_PAIR_TRACE = 9.0 * np.abs(SIX_STATES.conj() @ SIX_STATES.T) ** 2 - 4.0
_PAULI_AXIS = {(1, 0): 0, (1, 1): 1, (0, 1): 2}


def _density(rho: StateLike) -> np.ndarray:
    if isinstance(rho, StateVector):
        psi = rho.normalize().amplitudes
        return np.outer(psi, psi.conj())
    if isinstance(rho, DensityMatrix):
        return rho.entries
    return DensityMatrix(np.asarray(rho, dtype=complex)).entries


def _num_qubits(dim: int) -> int:
    return dim.bit_length() - 1


def _index_bits(n: int) -> np.ndarray:
    """(2^n, n) bit table with qubit 0 as the most significant bit."""
    idx = np.arange(1 << n)
    return ((idx[:, None] >> (n - 1 - np.arange(n))) & 1).astype(np.int64)


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------


@dataclass
class Observable:
    """
    Hermitian observable, either a dense matrix or a real-weighted Pauli sum.

    Pauli-sum terms are (coefficient, PauliString) with Hermitian letters
    and +1 sign; duplicates are merged on construction.
    """

    num_qubits: int
    matrix: Optional[np.ndarray] = None
    terms: Tuple[Tuple[float, PauliString], ...] = ()

    def __post_init__(self):
        if self.matrix is None and not self.terms:
            raise ValueError("Observable needs a matrix or Pauli terms")
        if self.matrix is not None and self.terms:
            raise ValueError("Observable takes either a matrix or Pauli terms, not both")
        if self.matrix is not None:
            self.matrix = np.asarray(self.matrix, dtype=complex)
            valid, error = validate_hermitian(self.matrix)
            if not valid:
                raise ValueError(error)
            if self.matrix.shape[0] != 1 << self.num_qubits:
                raise ValueError(
                    f"Matrix of shape {self.matrix.shape} is not a {self.num_qubits}-qubit operator"
                )

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Observable":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(_num_qubits(matrix.shape[0]), matrix=matrix)

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[float, str]]) -> "Observable":
        """Build from (coefficient, label) pairs, e.g. ``[(0.5, "ZZ"), (1.0, "XI")]``."""
        merged = {}
        num_qubits = None
        for coeff, label in terms:
            pauli = PauliString.from_label(label)
            if not pauli.is_hermitian:
                raise ValueError(f"Pauli term {label!r} is not Hermitian")
            if num_qubits is None:
                num_qubits = pauli.num_qubits
            elif pauli.num_qubits != num_qubits:
                raise ValueError(f"Term {label!r} has {pauli.num_qubits} qubits, expected {num_qubits}")
            sign = 1.0 if pauli.label.startswith("+") else -1.0
            key = (pauli.x_bits, pauli.z_bits)
            merged[key] = merged.get(key, 0.0) + sign * float(np.real(coeff))
        if num_qubits is None:
            raise ValueError("Pauli sum needs at least one term")
        built = []
        for (x, z), coeff in merged.items():
            if coeff != 0.0:
                base = PauliString(x, z, sum(a & b for a, b in zip(x, z)))
                built.append((coeff, base))
        if not built:
            return cls(num_qubits, matrix=np.zeros((1 << num_qubits,) * 2, dtype=complex))
        return cls(num_qubits, terms=tuple(built))

    @classmethod
    def pauli(cls, label: str, coeff: float = 1.0) -> "Observable":
        return cls.from_terms([(coeff, label)])

    @property
    def is_pauli_sum(self) -> bool:
        return bool(self.terms)

    @property
    def locality(self) -> int:
        """Largest term support; dense matrices count as fully nonlocal."""
        if self.is_pauli_sum:
            return max(p.weight for _, p in self.terms)
        return self.num_qubits

    @property
    def infinity_norm_bound(self) -> float:
        if self.is_pauli_sum:
            return float(sum(abs(c) for c, _ in self.terms))
        if self.matrix.size == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))

    def dense(self) -> np.ndarray:
        if not self.is_pauli_sum:
            return self.matrix
        out = np.zeros((1 << self.num_qubits,) * 2, dtype=complex)
        for coeff, pauli in self.terms:
            out += coeff * pauli.to_matrix()
        return out

    def trace(self) -> float:
        if self.is_pauli_sum:
            dim = 1 << self.num_qubits
            return float(sum(dim * c for c, p in self.terms if p.weight == 0))
        return float(np.real(np.trace(self.matrix)))

    def trace_squared(self) -> float:
        """tr(O^2)."""
        if self.is_pauli_sum:
            return float((1 << self.num_qubits) * sum(c * c for c, _ in self.terms))
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def expectation(self, rho: StateLike) -> float:
        return float(np.real(np.trace(self.dense() @ _density(rho))))


# ---------------------------------------------------------------------------
# Samples
# ---------------------------------------------------------------------------


@dataclass
class ShadowSample:
    """One Bell-measurement record: ancilla descriptor and outcome bits."""

    ensemble: EnsembleSpec
    descriptor: Descriptor
    outcome: BellOutcome

    def __post_init__(self):
        if len(self.outcome.a) != self.ensemble.num_qubits:
            raise ValueError(
                f"Outcome has {len(self.outcome.a)} bits, ensemble has {self.ensemble.num_qubits} qubits"
            )

    def ancilla(self) -> StateVector:
        return state_from_descriptor(self.ensemble, self.descriptor)


@dataclass
class ShadowDataset:
    """Columnar store of samples from one ensemble."""

    ensemble: EnsembleSpec
    descriptors: np.ndarray
    a_bits: np.ndarray
    b_bits: np.ndarray

    def __post_init__(self):
        n = self.ensemble.num_qubits
        self.descriptors = np.asarray(self.descriptors, dtype=np.int64).reshape(len(self.a_bits), -1)
        self.a_bits = np.asarray(self.a_bits, dtype=np.uint8).reshape(-1, n)
        self.b_bits = np.asarray(self.b_bits, dtype=np.uint8).reshape(-1, n)
        if not (len(self.descriptors) == len(self.a_bits) == len(self.b_bits)):
            raise ValueError("Descriptor and outcome columns differ in length")

    def __len__(self) -> int:
        return len(self.a_bits)

    def __getitem__(self, index: int) -> ShadowSample:
        return ShadowSample(
            self.ensemble,
            tuple(int(v) for v in self.descriptors[index]),
            BellOutcome(
                tuple(int(v) for v in self.a_bits[index]),
                tuple(int(v) for v in self.b_bits[index]),
            ),
        )

    def __iter__(self) -> Iterator[ShadowSample]:
        for i in range(len(self)):
            yield self[i]

    @property
    def num_qubits(self) -> int:
        return self.ensemble.num_qubits

    def subset(self, indices: Union[slice, np.ndarray]) -> "ShadowDataset":
        return ShadowDataset(
            self.ensemble, self.descriptors[indices], self.a_bits[indices], self.b_bits[indices]
        )

    @classmethod
    def from_samples(cls, samples: Sequence[ShadowSample]) -> "ShadowDataset":
        if not samples:
            raise ValueError("Cannot build a dataset from zero samples")
        ensemble = samples[0].ensemble
        if any(s.ensemble != ensemble for s in samples):
            raise ValueError("Samples come from different ensembles")
        return cls(
            ensemble,
            np.array([s.descriptor for s in samples]),
            np.array([s.outcome.a for s in samples]),
            np.array([s.outcome.b for s in samples]),
        )

    @classmethod
    def concat(cls, parts: Sequence["ShadowDataset"]) -> "ShadowDataset":
        if not parts:
            raise ValueError("Nothing to concatenate")
        ensemble = parts[0].ensemble
        if any(p.ensemble != ensemble for p in parts):
            raise ValueError("Datasets come from different ensembles")
        return cls(
            ensemble,
            np.concatenate([p.descriptors for p in parts]),
            np.concatenate([p.a_bits for p in parts]),
            np.concatenate([p.b_bits for p in parts]),
        )

    def to_records(self) -> List[dict]:
        """Sample-log records with hex-encoded outcome bits."""
        n = self.num_qubits
        width = max(1, (n + 3) // 4)
        kind = self.ensemble.to_dict()
        return [
            {
                "ensemble": kind,
                "descriptor": [int(v) for v in self.descriptors[i]],
                "a": f"{bits_to_index(self.a_bits[i]):0{width}x}",
                "b": f"{bits_to_index(self.b_bits[i]):0{width}x}",
            }
            for i in range(len(self))
        ]

    @classmethod
    def from_records(cls, records: Sequence[dict]) -> "ShadowDataset":
        if not records:
            raise ValueError("Sample log is empty")
        spec = records[0]["ensemble"]
        ensemble = EnsembleSpec(EnsembleKind(spec["kind"]), spec["num_qubits"], spec.get("depth", 0))
        n = ensemble.num_qubits
        return cls(
            ensemble,
            np.array([r["descriptor"] for r in records]),
            np.array([index_to_bits(int(r["a"], 16), n) for r in records]),
            np.array([index_to_bits(int(r["b"], 16), n) for r in records]),
        )


SampleSet = Union[ShadowDataset, Sequence[ShadowSample]]


def _as_dataset(samples: SampleSet) -> ShadowDataset:
    if isinstance(samples, ShadowDataset):
        return samples
    return ShadowDataset.from_samples(list(samples))


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def outcome_probabilities(rho: StateLike, ancilla: StateVector) -> np.ndarray:
    """
    Born probabilities p_ab for every outcome.

    Returns:
        (2^n, 2^n) array indexed [index(a), index(b)]
    """
    rho = _density(rho)
    n = _num_qubits(rho.shape[0])
    if ancilla.num_qubits != n:
        raise ValueError(f"Ancilla has {ancilla.num_qubits} qubits, state has {n}")
    effective = _effective_table(ancilla.amplitudes, n)
    dim = 1 << n
    probs = np.einsum("abi,ij,abj->ab", effective.conj(), rho, effective).real / dim
    return np.clip(probs, 0.0, None)


def _effective_table(phi: np.ndarray, n: int) -> np.ndarray:
    """Z^b X^a |phi*> for all (a, b), shape (2^n, 2^n, 2^n)."""
    dim = 1 << n
    idx = np.arange(dim)
    shifted = phi.conj()[idx[None, :] ^ idx[:, None]]
    bits = _index_bits(n)
    signs = 1.0 - 2.0 * ((bits @ bits.T) % 2)
    return shifted[:, None, :] * signs[None, :, :]


def sample_shadow(
    rho: StateLike,
    ensemble: EnsembleSpec,
    rng: np.random.Generator,
    mode: str = "dense",
) -> ShadowSample:
    """
    Draw one ancilla and one Bell outcome.

    ``mode="dense"`` samples from the closed-form outcome distribution;
    ``mode="simulated"`` purifies rho and runs the Bell measurement on
    |phi> (x) |psi_k> instead. Both give the same joint distribution.
    """
    rho = _density(rho)
    n = _num_qubits(rho.shape[0])
    if ensemble.register_qubits != n:
        raise ValueError(f"Ensemble on {ensemble.register_qubits} qubits, state on {n}")
    phi, descriptor = sample_state_with_descriptor(ensemble, rng)
    if mode == "dense":
        probs = outcome_probabilities(rho, phi).reshape(-1)
        index = int(rng.choice(probs.size, p=probs / probs.sum()))
        a, b = divmod(index, 1 << n)
        outcome = BellOutcome(index_to_bits(a, n), index_to_bits(b, n))
    elif mode == "simulated":
        outcome = _simulated_outcome(rho, phi, rng)
    else:
        raise ValueError(f"Unknown sampling mode: {mode}")
    return ShadowSample(ensemble, descriptor, outcome)


def _simulated_outcome(rho: np.ndarray, phi: StateVector, rng: np.random.Generator) -> BellOutcome:
    n = phi.num_qubits
    weights, vectors = np.linalg.eigh(rho)
    weights = np.clip(weights, 0.0, None)
    k = int(rng.choice(weights.size, p=weights / weights.sum()))
    joint = phi.kron(StateVector(vectors[:, k] / np.linalg.norm(vectors[:, k])))
    outcome, _, _ = bell_measure(joint, [(i, n + i) for i in range(n)], rng)
    return outcome


def _draw_descriptors(ensemble: EnsembleSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    n = ensemble.num_qubits
    if ensemble.kind == EnsembleKind.LOCAL_STAB:
        return rng.integers(0, 3, size=(count, n))
    if ensemble.kind == EnsembleKind.COMPUTATIONAL:
        return rng.integers(0, 2, size=(count, n))
    if ensemble.kind == EnsembleKind.STABILIZER_STATES and n <= STABILIZER_TABLE_LIMIT:
        return rng.integers(0, len(stabilizer_table(n)), size=(count, 1))
    return rng.integers(0, 2**63 - 1, size=(count, 1))


def sample_shadows(
    rho: StateLike,
    ensemble: EnsembleSpec,
    num_samples: int,
    rng: np.random.Generator,
    mode: str = "dense",
) -> ShadowDataset:
    """
    Draw ``num_samples`` shadow samples as a columnar dataset.

    In dense mode the outcome tables are computed once per distinct
    ancilla and outcomes are drawn by inverse-CDF lookup.
    """
    if num_samples < 0:
        raise ValueError(f"num_samples must be nonnegative, got {num_samples}")
    rho = _density(rho)
    n = _num_qubits(rho.shape[0])
    if ensemble.register_qubits != n:
        raise ValueError(f"Ensemble on {ensemble.register_qubits} qubits, state on {n}")

    descriptors = _draw_descriptors(ensemble, num_samples, rng)
    if mode == "simulated":
        outcomes = [
            _simulated_outcome(rho, state_from_descriptor(ensemble, tuple(int(v) for v in d)), rng)
            for d in descriptors
        ]
        a_bits = np.array([o.a for o in outcomes], dtype=np.uint8).reshape(-1, n)
        b_bits = np.array([o.b for o in outcomes], dtype=np.uint8).reshape(-1, n)
        return ShadowDataset(ensemble, descriptors, a_bits, b_bits)
    if mode != "dense":
        raise ValueError(f"Unknown sampling mode: {mode}")

    unique, inverse = np.unique(descriptors, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    cdfs = np.empty((len(unique), 1 << (2 * n)))
    for row, d in enumerate(unique):
        probs = outcome_probabilities(rho, state_from_descriptor(ensemble, tuple(int(v) for v in d)))
        cdf = np.cumsum(probs.reshape(-1))
        cdfs[row] = cdf / cdf[-1]
    u = rng.random(num_samples)
    indices = np.minimum((cdfs[inverse] < u[:, None]).sum(axis=1), cdfs.shape[1] - 1)
    bits = _index_bits(2 * n).astype(np.uint8)[indices]
    logger.debug("shadow samples drawn", n=n, count=num_samples, ensemble=ensemble.kind.value)
    return ShadowDataset(ensemble, descriptors, bits[:, :n], bits[:, n:])


# ---------------------------------------------------------------------------
# Snapshots
# ---------------------------------------------------------------------------


def _effective_states(data: ShadowDataset) -> np.ndarray:
    """Effective measured states Z^b X^a |phi*>, shape (N, 2^n)."""
    n = data.num_qubits
    dim = 1 << n
    if data.ensemble.kind == EnsembleKind.STABILIZER_STATES and n <= STABILIZER_TABLE_LIMIT:
        phis = stabilizer_table(n)[data.descriptors[:, 0]]
    else:
        phis = np.array([
            state_from_descriptor(data.ensemble, tuple(int(v) for v in d)).amplitudes
            for d in data.descriptors
        ]).reshape(-1, dim)
    weights = 1 << (n - 1 - np.arange(n))
    a_index = data.a_bits.astype(np.int64) @ weights
    idx = np.arange(dim)
    shifted = np.take_along_axis(phis.conj(), idx[None, :] ^ a_index[:, None], axis=1)
    parity = (data.b_bits.astype(np.int64) @ _index_bits(n).T) % 2
    return shifted * (1.0 - 2.0 * parity)


def _require_kind(ensemble: EnsembleSpec, kinds: Sequence[EnsembleKind], what: str) -> None:
    if ensemble.kind not in kinds:
        raise ValueError(f"{what} snapshots need one of {[k.value for k in kinds]}, got {ensemble.kind.value}")


def snapshot_global(sample: ShadowSample) -> np.ndarray:
    """(2^n + 1)|b><b| - I for the effective measured state |b>."""
    _require_kind(sample.ensemble, GLOBAL_KINDS, "Global")
    data = ShadowDataset.from_samples([sample])
    v = _effective_states(data)[0]
    dim = v.size
    return (dim + 1) * np.outer(v, v.conj()) - np.eye(dim)


@dataclass
class LocalSnapshot:
    """Tensor-product snapshot kept as its single-qubit factors 3|psi_i><psi_i| - I."""

    states: np.ndarray
    bloch: np.ndarray = field(repr=False)

    @property
    def num_qubits(self) -> int:
        return len(self.states)

    @property
    def factors(self) -> List[np.ndarray]:
        return [3.0 * np.outer(s, s.conj()) - I2 for s in self.states]

    def trace(self) -> float:
        return float(np.prod([np.real(np.trace(f)) for f in self.factors]))

    def expectation(self, pauli: PauliString) -> complex:
        """tr(P sigma) in O(weight) time."""
        value = pauli.phase * (-1j) ** pauli.num_y
        for q in pauli.support:
            value *= 3.0 * self.bloch[q, _PAULI_AXIS[(pauli.x_bits[q], pauli.z_bits[q])]]
        return value

    def dense(self) -> np.ndarray:
        if self.num_qubits > LOCAL_DENSE_LIMIT:
            raise ValueError(f"Refusing to densify a {self.num_qubits}-qubit snapshot")
        out = np.ones((1, 1), dtype=complex)
        for f in self.factors:
            out = np.kron(out, f)
        return out


def snapshot_local(sample: ShadowSample) -> LocalSnapshot:
    _require_kind(sample.ensemble, (EnsembleKind.LOCAL_STAB,), "Local")
    j = np.asarray(sample.descriptor)
    a = np.asarray(sample.outcome.a)
    b = np.asarray(sample.outcome.b)
    return LocalSnapshot(_LOCAL_EFFECTIVE[j, a, b], _LOCAL_BLOCH[j, a, b])


def _product_trace(matrix: np.ndarray, factors: Sequence[np.ndarray]) -> complex:
    """tr(M (A_0 (x) ... (x) A_{n-1})) without forming the product."""
    n = len(factors)
    tensor = matrix.reshape((2,) * (2 * n))
    for remaining, factor in zip(range(n, 0, -1), factors):
        tensor = np.tensordot(tensor, factor, axes=([0, remaining], [1, 0]))
    return complex(tensor)


def snapshot_values(samples: SampleSet, observable: Observable) -> np.ndarray:
    """tr(O sigma_i) for every sample."""
    data = _as_dataset(samples)
    n = data.num_qubits
    if observable.num_qubits != n:
        raise ValueError(f"Observable on {observable.num_qubits} qubits, samples on {n}")
    if len(data) == 0:
        return np.zeros(0)

    if data.ensemble.kind == EnsembleKind.LOCAL_STAB:
        j = data.descriptors
        bloch = _LOCAL_BLOCH[j, data.a_bits, data.b_bits]
        if observable.is_pauli_sum:
            values = np.zeros(len(data))
            for coeff, pauli in observable.terms:
                term = np.ones(len(data))
                for q in pauli.support:
                    term *= 3.0 * bloch[:, q, _PAULI_AXIS[(pauli.x_bits[q], pauli.z_bits[q])]]
                values += coeff * term
            return values
        states = _LOCAL_EFFECTIVE[j, data.a_bits, data.b_bits]
        factors = 3.0 * np.einsum("nqi,nqk->nqik", states, states.conj()) - I2
        return np.array([_product_trace(observable.matrix, f).real for f in factors])

    _require_kind(data.ensemble, GLOBAL_KINDS, "Global")
    v = _effective_states(data)
    dim = 1 << n
    matrix = observable.dense()
    inner = np.einsum("ni,ij,nj->n", v.conj(), matrix, v).real
    return (dim + 1) * inner - observable.trace()


def snapshot_mean(samples: SampleSet) -> np.ndarray:
    """Average snapshot matrix (dense, n <= 12)."""
    data = _as_dataset(samples)
    n = data.num_qubits
    dim = 1 << n
    if data.ensemble.kind == EnsembleKind.LOCAL_STAB:
        if n > LOCAL_DENSE_LIMIT:
            raise ValueError(f"Refusing to densify {n}-qubit snapshots")
        total = np.zeros((dim, dim), dtype=complex)
        for sample in data:
            total += snapshot_local(sample).dense()
        return total / max(len(data), 1)
    _require_kind(data.ensemble, GLOBAL_KINDS, "Global")
    v = _effective_states(data)
    return (dim + 1) * (v.T @ v.conj()) / max(len(data), 1) - np.eye(dim)


# ---------------------------------------------------------------------------
# Estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimationPlan:
    """Median-of-means parameters: K groups of B snapshots."""

    epsilon: float
    delta: float
    K: int
    B: int
    mode: str = "global"

    def __post_init__(self):
        if self.K < 1 or self.B < 1:
            raise ValueError(f"K and B must be positive, got K={self.K}, B={self.B}")

    @property
    def N(self) -> int:
        return self.K * self.B

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "K": self.K,
            "B": self.B,
            "N": self.N,
            "mode": self.mode,
        }


def plan_estimation(
    observables: Sequence[Observable], epsilon: float, delta: float, mode: str = "global"
) -> EstimationPlan:
    """
    Size a median-of-means estimate.

    B = ceil(30 * max tr(O_i^2) / eps^2) in global mode, with 4^k_i in place
    of tr(O_i^2) in local mode; K = ceil(2 ln(2M / delta)).
    """
    if not observables:
        raise ValueError("plan_estimation needs at least one observable")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if mode == "global":
        scale = max(o.trace_squared() for o in observables)
    elif mode == "local":
        for o in observables:
            if o.infinity_norm_bound > 1 + 1e-9:
                raise ValueError(f"Local mode needs ||O||_inf <= 1, got {o.infinity_norm_bound}")
        scale = max(4.0 ** o.locality for o in observables)
    else:
        raise ValueError(f"Unknown estimation mode: {mode}")
    batch = max(1, math.ceil(30.0 * scale / epsilon**2 - 1e-9))
    groups = max(1, math.ceil(2.0 * math.log(2.0 * len(observables) / delta) - 1e-9))
    return EstimationPlan(epsilon, delta, groups, batch, mode)


def median_of_means(values: np.ndarray, groups: int) -> float:
    """Median over ``groups`` equal-size group means; a trailing remainder is dropped."""
    values = np.asarray(values, dtype=float)
    size = len(values) // groups
    if size < 1:
        raise ValueError(f"{len(values)} values cannot fill {groups} groups")
    means = values[: groups * size].reshape(groups, size).mean(axis=1)
    return float(np.median(means))


def estimate_observables(
    samples: SampleSet, observables: Sequence[Observable], plan: EstimationPlan
) -> List[float]:
    data = _as_dataset(samples)
    if len(data) < plan.N:
        raise ValueError(f"Plan needs {plan.N} samples, got {len(data)}")
    return [median_of_means(snapshot_values(data, o), plan.K) for o in observables]


def _pair_trace_dense(labels: np.ndarray) -> float:
    n = labels.shape[1]
    flat = np.ravel_multi_index(tuple(labels.T), (6,) * n)
    counts = np.bincount(flat, minlength=6**n).astype(float).reshape((6,) * n)
    contracted = counts
    for axis in range(n):
        contracted = np.moveaxis(np.tensordot(_SIX_PAIR_TRACE, contracted, axes=([1], [axis])), 0, axis)
    return float(np.sum(counts * contracted))


def _pair_trace_unique(labels: np.ndarray, block: int = 1024) -> float:
    """Pair-trace sum over the distinct label rows only, in row blocks."""
    rows, counts = np.unique(labels, axis=0, return_counts=True)
    counts = counts.astype(float)
    total = 0.0
    for start in range(0, len(rows), block):
        chunk = rows[start:start + block]
        weights = np.ones((len(chunk), len(rows)))
        for k in range(rows.shape[1]):
            weights *= _SIX_PAIR_TRACE[chunk[:, k][:, None], rows[:, k][None, :]]
        total += float(counts[start:start + block] @ weights @ counts)
    return total


def _local_purity_sum(data: ShadowDataset) -> float:
    """Sum over i != j of tr(sigma_i sigma_j) from six-state occupation counts."""
    n = data.num_qubits
    labels = _LOCAL_SIX_INDEX[data.descriptors, data.a_bits, data.b_bits]
    if n <= LOCAL_COUNT_LIMIT and 6**n <= max(len(data), 6**4):
        total = _pair_trace_dense(labels)
    else:
        total = _pair_trace_unique(labels)
    return total - len(data) * 5.0**n


def _snapshot_matrices(data: ShadowDataset) -> List[np.ndarray]:
    if data.ensemble.kind == EnsembleKind.LOCAL_STAB:
        return [snapshot_local(s).dense() for s in data]
    v = _effective_states(data)
    dim = v.shape[1]
    return [(dim + 1) * np.outer(row, row.conj()) - np.eye(dim) for row in v]


def estimate_polynomial(
    samples: SampleSet,
    degree: int = 2,
    target: Union[str, np.ndarray] = "purity",
    max_tuples: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """
    U-statistic estimate of tr(O rho^{(x)k}).

    ``target="purity"`` (k = 2) uses tr(SWAP sigma_i (x) sigma_j) =
    tr(sigma_i sigma_j) and never forms a two-copy operator. A matrix
    target on k copies averages over ordered distinct index tuples,
    optionally subsampled to ``max_tuples`` tuples.
    """
    data = _as_dataset(samples)
    count = len(data)
    if count < degree:
        raise ValueError(f"U-statistic of degree {degree} needs at least {degree} samples, got {count}")

    if isinstance(target, str):
        if target != "purity":
            raise ValueError(f"Unknown polynomial target: {target}")
        if degree != 2:
            raise ValueError(f"Purity is a degree-2 target, got degree {degree}")
        if data.ensemble.kind == EnsembleKind.LOCAL_STAB:
            return _local_purity_sum(data) / (count * (count - 1))
        _require_kind(data.ensemble, GLOBAL_KINDS, "Global")
        v = _effective_states(data)
        dim = v.shape[1]
        total = (dim + 1) * (v.T @ v.conj()) - count * np.eye(dim)
        square = float(np.real(np.vdot(total, total)))
        return (square - count * (dim * dim + dim - 1)) / (count * (count - 1))

    target = np.asarray(target, dtype=complex)
    n = data.num_qubits
    if target.shape != (1 << (n * degree),) * 2:
        raise ValueError(f"Target of shape {target.shape} does not act on {degree} copies of {n} qubits")
    snapshots = _snapshot_matrices(data)
    total_tuples = math.perm(count, degree)
    if max_tuples is not None and total_tuples > max_tuples:
        rng = rng if rng is not None else np.random.default_rng()
        tuples: Iterable[Tuple[int, ...]] = (
            tuple(int(i) for i in rng.choice(count, size=degree, replace=False))
            for _ in range(max_tuples)
        )
    else:
        tuples = permutations(range(count), degree)
    values = []
    for combo in tuples:
        product = np.ones((1, 1), dtype=complex)
        for i in combo:
            product = np.kron(product, snapshots[i])
        values.append(np.real(np.vdot(target.conj().T, product)))
    return float(np.mean(values))


def shadow_norm_bound(observable: Observable) -> float:
    """Upper bound 3 tr(O^2) on the single-snapshot variance."""
    return 3.0 * observable.trace_squared()


def snapshot_variance(samples: SampleSet, observable: Observable) -> float:
    """Empirical variance of tr(O sigma) over the samples."""
    values = snapshot_values(samples, observable)
    if len(values) < 2:
        raise ValueError("Variance needs at least two samples")
    return float(np.var(values, ddof=1))


# ---------------------------------------------------------------------------
# Ensemble diagnostics
# ---------------------------------------------------------------------------


def depolarize(rho: np.ndarray, p: float) -> np.ndarray:
    """p * rho + (1 - p) tr(rho) I / 2^n."""
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    return p * rho + (1.0 - p) * np.trace(rho) * np.eye(dim) / dim


def average_measured_state(
    rho: StateLike,
    states: Sequence[StateVector],
    weights: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """
    E over ancillas and outcomes of |v_ab><v_ab|, by exhaustive enumeration.

    For an exact 3-design this equals depolarize(rho, 1 / (2^n + 1)).
    """
    if not states:
        raise ValueError("Ensemble is empty")
    rho = _density(rho)
    n = _num_qubits(rho.shape[0])
    weights = np.full(len(states), 1.0 / len(states)) if weights is None else np.asarray(weights, float)
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for w, phi in zip(weights, states):
        effective = _effective_table(phi.amplitudes, n)
        probs = outcome_probabilities(rho, phi)
        out += w * np.einsum("ab,abi,abj->ij", probs, effective, effective.conj())
    return out


def check_tomographic_completeness(
    states: Sequence[StateVector], num_qubits: int
) -> Tuple[bool, int]:
    """
    Real rank of span{P|phi><phi|P^dag} + {I} inside the Hermitian matrices.

    Returns:
        (rank == 4^n, rank)
    """
    if not states:
        raise ValueError("Ensemble is empty")
    if num_qubits > COMPLETENESS_LIMIT:
        raise ValueError(f"Completeness check is limited to {COMPLETENESS_LIMIT} qubits, got {num_qubits}")
    dim = 1 << num_qubits
    rows = [np.eye(dim, dtype=complex).reshape(-1)]
    for phi in states:
        if phi.num_qubits != num_qubits:
            raise ValueError(f"Ensemble state has {phi.num_qubits} qubits, expected {num_qubits}")
        orbit = _effective_table(phi.amplitudes.conj(), num_qubits).reshape(dim * dim, dim)
        rows.extend(np.einsum("ri,rj->rij", orbit, orbit.conj()).reshape(dim * dim, -1))
    flat = np.array(rows)
    real = np.hstack([flat.real, flat.imag])
    rank = int(np.linalg.matrix_rank(real, tol=1e-9 * max(1.0, np.abs(real).max())))
    return rank == dim * dim, rank
