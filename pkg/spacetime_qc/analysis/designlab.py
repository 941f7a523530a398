"""Design diagnostics, the post-selected circuit map and its accessible dimension."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import expm

from ..core.ensembles import layer_pairs
from ..core.statevector import I2, X, Y, Z, StateVector, trace_norm
from ..utils.logger import get_logger

logger = get_logger(__name__)

MOMENT_DIM_LIMIT = 4096
PROBABILITY_FLOOR = 1e-15
RANK_RTOL = 1e-8

# The 15 non-identity two-qubit Pauli generators, II excluded.
TWO_QUBIT_PAULIS = np.array(
    [np.kron(p, q) for p, q in product([I2, X, Y, Z], repeat=2)][1:]
)


@dataclass
class ProjectedEnsemble:
    """Outcome-weighted post-measurement states on the kept subsystem."""

    entries: List[Tuple[float, StateVector]]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("Projected ensemble is empty")
        probs = self.probabilities
        if np.any(probs < 0):
            raise ValueError("Projected ensemble has negative probabilities")
        if abs(probs.sum() - 1.0) > 1e-10:
            raise ValueError(f"Projected probabilities sum to {probs.sum():.12f}")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.entries])

    @property
    def states(self) -> List[StateVector]:
        return [s for _, s in self.entries]

    def frame_potential(self, t: int) -> float:
        """sum_ij p_i p_j |<psi_i|psi_j>|^(2t)."""
        if t < 1:
            raise ValueError(f"t must be positive, got {t}")
        v = np.array([s.amplitudes for s in self.states])
        p = self.probabilities
        overlaps = np.abs(v.conj() @ v.T) ** (2 * t)
        return float(p @ overlaps @ p)


def projected_ensemble(state: StateVector, num_kept: int) -> ProjectedEnsemble:
    """
    Measure the first m - n qubits in the computational basis.

    Branches with probability below 1e-15 are dropped and the rest
    renormalized.
    """
    m = state.num_qubits
    if not 1 <= num_kept < m:
        raise ValueError(f"Need 1 <= n < m, got n={num_kept}, m={m}")
    rows = state.normalize().amplitudes.reshape(1 << (m - num_kept), 1 << num_kept)
    probs = np.real(np.einsum("ij,ij->i", rows.conj(), rows))
    keep = np.flatnonzero(probs > PROBABILITY_FLOOR)
    total = probs[keep].sum()
    entries = [
        (float(probs[j] / total), StateVector(rows[j] / np.sqrt(probs[j])))
        for j in keep
    ]
    return ProjectedEnsemble(entries)


def haar_frame_potential(dim: int, t: int) -> float:
    """t!(D-1)!/(D+t-1)!, the Haar value of the t-th frame potential."""
    return 1.0 / math.comb(dim + t - 1, t)


def _state_matrix(states: Sequence[Union[StateVector, np.ndarray]]) -> np.ndarray:
    if len(states) == 0:
        raise ValueError("Frame potential needs at least one state")
    rows = [s.amplitudes if isinstance(s, StateVector) else np.asarray(s, dtype=complex) for s in states]
    sizes = {r.size for r in rows}
    if len(sizes) != 1:
        raise ValueError(f"States have different sizes: {sorted(sizes)}")
    return np.array(rows)


def frame_potential(
    states: Sequence[Union[StateVector, np.ndarray]], t: int, chunk: int = 2048
) -> float:
    """(1/N^2) sum_ij |<psi_i|psi_j>|^(2t), accumulated over row chunks."""
    if t < 1:
        raise ValueError(f"t must be positive, got {t}")
    v = _state_matrix(states)
    total = 0.0
    for start in range(0, len(v), chunk):
        block = v[start:start + chunk].conj() @ v.T
        total += float(np.sum(np.abs(block) ** (2 * t)))
    return total / len(v) ** 2


def frame_potential_estimate(
    states: Sequence[Union[StateVector, np.ndarray]], t: int
) -> Tuple[float, float]:
    """
    Unbiased estimate from disjoint pairs (0,1), (2,3), ...

    Returns:
        (mean, standard error)
    """
    v = _state_matrix(states)
    if len(v) < 4:
        raise ValueError(f"Pair estimate needs at least 4 states, got {len(v)}")
    half = len(v) // 2
    overlaps = np.abs(np.einsum("ij,ij->i", v[0:2 * half:2].conj(), v[1:2 * half:2])) ** (2 * t)
    return float(overlaps.mean()), float(overlaps.std(ddof=1) / np.sqrt(half))


def _tensor_power(v: np.ndarray, t: int) -> np.ndarray:
    out = v
    for _ in range(t - 1):
        out = np.einsum("ni,nj->nij", out, v).reshape(len(v), -1)
    return out


def moment_operator(
    states: Sequence[Union[StateVector, np.ndarray]],
    t: int,
    weights: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """sum_i p_i (|psi_i><psi_i|)^(x)t."""
    v = _state_matrix(states)
    dim = v.shape[1] ** t
    if dim > MOMENT_DIM_LIMIT:
        raise ValueError(f"Moment operator of dimension {dim} exceeds {MOMENT_DIM_LIMIT}")
    p = np.full(len(v), 1.0 / len(v)) if weights is None else np.asarray(weights, dtype=float)
    powered = _tensor_power(v, t)
    return (powered.T * p) @ powered.conj()


def haar_moment_operator(dim: int, t: int) -> np.ndarray:
    """Projector onto the symmetric subspace of (C^D)^(x)t over its dimension."""
    size = dim**t
    if size > MOMENT_DIM_LIMIT:
        raise ValueError(f"Moment operator of dimension {size} exceeds {MOMENT_DIM_LIMIT}")
    eye = np.eye(size).reshape((dim,) * t + (size,))
    projector = np.zeros((size, size))
    for perm in permutations(range(t)):
        projector += np.transpose(eye, list(perm) + [t]).reshape(size, size)
    projector /= math.factorial(t)
    return projector / math.comb(dim + t - 1, t)


def moment_distance(
    ensemble: Union[ProjectedEnsemble, Sequence[StateVector]],
    t: int,
    weights: Optional[Sequence[float]] = None,
) -> float:
    """Trace-norm distance between the ensemble and Haar t-th moments."""
    if t < 1:
        raise ValueError(f"t must be positive, got {t}")
    if isinstance(ensemble, ProjectedEnsemble):
        states, weights = ensemble.states, ensemble.probabilities
    else:
        states = ensemble
    m_ens = moment_operator(states, t, weights)
    dim = _state_matrix(states).shape[1]
    diff = m_ens - haar_moment_operator(dim, t)
    return trace_norm((diff + diff.conj().T) / 2)


# ---------------------------------------------------------------------------
# The post-selected brickwork map
# ---------------------------------------------------------------------------


def brickwork_positions(m: int, d: int) -> List[Tuple[int, int]]:
    """Gate pairs of an (m, d) brickwork circuit in placement order."""
    return [pair for i in range(d) for pair in layer_pairs(m, i % 2)]


def coordinates_to_gate(theta: np.ndarray) -> np.ndarray:
    """exp(-i sum_k theta_k P_k) over the 15 two-qubit Pauli generators."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (15,):
        raise ValueError(f"Gate coordinates must have length 15, got shape {theta.shape}")
    return expm(-1j * np.tensordot(theta, TWO_QUBIT_PAULIS, axes=1))


@dataclass
class GPoint:
    """
    Parameters of an (m, n, d) brickwork circuit.

    One 15-vector per gate of the declared volume floor(m/2) * d. Gates
    are consumed in placement order; for even m the boundary layers hold
    fewer gates and the surplus coordinates are unused.
    """

    m: int
    n: int
    d: int
    params: np.ndarray
    _output: Optional[np.ndarray] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.n <= self.m:
            raise ValueError(f"Need 1 <= n <= m, got n={self.n}, m={self.m}")
        if self.d < 0:
            raise ValueError(f"d must be nonnegative, got {self.d}")
        self.params = np.asarray(self.params, dtype=float).reshape(-1, 15) if np.size(self.params) else np.zeros((0, 15))
        if self.params.shape[0] != self.volume:
            raise ValueError(f"Expected {self.volume} coordinate vectors, got {self.params.shape[0]}")

    @property
    def volume(self) -> int:
        return (self.m // 2) * self.d

    @property
    def positions(self) -> List[Tuple[int, int]]:
        return brickwork_positions(self.m, self.d)

    @classmethod
    def zeros(cls, m: int, n: int, d: int) -> "GPoint":
        return cls(m, n, d, np.zeros(((m // 2) * d, 15)))

    @classmethod
    def random(cls, m: int, n: int, d: int, rng: np.random.Generator, scale: float = 1.0) -> "GPoint":
        return cls(m, n, d, scale * rng.standard_normal(((m // 2) * d, 15)))

    def gates(self) -> List[np.ndarray]:
        return [coordinates_to_gate(theta) for theta in self.params[: len(self.positions)]]

    def output(self) -> np.ndarray:
        if self._output is None:
            self._output = _evaluate(self.m, self.n, self.positions, self.gates())
        return self._output


def _apply_batch(batch: np.ndarray, gate: np.ndarray, pair: Tuple[int, int]) -> np.ndarray:
    """Apply a 4x4 gate to every state of a (B, 2, ..., 2) batch."""
    j, k = pair
    op = gate.reshape(2, 2, 2, 2)
    out = np.tensordot(op, batch, axes=([2, 3], [1 + j, 1 + k]))
    return np.moveaxis(out, [0, 1], [1 + j, 1 + k])


def _postselect(batch: np.ndarray, m: int, n: int) -> np.ndarray:
    flat = batch.reshape(len(batch), 1 << (m - n), 1 << n)
    return flat[:, 0, :]


def _evaluate(
    m: int, n: int, positions: Sequence[Tuple[int, int]], gates: Sequence[np.ndarray]
) -> np.ndarray:
    batch = np.zeros((1,) + (2,) * m, dtype=complex)
    batch[(0,) * (m + 1)] = 1.0
    for pair, gate in zip(positions, gates):
        batch = _apply_batch(batch, gate, pair)
    return _postselect(batch, m, n)[0]


def evaluate_G(point: GPoint) -> np.ndarray:
    """(<0^(m-n)| (x) I) U |0^m>, an unnormalized vector of length 2^n."""
    return point.output()


def _gate_columns(
    point: GPoint,
    positions: Sequence[Tuple[int, int]],
    gates: Sequence[np.ndarray],
    prefix: np.ndarray,
    g: int,
) -> np.ndarray:
    """The 15 tangent columns of gate g, given the state just before it."""
    batch = np.repeat(prefix, 15, axis=0)
    for k in range(15):
        batch[k] = _apply_batch(batch[k:k + 1], -1j * TWO_QUBIT_PAULIS[k], positions[g])[0]
    for later_pair, later_gate in zip(positions[g:], gates[g:]):
        batch = _apply_batch(batch, later_gate, later_pair)
    return _postselect(batch, point.m, point.n)


def analytic_jacobian(point: GPoint, workers: int = 1) -> np.ndarray:
    """
    Real Jacobian of G, shape (2^(n+1), 15 * gates).

    Column (g, k) is the derivative along U_g -> U_g exp(-i h P_k) at h = 0,
    with real parts stacked above imaginary parts. With ``workers > 1`` the
    per-gate column blocks are computed on a thread pool; the result does
    not depend on the worker count.
    """
    m, n = point.m, point.n
    positions, gates = point.positions, point.gates()
    if not gates:
        return np.zeros((2 << n, 0))
    prefixes = []
    prefix = np.zeros((1,) + (2,) * m, dtype=complex)
    prefix[(0,) * (m + 1)] = 1.0
    for pair, gate in zip(positions, gates):
        prefixes.append(prefix)
        prefix = _apply_batch(prefix, gate, pair)

    def block(g: int) -> np.ndarray:
        return _gate_columns(point, positions, gates, prefixes[g], g)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            columns = list(executor.map(block, range(len(gates))))
    else:
        columns = [block(g) for g in range(len(gates))]
    tangent = np.concatenate(columns, axis=0).T
    return np.vstack([tangent.real, tangent.imag])


def finite_difference_jacobian(point: GPoint, h: float = 1e-5) -> np.ndarray:
    """Central differences in the same chart as ``analytic_jacobian``."""
    m, n = point.m, point.n
    positions, gates = point.positions, point.gates()
    columns = []
    for g in range(len(gates)):
        for k in range(15):
            step = np.cos(h) * np.eye(4) - 1j * np.sin(h) * TWO_QUBIT_PAULIS[k]
            plus, minus = list(gates), list(gates)
            plus[g] = gates[g] @ step
            minus[g] = gates[g] @ step.conj().T
            diff = (_evaluate(m, n, positions, plus) - _evaluate(m, n, positions, minus)) / (2 * h)
            columns.append(diff)
    if not columns:
        return np.zeros((2 << n, 0))
    tangent = np.array(columns).T
    return np.vstack([tangent.real, tangent.imag])


def numeric_rank(jacobian: np.ndarray, rtol: float = RANK_RTOL) -> Tuple[int, np.ndarray]:
    """
    Count singular values above rtol * sigma_max.

    Returns:
        (rank, singular values)
    """
    if jacobian.size == 0:
        return 0, np.zeros(0)
    sigma = np.linalg.svd(jacobian, compute_uv=False)
    if sigma[0] == 0.0:
        return 0, sigma
    return int(np.sum(sigma > rtol * sigma[0])), sigma


@dataclass
class RankPoint:
    """Rank of one sampled parameter point."""

    index: int
    rank: int
    sigma_max: float
    sigma_min_kept: float
    stable: bool
    resamples: int

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "rank": self.rank,
            "sigma_max": self.sigma_max,
            "sigma_min_kept": self.sigma_min_kept,
            "stable": self.stable,
            "resamples": self.resamples,
        }


@dataclass
class AccessibleDimensionReport:
    m: int
    n: int
    d: int
    points: List[RankPoint] = field(default_factory=list)

    @property
    def ranks(self) -> List[int]:
        return [p.rank for p in self.points]

    @property
    def max_rank(self) -> int:
        return max(self.ranks, default=0)

    @property
    def unstable_points(self) -> List[int]:
        return [p.index for p in self.points if not p.stable]

    @property
    def stable_fraction(self) -> float:
        if not self.points:
            return 1.0
        return sum(p.stable for p in self.points) / len(self.points)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "d": self.d,
            "max_rank": self.max_rank,
            "ranks": self.ranks,
            "unstable_points": self.unstable_points,
            "points": [p.to_dict() for p in self.points],
        }


def accessible_dimension_report(
    m: int,
    n: int,
    d: int,
    rng: np.random.Generator,
    num_points: int,
    max_retries: int = 10,
    workers: int = 1,
) -> AccessibleDimensionReport:
    """
    Numeric Jacobian ranks of G at random parameter points.

    Points whose output vanishes are resampled up to ``max_retries`` times.
    A rank is stable when thresholds 1e-7 and 1e-9 (relative) agree with it.
    """
    if num_points < 1:
        raise ValueError(f"num_points must be positive, got {num_points}")
    report = AccessibleDimensionReport(m, n, d)
    for index in range(num_points):
        for attempt in range(max_retries + 1):
            point = GPoint.random(m, n, d, rng)
            if np.linalg.norm(evaluate_G(point)) > 1e-12:
                break
            logger.warning("degenerate point resampled", m=m, n=n, d=d, index=index, attempt=attempt)
        else:
            raise RuntimeError(f"No non-degenerate point after {max_retries} retries at (m={m}, n={n}, d={d})")

        jacobian = analytic_jacobian(point, workers)
        rank, sigma = numeric_rank(jacobian)
        stable = all(numeric_rank(jacobian, RANK_RTOL * f)[0] == rank for f in (10.0, 0.1))
        if not stable:
            logger.warning("unstable rank", m=m, n=n, d=d, index=index, rank=rank)
        report.points.append(
            RankPoint(
                index=index,
                rank=rank,
                sigma_max=float(sigma[0]) if sigma.size else 0.0,
                sigma_min_kept=float(sigma[rank - 1]) if rank else 0.0,
                stable=stable,
                resamples=attempt,
            )
        )
    logger.info("accessible dimension estimated", m=m, n=n, d=d, max_rank=report.max_rank)
    return report


def accessible_dimension(
    m: int, n: int, d: int, rng: np.random.Generator, num_points: int
) -> int:
    """Largest numeric Jacobian rank over ``num_points`` random points."""
    return accessible_dimension_report(m, n, d, rng, num_points).max_rank


# ---------------------------------------------------------------------------
# Bound formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComplexityBound:
    m: int
    n: int
    d: int
    thm1_bound: float
    L: float
    in_domain: bool

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "d": self.d,
            "thm1_bound": self.thm1_bound,
            "L": self.L,
            "in_domain": self.in_domain,
        }


def _lower_bound_L(m: int, n: int, d: int) -> Fraction:
    return Fraction(m * d, 2 * n * n) - m * (1 + Fraction(1, n) + Fraction(1, n * n)) - 1


def complexity_bound(m: int, n: int, d: int) -> ComplexityBound:
    """
    Embedded-complexity lower bound and the accessible-dimension quantity L.

    bound = min(md/(2n^2) - 2m, 2^(n+1) - 2) / 15, stated for m >= n >= 4;
    outside that domain the raw value is returned with ``in_domain=False``.
    """
    if n < 1 or m < 1 or d < 0:
        raise ValueError(f"Need m, n >= 1 and d >= 0, got m={m}, n={n}, d={d}")
    volume_term = Fraction(m * d, 2 * n * n) - 2 * m
    bound = min(volume_term, Fraction(2 ** (n + 1) - 2)) / 15
    return ComplexityBound(m, n, d, float(bound), float(_lower_bound_L(m, n, d)), m >= n >= 4)


def swap_ladder_layers(n: int) -> int:
    """Depth 2(n^2 + n) of the swap ladder that routes n qubits."""
    return 2 * (n * n + n)


def accessible_dimension_lower_bound(m: int, n: int, d: int) -> float:
    """min(L, 2^(n+1) - 1)."""
    return float(min(_lower_bound_L(m, n, d), Fraction(2 ** (n + 1) - 1)))
