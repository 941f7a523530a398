"""Phased binary symplectic Pauli strings.

A PauliString stands for i^k * prod_j X_j^{x_j} Z_j^{z_j}, with the X
factor to the left of the Z factor on every qubit. Y is therefore
i * X * Z (x = z = 1, k = 1).
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .statevector import I2, StateVector, X, Z, apply_gate

PHASES = (1, 1j, -1, -1j)
_LABEL_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


@dataclass(frozen=True)
class PauliString:
    """n-qubit Pauli operator with exact phase."""

    x_bits: Tuple[int, ...]
    z_bits: Tuple[int, ...]
    phase_exp: int = 0

    def __post_init__(self):
        x = tuple(int(v) & 1 for v in self.x_bits)
        z = tuple(int(v) & 1 for v in self.z_bits)
        if len(x) != len(z):
            raise ValueError(f"x and z bit lengths differ: {len(x)} vs {len(z)}")
        object.__setattr__(self, "x_bits", x)
        object.__setattr__(self, "z_bits", z)
        object.__setattr__(self, "phase_exp", int(self.phase_exp) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls((0,) * n, (0,) * n)

    @classmethod
    def from_xz(cls, a: Sequence[int], b: Sequence[int]) -> "PauliString":
        """X^a Z^b with phase +1."""
        return cls(tuple(a), tuple(b))

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """
        Parse labels like ``"XZ"``, ``"-iYI"`` or ``"+Z"``.

        The label names Hermitian letters, so ``"Y"`` is the usual Y matrix.
        """
        sign = 0
        for prefix, exp in (("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2)):
            if label.startswith(prefix):
                sign = exp
                label = label[len(prefix):]
                break
        try:
            bits = [_LABEL_BITS[c] for c in label.upper()]
        except KeyError as e:
            raise ValueError(f"Invalid Pauli label character: {e.args[0]}") from None
        x = tuple(b[0] for b in bits)
        z = tuple(b[1] for b in bits)
        num_y = sum(1 for c in label.upper() if c == "Y")
        return cls(x, z, sign + num_y)

    @property
    def num_qubits(self) -> int:
        return len(self.x_bits)

    @property
    def phase(self) -> complex:
        return PHASES[self.phase_exp]

    @property
    def num_y(self) -> int:
        return sum(a & b for a, b in zip(self.x_bits, self.z_bits))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(q for q, (a, b) in enumerate(zip(self.x_bits, self.z_bits)) if a or b)

    @property
    def weight(self) -> int:
        return len(self.support)

    @property
    def is_hermitian(self) -> bool:
        return (self.phase_exp - self.num_y) % 2 == 0

    @property
    def label(self) -> str:
        """Hermitian-letter label with its sign, e.g. ``-XY``."""
        letters = "".join(
            "IZXY"[2 * a + b] for a, b in zip(self.x_bits, self.z_bits)
        )
        sign = ("+", "+i", "-", "-i")[(self.phase_exp - self.num_y) % 4]
        return sign + letters

    def __mul__(self, other: "PauliString") -> "PauliString":
        """Operator product self @ other."""
        if other.num_qubits != self.num_qubits:
            raise ValueError(
                f"Pauli size mismatch: {self.num_qubits} vs {other.num_qubits}"
            )
        # Z^{z1} X^{x2} = (-1)^{z1.x2} X^{x2} Z^{z1}
        swaps = sum(a & b for a, b in zip(self.z_bits, other.x_bits))
        return PauliString(
            tuple(a ^ b for a, b in zip(self.x_bits, other.x_bits)),
            tuple(a ^ b for a, b in zip(self.z_bits, other.z_bits)),
            self.phase_exp + other.phase_exp + 2 * swaps,
        )

    def dagger(self) -> "PauliString":
        # (X^x Z^z)^dag = Z^z X^x = (-1)^{x.z} X^x Z^z
        return PauliString(self.x_bits, self.z_bits, -self.phase_exp + 2 * self.num_y)

    def commutes(self, other: "PauliString") -> bool:
        form = sum(a & d for a, d in zip(self.x_bits, other.z_bits))
        form += sum(b & c for b, c in zip(self.z_bits, other.x_bits))
        return form % 2 == 0

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix (intended for n <= 10)."""
        if self.num_qubits > 10:
            raise ValueError(f"Refusing to densify a {self.num_qubits}-qubit Pauli")
        out = np.ones((1, 1), dtype=complex)
        for a, b in zip(self.x_bits, self.z_bits):
            local = (X if a else I2) @ (Z if b else I2)
            out = np.kron(out, local)
        return self.phase * out

    def apply(self, state: StateVector, qubits: Sequence[int] = None) -> StateVector:
        """Apply the operator (phase included) to ``qubits`` of ``state``."""
        qubits = list(range(self.num_qubits)) if qubits is None else list(qubits)
        if len(qubits) != self.num_qubits:
            raise ValueError(f"{self.num_qubits}-qubit Pauli given {len(qubits)} targets")
        out = state
        for q, a, b in zip(qubits, self.x_bits, self.z_bits):
            if a or b:
                out = apply_gate(out, (X if a else I2) @ (Z if b else I2), [q])
        if self.phase_exp:
            out = StateVector(out.amplitudes * self.phase, normalized=out.normalized)
        return out
