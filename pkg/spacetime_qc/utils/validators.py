"""Numeric validators for gates, states and qubit arguments."""

from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np


def validate_unitary(matrix: np.ndarray, tol: float = 1e-10) -> Tuple[bool, Optional[str]]:
    """
    Validate that a square matrix is unitary in max norm.

    Returns:
        Tuple of (is_valid, error_message)
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False, f"Gate must be a square matrix, got shape {matrix.shape}"
    deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])))
    if deviation < tol:
        return True, None
    return False, f"Gate is not unitary: max |U^dag U - I| = {deviation:.3e}"


def validate_hermitian(matrix: np.ndarray, tol: float = 1e-10) -> Tuple[bool, Optional[str]]:
    """
    Validate that a square matrix is Hermitian in max norm.

    Returns:
        Tuple of (is_valid, error_message)
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False, f"Matrix must be square, got shape {matrix.shape}"
    deviation = np.max(np.abs(matrix - matrix.conj().T)) if matrix.size else 0.0
    if deviation <= tol:
        return True, None
    return False, f"Matrix is not Hermitian: max |A - A^dag| = {deviation:.3e}"


def validate_density_matrix(matrix: np.ndarray, tol: float = 1e-10) -> Tuple[bool, Optional[str]]:
    """
    Validate Hermiticity, unit trace and positivity of a density matrix.

    Returns:
        Tuple of (is_valid, error_message)
    """
    valid, error = validate_hermitian(matrix, tol)
    if not valid:
        return valid, error
    matrix = np.asarray(matrix)
    size = matrix.shape[0]
    if size == 0 or size & (size - 1):
        return False, f"Density matrix dimension must be a power of two, got {size}"
    trace = np.trace(matrix)
    if abs(trace - 1.0) > tol:
        return False, f"Density matrix trace is {trace.real:.12f}, expected 1"
    min_eig = float(np.min(np.linalg.eigvalsh(matrix)))
    if min_eig < -1e-9:
        return False, f"Density matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}"
    return True, None


def validate_qubit_indices(
    qubits: Sequence[int], num_qubits: int
) -> Tuple[bool, Optional[str]]:
    """
    Validate that qubit indices are distinct and in range.

    Returns:
        Tuple of (is_valid, error_message)
    """
    qubits = list(qubits)
    for q in qubits:
        if not isinstance(q, (int, np.integer)) or q < 0 or q >= num_qubits:
            return False, f"Qubit index {q} out of range for {num_qubits} qubits"
    if len(set(qubits)) != len(qubits):
        return False, f"Qubit indices must be distinct: {qubits}"
    return True, None


def validate_bits(bits: Sequence[int], length: int) -> Tuple[bool, Optional[str]]:
    """
    Validate a bitstring given as a sequence of 0/1 values.

    Returns:
        Tuple of (is_valid, error_message)
    """
    bits = list(bits)
    if len(bits) != length:
        return False, f"Bitstring length {len(bits)} does not match {length} qubits"
    if any(b not in (0, 1) for b in bits):
        return False, f"Bitstring entries must be 0 or 1: {bits}"
    return True, None


VALIDATORS: Dict[str, Callable[..., Tuple[bool, Optional[str]]]] = {
    "unitary": validate_unitary,
    "hermitian": validate_hermitian,
    "density_matrix": validate_density_matrix,
    "qubits": validate_qubit_indices,
    "bits": validate_bits,
}


def validate_field(kind: str, value: Any, *args: Any) -> Tuple[bool, Optional[str]]:
    """
    Validate a value against a named check.

    Args:
        kind: Validator name from VALIDATORS
        value: Value to validate
        *args: Extra positional arguments of the validator

    Returns:
        Tuple of (is_valid, error_message)
    """
    if kind not in VALIDATORS:
        raise ValueError(f"Unknown validator: {kind}")
    return VALIDATORS[kind](value, *args)


def require(kind: str, value: Any, *args: Any) -> None:
    """Run a named validator and raise ValueError with its message on failure."""
    valid, error = validate_field(kind, value, *args)
    if not valid:
        raise ValueError(error)
