"""Unit tests for numeric validators."""

import numpy as np
import pytest

from spacetime_qc.utils.validators import (
    require,
    validate_bits,
    validate_density_matrix,
    validate_field,
    validate_hermitian,
    validate_qubit_indices,
    validate_unitary,
)


@pytest.mark.unit
class TestValidateUnitary:
    """Tests for unitarity validation."""

    def test_valid_unitaries(self):
        """Test standard gates pass."""
        valid = [
            np.eye(2),
            np.array([[0, 1], [1, 0]]),
            np.array([[1, 1], [1, -1]]) / np.sqrt(2),
            np.diag([1, 1j, -1, -1j]),
        ]
        for matrix in valid:
            is_valid, error = validate_unitary(matrix)
            assert is_valid, f"Should be valid: {matrix}"
            assert error is None

    def test_invalid_unitaries(self):
        """Test non-unitary and non-square matrices fail."""
        invalid = [
            np.array([[1, 1], [0, 1]]),
            np.ones((2, 3)),
            2 * np.eye(2),
        ]
        for matrix in invalid:
            is_valid, error = validate_unitary(matrix)
            assert not is_valid, f"Should be invalid: {matrix}"
            assert error is not None

    def test_tolerance(self):
        """Test the tolerance is honored."""
        nearly = np.eye(2) * (1 + 1e-9)
        assert not validate_unitary(nearly, 1e-10)[0]
        assert validate_unitary(nearly, 1e-6)[0]


@pytest.mark.unit
class TestValidateHermitian:
    """Tests for Hermiticity validation."""

    def test_hermitian(self):
        """Test Pauli Y is Hermitian."""
        assert validate_hermitian(np.array([[0, -1j], [1j, 0]]))[0]

    def test_not_hermitian(self):
        """Test an upper-triangular matrix fails."""
        is_valid, error = validate_hermitian(np.array([[0, 1], [0, 0]]))
        assert not is_valid
        assert "Hermitian" in error


@pytest.mark.unit
class TestValidateDensityMatrix:
    """Tests for density matrix validation."""

    def test_valid(self):
        """Test pure and mixed states pass."""
        assert validate_density_matrix(np.diag([1.0, 0.0]))[0]
        assert validate_density_matrix(np.eye(4) / 4)[0]

    def test_wrong_trace(self):
        """Test the trace must be 1."""
        is_valid, error = validate_density_matrix(np.eye(2))
        assert not is_valid
        assert "trace" in error

    def test_negative_eigenvalue(self):
        """Test positivity."""
        is_valid, error = validate_density_matrix(np.diag([1.5, -0.5]))
        assert not is_valid
        assert "positive semidefinite" in error

    def test_bad_dimension(self):
        """Test the dimension must be a power of two."""
        is_valid, error = validate_density_matrix(np.eye(3) / 3)
        assert not is_valid
        assert "power of two" in error


@pytest.mark.unit
class TestValidateQubits:
    """Tests for qubit index validation."""

    def test_valid(self):
        """Test distinct in-range indices."""
        assert validate_qubit_indices([0, 2, 1], 3)[0]

    def test_out_of_range(self):
        """Test indices beyond the register."""
        is_valid, error = validate_qubit_indices([0, 3], 3)
        assert not is_valid
        assert "out of range" in error

    def test_duplicates(self):
        """Test repeated indices."""
        is_valid, error = validate_qubit_indices([1, 1], 3)
        assert not is_valid
        assert "distinct" in error


@pytest.mark.unit
class TestValidateBits:
    """Tests for bitstring validation."""

    def test_valid(self):
        """Test a proper bitstring."""
        assert validate_bits((0, 1, 1), 3)[0]

    def test_wrong_length(self):
        """Test length mismatch."""
        assert not validate_bits((0, 1), 3)[0]

    def test_non_binary(self):
        """Test entries other than 0 and 1."""
        is_valid, error = validate_bits((0, 2), 2)
        assert not is_valid
        assert "0 or 1" in error


@pytest.mark.unit
class TestValidateField:
    """Tests for the validator registry."""

    def test_dispatch(self):
        """Test dispatch by name."""
        assert validate_field("qubits", [0, 1], 2)[0]
        assert not validate_field("bits", (3,), 1)[0]

    def test_unknown_validator(self):
        """Test unknown names raise."""
        with pytest.raises(ValueError, match="Unknown validator"):
            validate_field("email", "a@b.cd")

    def test_require_raises_with_message(self):
        """Test require turns failures into ValueError."""
        with pytest.raises(ValueError, match="out of range"):
            require("qubits", [5], 2)
        require("qubits", [1], 2)
