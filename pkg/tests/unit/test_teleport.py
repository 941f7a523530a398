"""Unit tests for Bell measurements, gate teleportation and spacetime conversion."""

import numpy as np
import pytest

from spacetime_qc.core.ensembles import build_brickwork, choi_from_unitary, sample_haar_unitary
from spacetime_qc.core.statevector import StateVector, apply_matrix, apply_xz, fidelity, random_state, xz_matrix
from spacetime_qc.core.teleport import (
    BellOutcome,
    bell_measure,
    depth_budget,
    merge_choi,
    merged_program,
    spacetime_convert_apply,
    spacetime_convert_state,
    teleport_gate,
)


def pauli_layer(a, b):
    out = np.ones((1, 1))
    for ai, bi in zip(a, b):
        out = np.kron(out, xz_matrix(ai, bi))
    return out


@pytest.mark.unit
class TestBellOutcome:
    """Tests for outcome bookkeeping."""

    def test_index_orders_a_then_b(self):
        """Test the outcome index reads a_0..a_{n-1} b_0..b_{n-1}."""
        assert BellOutcome((1, 0), (0, 1)).index == 9

    def test_length_mismatch(self):
        """Test a and b must have equal length."""
        with pytest.raises(ValueError):
            BellOutcome((1,), (0, 1))

    def test_overlapping_pairs(self, rng):
        """Test overlapping pairs are rejected."""
        with pytest.raises(ValueError, match="overlap"):
            bell_measure(StateVector.zeros(3), [(0, 1), (1, 2)], rng)


@pytest.mark.unit
class TestTeleportGate:
    """Tests for teleporting through a Choi state."""

    @pytest.mark.parametrize("n", [1, 2])
    def test_post_state(self, n, rng):
        """Test the post state is (U X^a Z^b (x) I)|psi>."""
        for _ in range(5):
            u = sample_haar_unitary(1 << n, rng)
            psi = random_state(n + 1, rng)
            post, trace = teleport_gate(choi_from_unitary(u), psi, rng)
            a, b = trace.outcome.a, trace.outcome.b
            expected = apply_matrix(apply_xz(psi, a, b, range(n)), u, range(n))
            assert fidelity(post, expected) == pytest.approx(1.0, abs=1e-10)

    def test_outcomes_are_uniform(self, rng):
        """Test every outcome has probability 4^-n."""
        u = sample_haar_unitary(4, rng)
        _, trace = teleport_gate(choi_from_unitary(u), random_state(2, rng), rng)
        assert trace.postselect_prob == pytest.approx(1 / 16)

    def test_odd_register_rejected(self, rng):
        """Test Choi states must have an even qubit count."""
        with pytest.raises(ValueError, match="even qubit count"):
            teleport_gate(StateVector.zeros(3), StateVector.zeros(1), rng)


@pytest.mark.unit
class TestMerge:
    """Tests for Bell-merging two Choi states."""

    def test_merge_choi(self, rng):
        """Test the merge yields |I, V Z^b X^a U^T>."""
        u = sample_haar_unitary(4, rng)
        v = sample_haar_unitary(4, rng)
        merged, trace = merge_choi(choi_from_unitary(u), choi_from_unitary(v), rng)
        p = pauli_layer(trace.outcome.a, trace.outcome.b)
        expected = choi_from_unitary(v @ p @ u.T)
        assert fidelity(merged, expected) == pytest.approx(1.0, abs=1e-10)

    def test_merged_program(self, rng):
        """Test the recorded program matches the merged Choi state."""
        left = build_brickwork(2, 2, rng)
        right = build_brickwork(2, 3, rng)
        merged, trace = merge_choi(
            choi_from_unitary(left.unitary()), choi_from_unitary(right.unitary()), rng
        )
        program = merged_program(left, right, trace.outcome)
        assert fidelity(merged, choi_from_unitary(program.unitary())) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.unit
class TestSpacetime:
    """Tests for the depth-for-width conversion."""

    def test_depth_budget(self):
        """Test floor(t/k) + 4."""
        assert depth_budget(12, 2) == 10
        assert depth_budget(12, 3) == 8
        assert depth_budget(6, 2) == 7
        assert depth_budget(7, 3) == 6
        with pytest.raises(ValueError):
            depth_budget(6, 1)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_convert_state(self, k, rng):
        """Test the prepared state matches its recorded circuit."""
        state, trace, effective_t = spacetime_convert_state(2, k, 4, rng)
        expected = trace.circuit.apply(StateVector.zeros(2))
        assert fidelity(state, expected) == pytest.approx(1.0, abs=1e-10)
        assert trace.qubits_used == 2 * k
        assert trace.depth_used == depth_budget(4, k)
        assert effective_t >= 4
        trace.circuit.check_structure()

    def test_convert_apply(self, rng):
        """Test odd k applies the recorded circuit to an input."""
        psi = random_state(2, rng)
        post, trace = spacetime_convert_apply(psi, 3, 6, rng)
        assert fidelity(post, trace.circuit.apply(psi)) == pytest.approx(1.0, abs=1e-10)
        assert trace.effective_t >= 6

    def test_convert_apply_needs_odd_k(self, rng):
        """Test even k is rejected for arbitrary inputs."""
        with pytest.raises(ValueError, match="odd k"):
            spacetime_convert_apply(random_state(2, rng), 2, 4, rng)

    def test_single_qubit_rejected(self, rng):
        """Test n = 1 is outside the domain."""
        with pytest.raises(ValueError, match="at least 2"):
            spacetime_convert_state(1, 2, 4, rng)

    def test_trace_serializes(self, rng):
        """Test the trace exports plain values."""
        _, trace, _ = spacetime_convert_state(2, 2, 2, rng)
        data = trace.to_dict()
        assert data["qubits_used"] == 4
        assert len(data["merges"]) == 0
        assert len(data["readout"]) == 2
