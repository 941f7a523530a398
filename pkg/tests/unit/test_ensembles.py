"""Unit tests for circuit and state ensembles."""

import numpy as np
import pytest

from spacetime_qc.core.ensembles import (
    SIX_STATES,
    BrickworkCircuit,
    EnsembleKind,
    EnsembleSpec,
    build_brickwork,
    choi_from_unitary,
    prepare_epr,
    sample_choi,
    sample_haar_unitary,
    sample_state,
    sample_state_with_descriptor,
    stabilizer_table,
    state_from_descriptor,
)
from spacetime_qc.core.statevector import StateVector, xz_matrix


def pauli_layer(a, b):
    out = np.ones((1, 1))
    for ai, bi in zip(a, b):
        out = np.kron(out, xz_matrix(ai, bi))
    return out


@pytest.mark.unit
class TestHaar:
    """Tests for Haar sampling."""

    def test_unitary(self, rng):
        """Test sampled matrices are unitary."""
        u = sample_haar_unitary(4, rng)
        assert np.allclose(u.conj().T @ u, np.eye(4))

    def test_first_moment(self, rng):
        """Test E|U_00|^2 = 1/D over many draws."""
        values = [abs(sample_haar_unitary(2, rng)[0, 0]) ** 2 for _ in range(4000)]
        assert np.mean(values) == pytest.approx(0.5, abs=0.03)


@pytest.mark.unit
class TestBrickwork:
    """Tests for brickwork circuits."""

    def test_structure(self, rng):
        """Test layer pairs and gate counts."""
        circuit = build_brickwork(4, 3, rng)
        circuit.check_structure()
        assert [len(layer) for layer in circuit.layers] == [2, 1, 2]
        assert circuit.gate_count == 5
        assert circuit.declared_volume() == 6

    def test_too_few_qubits(self, rng):
        """Test one-qubit brickwork is rejected."""
        with pytest.raises(ValueError, match="at least 2 qubits"):
            build_brickwork(1, 2, rng)

    def test_transpose(self, rng):
        """Test the transposed program realizes U^T."""
        circuit = build_brickwork(3, 4, rng)
        assert np.allclose(circuit.transpose().unitary(), circuit.unitary().T)

    def test_compose_absorbs_pauli(self, rng):
        """Test composition folds X^a Z^b between the circuits."""
        first = build_brickwork(3, 2, rng)
        second = build_brickwork(3, 3, rng)
        a, b = (1, 0, 1), (0, 1, 1)
        composed = first.compose(second, a, b)
        expected = second.unitary() @ pauli_layer(a, b) @ first.unitary()
        assert np.allclose(composed.unitary(), expected)

    def test_compose_merges_equal_parity(self, rng):
        """Test layers of equal parity merge into one."""
        first = build_brickwork(4, 1, rng)
        second = build_brickwork(4, 1, rng)
        assert first.compose(second).depth == 1
        shifted = build_brickwork(4, 1, rng, first_parity=1)
        assert first.compose(shifted).depth == 2

    def test_text_round_trip(self, rng):
        """Test the text record rebuilds the same unitary."""
        circuit = build_brickwork(3, 3, rng).compose(build_brickwork(3, 1, rng), (1, 1, 0), (0, 0, 1))
        rebuilt = BrickworkCircuit.from_text(circuit.to_text())
        assert rebuilt.depth == circuit.depth
        assert np.allclose(rebuilt.unitary(), circuit.unitary())

    def test_text_rejects_bad_header(self):
        """Test a record without the header line is rejected."""
        with pytest.raises(ValueError, match="header"):
            BrickworkCircuit.from_text("layer 0\n")


@pytest.mark.unit
class TestChoi:
    """Tests for EPR and Choi states."""

    def test_epr(self):
        """Test one EPR pair."""
        assert np.allclose(prepare_epr(1).amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_choi_amplitudes(self, rng):
        """Test |I, U> reshapes to U^T / sqrt(D)."""
        u = sample_haar_unitary(4, rng)
        choi = choi_from_unitary(u)
        assert np.allclose(choi.amplitudes.reshape(4, 4), u.T / 2)

    def test_sample_choi_matches_circuit(self, rng):
        """Test sampled Choi states encode their circuit."""
        choi, circuit = sample_choi(2, 3, rng)
        assert np.allclose(choi.amplitudes, choi_from_unitary(circuit.unitary()).amplitudes)

    def test_sample_choi_needs_two_qubits(self, rng):
        """Test n = 1 is rejected."""
        with pytest.raises(ValueError, match="n >= 2"):
            sample_choi(1, 2, rng)


@pytest.mark.unit
class TestStateEnsembles:
    """Tests for descriptor-based ensembles."""

    @pytest.mark.parametrize(
        "spec",
        [
            EnsembleSpec.local_stab(3),
            EnsembleSpec.stabilizer_states(2),
            EnsembleSpec.haar_states(2),
            EnsembleSpec.computational(3),
            EnsembleSpec.brickwork_states(3, 2),
        ],
    )
    def test_descriptor_rebuilds_state(self, spec, rng):
        """Test descriptors reproduce their states."""
        state, descriptor = sample_state_with_descriptor(spec, rng)
        rebuilt = state_from_descriptor(spec, descriptor)
        assert np.allclose(rebuilt.amplitudes, state.amplitudes)

    def test_register_qubits(self):
        """Test Choi ensembles live on 2n qubits."""
        assert EnsembleSpec.brickwork_choi(2, 3).register_qubits == 4
        assert EnsembleSpec.haar_states(3).register_qubits == 3

    def test_invalid_spec(self):
        """Test invalid ensembles are rejected."""
        with pytest.raises(ValueError):
            EnsembleSpec(EnsembleKind.HAAR_STATES, 0)
        with pytest.raises(ValueError):
            EnsembleSpec("no-such-kind", 1)

    def test_stabilizer_table_sizes(self):
        """Test the enumerated stabilizer sets."""
        assert len(stabilizer_table(1)) == 6
        assert len(stabilizer_table(2)) == 60

    def test_six_states_are_stabilizer_states(self):
        """Test the one-qubit table spans the six-state ensemble."""
        table = stabilizer_table(1)
        for s in SIX_STATES:
            assert max(abs(np.vdot(row, s)) ** 2 for row in table) == pytest.approx(1.0)

    def test_sample_state_normalized(self, rng):
        """Test sampled members are unit vectors."""
        state = sample_state(EnsembleSpec.brickwork_choi(2, 2), rng)
        assert isinstance(state, StateVector)
        assert state.norm() == pytest.approx(1.0)
