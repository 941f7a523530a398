"""Unit tests for design diagnostics, the circuit map and bound formulas."""

import math

import numpy as np
import pytest

from spacetime_qc.analysis.designlab import (
    GPoint,
    accessible_dimension,
    accessible_dimension_lower_bound,
    accessible_dimension_report,
    analytic_jacobian,
    complexity_bound,
    coordinates_to_gate,
    evaluate_G,
    finite_difference_jacobian,
    frame_potential,
    frame_potential_estimate,
    haar_frame_potential,
    moment_distance,
    numeric_rank,
    projected_ensemble,
    swap_ladder_layers,
)
from spacetime_qc.core.ensembles import SIX_STATES, choi_from_unitary, sample_haar_unitary
from spacetime_qc.core.statevector import StateVector, fidelity, random_state


@pytest.mark.unit
class TestFramePotential:
    """Tests for frame potentials and moments."""

    def test_haar_values(self):
        """Test 1 / C(D + t - 1, t)."""
        assert haar_frame_potential(2, 1) == pytest.approx(0.5)
        assert haar_frame_potential(2, 2) == pytest.approx(1 / 3)
        assert haar_frame_potential(4, 2) == pytest.approx(0.1)
        assert haar_frame_potential(4, 3) == pytest.approx(1 / math.comb(6, 3))

    @pytest.mark.parametrize("t", [1, 2, 3])
    def test_six_states_form_a_three_design(self, t):
        """Test the six-state frame potential equals Haar up to t = 3."""
        assert frame_potential(SIX_STATES, t) == pytest.approx(haar_frame_potential(2, t), abs=1e-12)

    def test_six_states_are_not_a_four_design(self):
        """Test the fourth frame potential exceeds Haar."""
        assert frame_potential(SIX_STATES, 4) > haar_frame_potential(2, 4) + 1e-6

    def test_moment_distance(self):
        """Test moment distances of basis and stabilizer sets."""
        basis = [StateVector.from_bits((0,)), StateVector.from_bits((1,))]
        assert moment_distance(basis, 1) == pytest.approx(0.0, abs=1e-12)
        assert moment_distance(basis, 2) > 0.1
        six = [StateVector(s) for s in SIX_STATES]
        assert moment_distance(six, 3) == pytest.approx(0.0, abs=1e-10)

    def test_pair_estimate(self, rng):
        """Test the disjoint-pair estimator needs four states and tracks Haar."""
        with pytest.raises(ValueError, match="at least 4"):
            frame_potential_estimate([random_state(1, rng)] * 3, 1)
        states = [random_state(2, rng) for _ in range(4000)]
        mean, stderr = frame_potential_estimate(states, 1)
        assert abs(mean - haar_frame_potential(4, 1)) < 4 * stderr

    def test_invalid_t(self):
        """Test t must be positive."""
        with pytest.raises(ValueError):
            frame_potential(SIX_STATES, 0)


@pytest.mark.unit
class TestProjectedEnsemble:
    """Tests for projected ensembles."""

    def test_choi_state_projects_to_basis_images(self, rng):
        """Test measuring A of |I, U> leaves U|j> with probability 1/D."""
        u = sample_haar_unitary(4, rng)
        ens = projected_ensemble(choi_from_unitary(u), 2)
        assert len(ens) == 4
        assert np.allclose(ens.probabilities, 0.25)
        for j, state in enumerate(ens.states):
            assert fidelity(state, StateVector(u[:, j])) == pytest.approx(1.0)

    def test_zero_branches_dropped(self):
        """Test branches below the probability floor are removed."""
        ens = projected_ensemble(StateVector.zeros(3), 1)
        assert len(ens) == 1
        assert ens.probabilities[0] == pytest.approx(1.0)

    def test_kept_range(self, rng):
        """Test 1 <= n < m."""
        with pytest.raises(ValueError, match="Need 1 <= n < m"):
            projected_ensemble(random_state(2, rng), 2)

    def test_frame_potential_of_product_state(self):
        """Test a single-branch ensemble has frame potential 1."""
        ens = projected_ensemble(StateVector.zeros(2), 1)
        assert ens.frame_potential(2) == pytest.approx(1.0)


@pytest.mark.unit
class TestCircuitMap:
    """Tests for G and its Jacobian."""

    def test_zero_coordinates_give_identity(self):
        """Test exp(0) is the identity gate."""
        assert np.allclose(coordinates_to_gate(np.zeros(15)), np.eye(4))
        with pytest.raises(ValueError):
            coordinates_to_gate(np.zeros(14))

    def test_gate_is_unitary(self, rng):
        """Test coordinates map into SU(4)."""
        gate = coordinates_to_gate(rng.standard_normal(15))
        assert np.allclose(gate.conj().T @ gate, np.eye(4))
        assert np.linalg.det(gate) == pytest.approx(1.0)

    def test_identity_point(self):
        """Test G at the identity returns |0^n>."""
        assert np.allclose(evaluate_G(GPoint.zeros(2, 2, 1)), [1, 0, 0, 0])

    def test_jacobian_shape(self, rng):
        """Test 2^(n+1) rows and 15 columns per placed gate."""
        assert analytic_jacobian(GPoint.random(2, 2, 1, rng)).shape == (8, 15)
        assert analytic_jacobian(GPoint.random(4, 2, 2, rng)).shape == (8, 45)

    def test_analytic_matches_finite_differences(self, rng):
        """Test the analytic Jacobian against central differences."""
        point = GPoint.random(4, 2, 2, rng)
        analytic = analytic_jacobian(point)
        numeric = finite_difference_jacobian(point)
        rel = np.linalg.norm(analytic - numeric) / np.linalg.norm(analytic)
        assert rel < 1e-6
        assert numeric_rank(analytic)[0] == numeric_rank(numeric)[0]

    def test_threaded_columns_match_serial(self, rng):
        """Test the Jacobian is identical for any worker count."""
        point = GPoint.random(5, 2, 3, rng)
        serial = analytic_jacobian(point)
        assert np.array_equal(analytic_jacobian(point, workers=4), serial)
        assert analytic_jacobian(GPoint.zeros(3, 1, 0), workers=4).shape == (4, 0)

    def test_point_validation(self):
        """Test parameter shape and (m, n) checks."""
        with pytest.raises(ValueError, match="coordinate vectors"):
            GPoint(2, 2, 1, np.zeros((2, 15)))
        with pytest.raises(ValueError, match="Need 1 <= n <= m"):
            GPoint.zeros(2, 3, 1)


@pytest.mark.unit
class TestAccessibleDimension:
    """Tests for numeric ranks."""

    def test_two_qubit_sphere(self, rng):
        """Test one SU(4) gate reaches the whole 7-sphere."""
        assert accessible_dimension(2, 2, 1, rng, 3) == 7
        assert accessible_dimension(2, 2, 3, rng, 2) == 7

    def test_depth_zero(self, rng):
        """Test an empty circuit has rank 0."""
        assert accessible_dimension(2, 2, 0, rng, 1) == 0

    def test_report(self, rng):
        """Test the report summary."""
        report = accessible_dimension_report(3, 1, 2, rng, 3)
        assert len(report.points) == 3
        assert report.max_rank <= 4
        assert report.to_dict()["ranks"] == report.ranks

    def test_needs_points(self, rng):
        """Test num_points must be positive."""
        with pytest.raises(ValueError, match="num_points"):
            accessible_dimension_report(2, 2, 1, rng, 0)


@pytest.mark.unit
class TestBounds:
    """Tests for the closed-form bounds."""

    @pytest.mark.parametrize(
        "m, n, d, bound, L, in_domain",
        [
            (4, 4, 160, 0.8, 13.75, True),
            (4, 4, 0, -8 / 15, -6.25, True),
            (8, 4, 64, 0.0, 4.5, True),
            (4, 4, 400, 2.0, 43.75, True),
            (6, 5, 500, 3.2, 51.56, True),
            (4, 2, 8, -4 / 15, -4.0, False),
        ],
    )
    def test_complexity_bound(self, m, n, d, bound, L, in_domain):
        """Test hand-computed bound values."""
        result = complexity_bound(m, n, d)
        assert result.thm1_bound == pytest.approx(bound)
        assert result.L == pytest.approx(L)
        assert result.in_domain is in_domain

    def test_lower_bound_is_capped(self):
        """Test min(L, 2^(n+1) - 1)."""
        assert accessible_dimension_lower_bound(4, 4, 160) == pytest.approx(13.75)
        assert accessible_dimension_lower_bound(4, 4, 400) == pytest.approx(31.0)

    def test_swap_ladder(self):
        """Test 2(n^2 + n)."""
        assert swap_ladder_layers(4) == 40
        assert swap_ladder_layers(1) == 4

    def test_invalid_arguments(self):
        """Test negative depth is rejected."""
        with pytest.raises(ValueError):
            complexity_bound(4, 4, -1)
