"""Design diagnostics: projected ensembles, frame potentials, depolarizing identity."""

from typing import Tuple

import numpy as np

from ..analysis.designlab import (
    frame_potential,
    haar_frame_potential,
    moment_distance,
    projected_ensemble,
)
from ..analysis.shadow import average_measured_state, check_tomographic_completeness, depolarize
from ..core.ensembles import (
    LOCAL_STAB_STATES,
    SIX_STATES,
    build_brickwork,
    choi_from_unitary,
    sample_haar_unitary,
    stabilizer_table,
)
from ..core.statevector import StateVector, fidelity, random_density_matrix, random_state
from ..harness.batch import REFERENCE_STREAM, stream_rng
from ..harness.schemas import ExperimentKind
from .base import BaseExperimentHandler, ExperimentOutcome, register_handler

EXACT_TOL = 1e-10
# Largest n for the exhaustive stabilizer-state depolarizing check.
DEPOLARIZING_LIMIT = 2
FRAME_TABLE_LIMIT = 3
MOMENT_LIMIT = 512


@register_handler(ExperimentKind.DESIGN_CHECK)
class DesignCheckHandler(BaseExperimentHandler):
    """Exact identities on small ensembles plus a deep-thermalization report."""

    @property
    def kind(self) -> ExperimentKind:
        return ExperimentKind.DESIGN_CHECK

    def _projected_trial(self, index: int, rng: np.random.Generator) -> Tuple[float, float, int]:
        n = self.config.n
        dim = 1 << n
        unitary = sample_haar_unitary(dim, rng)
        ensemble = projected_ensemble(choi_from_unitary(unitary), n)
        worst_fidelity, worst_prob = 0.0, 0.0
        for j, (prob, state) in enumerate(ensemble.entries):
            worst_fidelity = max(worst_fidelity, abs(1 - fidelity(state, StateVector(unitary[:, j]))))
            worst_prob = max(worst_prob, abs(prob - 1 / dim))
        return worst_fidelity, worst_prob, len(ensemble)

    def _depolarizing_trial(self, index: int, rng: np.random.Generator) -> float:
        n = min(self.config.n, DEPOLARIZING_LIMIT)
        rho = random_density_matrix(n, rng).entries
        states = SIX_STATES if n == 1 else stabilizer_table(n)
        averaged = average_measured_state(rho, [StateVector(s) for s in states])
        return float(np.max(np.abs(averaged - depolarize(rho, 1.0 / ((1 << n) + 1)))))

    def _check_projected(self, outcome: ExperimentOutcome) -> None:
        cfg = self.config
        results = self.map_trials(cfg.trials, self._projected_trial)
        fid_dev = max(r[0] for r in results)
        prob_dev = max(r[1] for r in results)
        branches = sorted({r[2] for r in results})
        outcome.outputs["projected_fidelity_deviation"] = fid_dev
        outcome.outputs["projected_probability_deviation"] = prob_dev
        outcome.check(fid_dev <= EXACT_TOL, f"projected branch fidelity deviates by {fid_dev:.3g}")
        outcome.check(prob_dev <= EXACT_TOL, f"projected branch probability deviates by {prob_dev:.3g}")
        outcome.check(branches == [1 << cfg.n], f"projected ensemble sizes {branches}")

    def _check_depolarizing(self, outcome: ExperimentOutcome) -> None:
        cfg = self.config
        deviations = self.pool.run(self.kind, cfg.seed, cfg.trials, self._depolarizing_trial, stream=REFERENCE_STREAM)
        worst = max(deviations)
        outcome.outputs["depolarizing_qubits"] = min(cfg.n, DEPOLARIZING_LIMIT)
        outcome.outputs["depolarizing_deviation"] = worst
        outcome.check(worst <= EXACT_TOL, f"depolarizing identity deviates by {worst:.3g}")

    def _check_frame_potentials(self, outcome: ExperimentOutcome) -> None:
        cfg = self.config
        n = min(cfg.n, FRAME_TABLE_LIMIT)
        dim = 1 << n
        table = stabilizer_table(n)
        rows = []
        for t in range(1, cfg.moment + 1):
            value = frame_potential(table, t)
            haar = haar_frame_potential(dim, t)
            row = {"t": t, "stabilizer": value, "haar": haar}
            if dim**t <= MOMENT_LIMIT:
                row["moment_distance"] = moment_distance(list(table), t)
            rows.append(row)
            if t <= 3:
                outcome.check(abs(value - haar) <= EXACT_TOL, f"stabilizer frame potential t={t} is {value}, Haar {haar}")
        outcome.outputs["stabilizer_qubits"] = n
        outcome.outputs["frame_potentials"] = rows

    def _check_completeness(self, outcome: ExperimentOutcome) -> None:
        rng = stream_rng(self.config.seed, self.kind, REFERENCE_STREAM, self.config.trials)
        cases = {
            "computational_zero": ([StateVector(SIX_STATES[0])], 1, False),
            "local_triple": ([StateVector(s) for s in LOCAL_STAB_STATES], 1, True),
            "generic_quad": ([random_state(2, rng) for _ in range(4)], 2, True),
        }
        report = {}
        for name, (states, n, expected) in cases.items():
            complete, rank = check_tomographic_completeness(states, n)
            report[name] = {"complete": complete, "rank": rank}
            outcome.check(complete == expected, f"{name} completeness {complete} (rank {rank})")
        outcome.outputs["completeness"] = report

    def _thermalization(self, outcome: ExperimentOutcome) -> None:
        cfg = self.config
        m = cfg.m if cfg.m is not None else 2 * cfg.n + 2
        if m <= cfg.n or m < 2:
            return
        rng = stream_rng(cfg.seed, self.kind, REFERENCE_STREAM, cfg.trials + 1)
        state = build_brickwork(m, cfg.d, rng).apply(StateVector.zeros(m))
        ensemble = projected_ensemble(state, cfg.n)
        outcome.outputs["thermalization"] = {
            "m": m,
            "d": cfg.d,
            "ratios": [
                ensemble.frame_potential(t) / haar_frame_potential(1 << cfg.n, t)
                for t in range(1, cfg.moment + 1)
            ],
        }

    def run(self) -> ExperimentOutcome:
        outcome = ExperimentOutcome()
        self._check_projected(outcome)
        self._check_depolarizing(outcome)
        self._check_frame_potentials(outcome)
        self._check_completeness(outcome)
        self._thermalization(outcome)
        self.logger.info("design checks finished", n=self.config.n, failures=len(outcome.failures))
        return outcome
