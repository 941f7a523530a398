"""Gate-teleportation check against a dense oracle."""

from typing import Optional, Tuple

import numpy as np
from scipy.stats import chisquare

from ..core.ensembles import choi_from_unitary, sample_haar_unitary
from ..core.statevector import apply_matrix, apply_xz, fidelity, random_state
from ..core.teleport import teleport_gate
from ..harness.schemas import ExperimentKind
from .base import BaseExperimentHandler, ExperimentOutcome, register_handler

# Smallest expected count per cell for the uniformity test.
MIN_EXPECTED_COUNT = 5
UNIFORMITY_LEVEL = 1e-3


def outcome_uniformity(tallies: np.ndarray, cells: int) -> Optional[float]:
    """Chi-square p-value of outcome indices against the uniform law (None if too few)."""
    if len(tallies) < MIN_EXPECTED_COUNT * cells:
        return None
    counts = np.bincount(np.asarray(tallies, dtype=int), minlength=cells)
    return float(chisquare(counts).pvalue)


@register_handler(ExperimentKind.TELEPORT_VERIFY)
class TeleportVerifyHandler(BaseExperimentHandler):
    """Random (U, psi) pairs; the post state must equal (U X^a Z^b (x) I)|psi>."""

    @property
    def kind(self) -> ExperimentKind:
        return ExperimentKind.TELEPORT_VERIFY

    def _trial(self, index: int, rng: np.random.Generator) -> Tuple[float, int]:
        n = self.config.n
        unitary = sample_haar_unitary(1 << n, rng)
        psi = random_state(2 * n, rng)
        post, trace = teleport_gate(choi_from_unitary(unitary), psi, rng)
        outcome = trace.outcome
        expected = apply_matrix(apply_xz(psi, outcome.a, outcome.b, range(n)), unitary, list(range(n)))
        return fidelity(post, expected), outcome.index

    def run(self) -> ExperimentOutcome:
        cfg = self.config
        results = self.map_trials(cfg.trials, self._trial)
        fidelities = np.array([f for f, _ in results])
        tallies = np.array([i for _, i in results])
        cells = 4**cfg.n

        outcome = ExperimentOutcome()
        outcome.outputs = {
            "n": cfg.n,
            "trials": cfg.trials,
            "min_fidelity": float(fidelities.min()),
            "outcome_counts": np.bincount(tallies, minlength=cells).tolist(),
            "uniformity_pvalue": outcome_uniformity(tallies, cells),
        }
        outcome.check(
            fidelities.min() >= 1 - cfg.tolerance,
            f"min fidelity {fidelities.min():.15f} below 1 - {cfg.tolerance}",
        )
        self.logger.info("teleportation verified", n=cfg.n, trials=cfg.trials, min_fidelity=float(fidelities.min()))
        return outcome
