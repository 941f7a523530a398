"""Clifford spacetime conversion against the dense circuit."""

from typing import Tuple

import numpy as np

from ..core.cliffordsim import apply_clifford, clifford_spacetime, random_layered_clifford
from ..core.statevector import StateVector, fidelity, random_state
from ..core.teleport import depth_budget
from ..harness.schemas import ExperimentKind
from .base import BaseExperimentHandler, ExperimentOutcome, register_handler
from .spacetime_random import tradeoff_rows


@register_handler(ExperimentKind.SPACETIME_CLIFFORD)
class SpacetimeCliffordHandler(BaseExperimentHandler):

    @property
    def kind(self) -> ExperimentKind:
        return ExperimentKind.SPACETIME_CLIFFORD

    def _trial(self, index: int, rng: np.random.Generator) -> Tuple[float, int, int]:
        cfg = self.config
        circuit = random_layered_clifford(cfg.n, cfg.t, rng)
        source = random_state(cfg.n, rng) if cfg.random_input else None
        state, trace = clifford_spacetime(circuit, cfg.k, rng, source)
        expected = apply_clifford(source if source is not None else StateVector.zeros(cfg.n), circuit)
        return fidelity(state, expected), trace.depth_used, len(trace.merges)

    def run(self) -> ExperimentOutcome:
        cfg = self.config
        results = self.map_trials(cfg.trials, self._trial)
        fidelities = np.array([f for f, _, _ in results])
        depths = sorted({d for _, d, _ in results})
        budget = depth_budget(cfg.t, cfg.k)

        outcome = ExperimentOutcome()
        outcome.outputs = {
            "n": cfg.n,
            "k": cfg.k,
            "t": cfg.t,
            "trials": cfg.trials,
            "qubits": cfg.k * cfg.n,
            "depth_used": depths,
            "bell_layers": results[0][2],
            "min_fidelity": float(fidelities.min()),
        }
        outcome.check(fidelities.min() >= 1 - cfg.tolerance, f"min fidelity {fidelities.min():.15f} below tolerance")
        outcome.check(depths == [budget], f"reported depths {depths} differ from {budget}")
        outcome.series["tradeoff"] = tradeoff_rows(cfg.n, cfg.t, cfg.ks or [cfg.k])
        self.logger.info("clifford conversion checked", n=cfg.n, k=cfg.k, t=cfg.t, min_fidelity=float(fidelities.min()))
        return outcome
