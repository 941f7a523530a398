"""Random spacetime conversion: exactness, depth accounting and output statistics."""

import math
from typing import Any, Dict

import numpy as np

from ..analysis.designlab import frame_potential_estimate
from ..core.ensembles import build_brickwork
from ..core.statevector import StateVector, bits_to_index, fidelity
from ..core.teleport import depth_budget, spacetime_convert_state
from ..harness.batch import REFERENCE_STREAM
from ..harness.schemas import ExperimentKind
from .base import BaseExperimentHandler, ExperimentOutcome, register_handler
from .teleport_verify import UNIFORMITY_LEVEL, outcome_uniformity

FRAME_ORDERS = (1, 2)
Z_LIMIT = 3.0


def tradeoff_rows(n: int, t: int, ks) -> list:
    return [{"k": k, "qubits": k * n, "depth": depth_budget(t, k)} for k in ks]


@register_handler(ExperimentKind.SPACETIME_RANDOM)
class SpacetimeRandomHandler(BaseExperimentHandler):
    """
    Prepare states with k*n qubits at depth floor(t/k) + 4.

    Each run is checked against its recorded effective circuit applied to
    |0^n>. Output frame potentials are compared with direct brickwork
    sampling at the effective depth and layer parity of each run, and the
    first Bell layer (or the readout for a single block) is tested for
    uniformity.
    """

    @property
    def kind(self) -> ExperimentKind:
        return ExperimentKind.SPACETIME_RANDOM

    def _trial(self, index: int, rng: np.random.Generator) -> Dict[str, Any]:
        cfg = self.config
        state, trace, effective_t = spacetime_convert_state(cfg.n, cfg.k, cfg.t, rng)
        oracle = trace.circuit.apply(StateVector.zeros(cfg.n))
        if trace.merges:
            tally, cells = trace.merges[0].outcome.index, 4**cfg.n
        else:
            tally, cells = bits_to_index(trace.readout), 2**cfg.n
        return {
            "fidelity": fidelity(state, oracle),
            "depth": trace.depth_used,
            "effective_t": effective_t,
            "first_parity": trace.circuit.first_parity,
            "tally": tally,
            "cells": cells,
            "amplitudes": state.amplitudes,
        }

    def _reference(self, index: int, rng: np.random.Generator) -> np.ndarray:
        depth, parity = self._reference_shapes[index]
        circuit = build_brickwork(self.config.n, depth, rng, first_parity=parity)
        return circuit.apply(StateVector.zeros(self.config.n)).amplitudes

    def run(self) -> ExperimentOutcome:
        cfg = self.config
        runs = self.map_trials(cfg.trials, self._trial)
        fidelities = np.array([r["fidelity"] for r in runs])
        depths = sorted({r["depth"] for r in runs})
        effective = [r["effective_t"] for r in runs]
        tallies = np.array([r["tally"] for r in runs])
        budget = depth_budget(cfg.t, cfg.k)

        outcome = ExperimentOutcome()
        outcome.outputs = {
            "n": cfg.n,
            "k": cfg.k,
            "t": cfg.t,
            "trials": cfg.trials,
            "qubits": cfg.k * cfg.n,
            "depth_used": depths,
            "min_fidelity": float(fidelities.min()),
            "effective_t_min": int(min(effective)),
            "effective_t_max": int(max(effective)),
            "uniformity_pvalue": outcome_uniformity(tallies, runs[0]["cells"]),
        }
        outcome.check(fidelities.min() >= 1 - cfg.tolerance, f"min fidelity {fidelities.min():.15f} below tolerance")
        outcome.check(depths == [budget], f"reported depths {depths} differ from {budget}")
        outcome.check(min(effective) >= cfg.t, f"effective depth {min(effective)} below t={cfg.t}")
        pvalue = outcome.outputs["uniformity_pvalue"]
        outcome.check(pvalue is None or pvalue >= UNIFORMITY_LEVEL, f"Bell outcomes fail uniformity (p={pvalue})")

        if cfg.trials >= 4:
            # reference run i matches run i in depth and brick alignment
            self._reference_shapes = [(r["effective_t"], r["first_parity"]) for r in runs]
            outcome.outputs["reference_depths"] = sorted({d for d, _ in self._reference_shapes})
            reference = self.pool.run(self.kind, cfg.seed, cfg.trials, self._reference, stream=REFERENCE_STREAM)
            outputs = [r["amplitudes"] for r in runs]
            for order in FRAME_ORDERS:
                mean, err = frame_potential_estimate(outputs, order)
                ref_mean, ref_err = frame_potential_estimate(reference, order)
                sigma = math.hypot(err, ref_err)
                z = (mean - ref_mean) / sigma if sigma > 0 else 0.0
                outcome.outputs[f"frame_potential_{order}"] = mean
                outcome.outputs[f"frame_potential_{order}_reference"] = ref_mean
                outcome.outputs[f"frame_potential_{order}_z"] = z
                outcome.check(abs(z) <= Z_LIMIT, f"frame potential t={order} differs by {z:.2f} sigma")

        outcome.series["tradeoff"] = tradeoff_rows(cfg.n, cfg.t, cfg.ks or [cfg.k])
        self.logger.info(
            "spacetime conversion checked",
            n=cfg.n, k=cfg.k, t=cfg.t, trials=cfg.trials, failures=len(outcome.failures),
        )
        return outcome
