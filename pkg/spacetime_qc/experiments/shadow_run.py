"""Shadow estimation runs: accuracy, convergence, purity and variance."""

import math
from typing import Any, Dict, List

import numpy as np

from ..analysis.shadow import (
    GLOBAL_KINDS,
    Observable,
    ShadowDataset,
    estimate_observables,
    estimate_polynomial,
    median_of_means,
    plan_estimation,
    sample_shadows,
    shadow_norm_bound,
    snapshot_mean,
    snapshot_values,
)
from ..core.ensembles import EnsembleSpec
from ..core.statevector import random_density_matrix, trace_distance
from ..harness.batch import REFERENCE_STREAM, chunk_rng, stream_rng
from ..harness.schemas import ExperimentKind
from ..harness.storage import read_sample_log, write_sample_log
from .base import BaseExperimentHandler, ExperimentOutcome, register_handler

SNAPSHOT_MEAN_SAMPLES = 100_000
CONVERGENCE_POINTS = 8


@register_handler(ExperimentKind.SHADOW_RUN)
class ShadowRunHandler(BaseExperimentHandler):
    """
    Estimate Pauli observables of random states with median of means.

    Job j = state * repetitions + repetition draws plan.N samples in
    chunks, each chunk on its own stream. The first job also feeds the
    convergence series, the purity estimate and the variance check.
    """

    @property
    def kind(self) -> ExperimentKind:
        return ExperimentKind.SHADOW_RUN

    def __init__(self, config, pool):
        super().__init__(config, pool)
        cfg = self.config
        self.ensemble = EnsembleSpec(cfg.ensemble, cfg.n)
        self.mode = "global" if cfg.ensemble in GLOBAL_KINDS else "local"
        self.observables = [Observable.pauli(label) for label in cfg.observables]
        self.plan = plan_estimation(self.observables, cfg.epsilon, cfg.delta, self.mode)

    def _state(self, index: int) -> np.ndarray:
        cfg = self.config
        rng = stream_rng(cfg.seed, self.kind, REFERENCE_STREAM, index)
        return random_density_matrix(cfg.n, rng, rank=cfg.state_rank).entries

    def _samples(self, job: int, rho: np.ndarray) -> ShadowDataset:
        cfg = self.config
        parts = []
        remaining = self.plan.N
        chunk = 0
        while remaining > 0:
            size = min(cfg.sample_chunk, remaining)
            parts.append(sample_shadows(rho, self.ensemble, size, chunk_rng(cfg.seed, self.kind, job, chunk)))
            remaining -= size
            chunk += 1
        return ShadowDataset.concat(parts)

    def _trial(self, job: int, rng: np.random.Generator) -> Dict[str, Any]:
        rho = self._state(job // self.config.repetitions)
        data = self._samples(job, rho)
        truth = [o.expectation(rho) for o in self.observables]
        estimates = estimate_observables(data, self.observables, self.plan)
        result = {
            "truth": truth,
            "estimates": estimates,
            "max_error": max(abs(e - v) for e, v in zip(estimates, truth)),
        }
        if job == 0:
            result["data"] = data
            result["rho"] = rho
        return result

    def _convergence(self, data: ShadowDataset, truth: List[float]) -> List[Dict[str, Any]]:
        values = [snapshot_values(data, o) for o in self.observables]
        K = self.plan.K
        sizes = sorted({max(1, math.ceil(self.plan.B / 2**j)) * K for j in range(CONVERGENCE_POINTS)})
        rows = []
        for size in sizes:
            error = max(abs(median_of_means(v[:size], K) - t) for v, t in zip(values, truth))
            rows.append({"N": size, "abs_error": error})
        return rows

    def _variances(self, data: ShadowDataset, outcome: ExperimentOutcome) -> None:
        variances, bounds = [], []
        for label, observable in zip(self.config.observables, self.observables):
            values = snapshot_values(data, observable)
            deviation = (values - values.mean()) ** 2
            variance = float(np.var(values, ddof=1))
            margin = 3.0 * float(deviation.std()) / math.sqrt(len(values))
            bound = shadow_norm_bound(observable)
            variances.append(variance)
            bounds.append(bound)
            if self.mode == "global":
                outcome.check(variance <= bound + margin, f"snapshot variance of {label} is {variance:.4f} > {bound}")
        outcome.outputs["snapshot_variances"] = variances
        outcome.outputs["variance_bounds"] = bounds

    def _replay(self) -> ExperimentOutcome:
        """Re-estimate from a recorded sample log instead of drawing new samples."""
        cfg = self.config
        data = read_sample_log(cfg.replay_log)
        if data.ensemble != self.ensemble:
            raise ValueError(
                f"Sample log holds {data.ensemble.kind.value} samples on {data.num_qubits} qubits, "
                f"config asks for {self.ensemble.kind.value} on {cfg.n}"
            )
        rho = self._state(0)
        truth = [o.expectation(rho) for o in self.observables]
        estimates = estimate_observables(data, self.observables, self.plan)
        outcome = ExperimentOutcome()
        outcome.outputs = {
            "n": cfg.n,
            "ensemble": cfg.ensemble.value,
            "mode": self.mode,
            "plan": self.plan.to_dict(),
            "observables": list(cfg.observables),
            "replayed_samples": len(data),
            "true_values": truth,
            "estimates": estimates,
            "max_errors": [max(abs(e - v) for e, v in zip(estimates, truth))],
            "purity_exact": float(np.real(np.trace(rho @ rho))),
            "purity_estimate": estimate_polynomial(data, 2, "purity"),
        }
        outcome.series["convergence"] = self._convergence(data, truth)
        self.logger.info("shadow log replayed", path=cfg.replay_log, samples=len(data), n=cfg.n)
        return outcome

    def run(self) -> ExperimentOutcome:
        cfg = self.config
        if cfg.replay_log:
            return self._replay()
        jobs = cfg.num_states * cfg.repetitions
        results = self.map_trials(jobs, self._trial)
        covered = sum(1 for r in results if r["max_error"] <= cfg.epsilon)
        coverage = covered / jobs

        first = results[0]
        data, rho = first["data"], first["rho"]
        outcome = ExperimentOutcome()
        outcome.outputs = {
            "n": cfg.n,
            "ensemble": cfg.ensemble.value,
            "mode": self.mode,
            "plan": self.plan.to_dict(),
            "observables": list(cfg.observables),
            "num_states": cfg.num_states,
            "repetitions": cfg.repetitions,
            "true_values": first["truth"],
            "estimates": first["estimates"],
            "max_errors": [r["max_error"] for r in results],
            "coverage": coverage,
            "purity_exact": float(np.real(np.trace(rho @ rho))),
            "purity_estimate": estimate_polynomial(data, 2, "purity"),
            "snapshot_mean_distance": trace_distance(snapshot_mean(data.subset(slice(0, SNAPSHOT_MEAN_SAMPLES))), rho),
        }
        self._variances(data, outcome)
        outcome.check(coverage >= 1 - cfg.delta, f"coverage {coverage:.4f} below 1 - delta = {1 - cfg.delta}")
        outcome.series["convergence"] = self._convergence(data, first["truth"])

        if cfg.sample_log:
            outcome.outputs["sample_log"] = write_sample_log(cfg.sample_log, data)
        self.logger.info(
            "shadow run finished",
            n=cfg.n, mode=self.mode, samples=self.plan.N, jobs=jobs, coverage=coverage,
        )
        return outcome
