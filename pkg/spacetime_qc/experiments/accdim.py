"""Accessible-dimension sweeps of the post-selected brickwork map."""

from typing import List

import numpy as np

from ..analysis.designlab import (
    AccessibleDimensionReport,
    GPoint,
    accessible_dimension_lower_bound,
    accessible_dimension_report,
    analytic_jacobian,
    finite_difference_jacobian,
    numeric_rank,
)
from ..harness.batch import REFERENCE_STREAM, stream_rng
from ..harness.schemas import ExperimentKind
from .base import BaseExperimentHandler, ExperimentOutcome, register_handler

GRADIENT_TOL = 1e-6


@register_handler(ExperimentKind.ACCDIM)
class AccessibleDimensionHandler(BaseExperimentHandler):

    @property
    def kind(self) -> ExperimentKind:
        return ExperimentKind.ACCDIM

    @property
    def m(self) -> int:
        return self.config.m if self.config.m is not None else self.config.n

    @property
    def depths(self) -> List[int]:
        return sorted(set(self.config.ds)) or [self.config.d]

    def _report(self, index: int, rng: np.random.Generator) -> AccessibleDimensionReport:
        cfg = self.config
        # depths already share the pool; leftover workers go to Jacobian columns
        workers = max(1, cfg.workers // len(self.depths))
        return accessible_dimension_report(
            self.m, cfg.n, self.depths[index], rng, cfg.num_points, workers=workers
        )

    def _gradient_check(self, outcome: ExperimentOutcome) -> None:
        """Analytic Jacobian against central differences at one point of the deepest circuit."""
        cfg = self.config
        d = max(self.depths)
        if d == 0:
            return
        rng = stream_rng(cfg.seed, self.kind, REFERENCE_STREAM, 0)
        point = GPoint.random(self.m, cfg.n, d, rng)
        analytic = analytic_jacobian(point)
        numeric = finite_difference_jacobian(point)
        error = float(np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-300))
        analytic_rank, _ = numeric_rank(analytic)
        oracle_rank, _ = numeric_rank(numeric)
        outcome.outputs["gradient_relative_error"] = error
        outcome.outputs["oracle_rank"] = {"d": d, "analytic": analytic_rank, "finite_difference": oracle_rank}
        outcome.check(error < GRADIENT_TOL, f"Jacobian relative error {error:.3g} >= {GRADIENT_TOL}")
        outcome.check(analytic_rank == oracle_rank, f"analytic rank {analytic_rank} != oracle rank {oracle_rank}")

    def run(self) -> ExperimentOutcome:
        cfg = self.config
        depths = self.depths
        reports = self.map_trials(len(depths), self._report)

        outcome = ExperimentOutcome()
        outcome.outputs = {
            "m": self.m,
            "n": cfg.n,
            "num_points": cfg.num_points,
            "reports": [r.to_dict() for r in reports],
        }
        rows = [
            {
                "d": d,
                "max_rank": r.max_rank,
                "stable_fraction": r.stable_fraction,
                "lower_bound": accessible_dimension_lower_bound(self.m, cfg.n, d),
            }
            for d, r in zip(depths, reports)
        ]
        outcome.series["ranks"] = rows

        max_ranks = [row["max_rank"] for row in rows]
        outcome.check(
            all(a <= b for a, b in zip(max_ranks, max_ranks[1:])),
            f"ranks {max_ranks} are not monotone in d={depths}",
        )
        if depths[0] == 0:
            outcome.check(max_ranks[0] == 0, f"rank at d=0 is {max_ranks[0]}")
        self._gradient_check(outcome)
        self.logger.info("accessible dimension swept", m=self.m, n=cfg.n, depths=depths, ranks=max_ranks)
        return outcome
