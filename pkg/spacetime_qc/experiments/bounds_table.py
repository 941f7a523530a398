"""Closed-form bound tables over an (m, n, d) grid."""

from itertools import product

from ..analysis.designlab import accessible_dimension_lower_bound, complexity_bound, swap_ladder_layers
from ..harness.schemas import ExperimentKind
from .base import BaseExperimentHandler, ExperimentOutcome, register_handler
from .spacetime_random import tradeoff_rows


@register_handler(ExperimentKind.BOUNDS_TABLE)
class BoundsTableHandler(BaseExperimentHandler):
    """Evaluate complexity bounds on the grid ms x ns x ds (and the depth tradeoff over ks)."""

    @property
    def kind(self) -> ExperimentKind:
        return ExperimentKind.BOUNDS_TABLE

    def run(self) -> ExperimentOutcome:
        cfg = self.config
        ms = cfg.ms or [cfg.m if cfg.m is not None else cfg.n]
        ns = cfg.ns or [cfg.n]
        ds = cfg.ds or [cfg.d]

        rows = []
        for m, n, d in product(ms, ns, ds):
            row = complexity_bound(m, n, d).to_dict()
            row["swap_layers"] = swap_ladder_layers(n)
            row["lower_bound"] = accessible_dimension_lower_bound(m, n, d)
            rows.append(row)

        outcome = ExperimentOutcome()
        outcome.outputs = {"entries": len(rows)}
        outcome.series["bounds"] = rows
        if cfg.ks:
            outcome.series["tradeoff"] = tradeoff_rows(cfg.n, cfg.t, cfg.ks)
        self.logger.info("bounds tabulated", entries=len(rows))
        return outcome
