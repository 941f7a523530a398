"""Experiment dispatch."""

import json
import time
from typing import Any, Mapping, Union

import numpy as np

from ..utils.logger import get_context_logger
from .batch import BatchProcessor
from .schemas import ExperimentConfig, ResultRecord, validate_config


def _plain(value: Any) -> Any:
    """Convert numpy scalars and containers to JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def run(config: Union[ExperimentConfig, Mapping[str, Any]]) -> ResultRecord:
    """
    Run one experiment.

    Args:
        config: Validated config, or a mapping that is validated first

    Returns:
        ResultRecord; ``passed`` is False when any declared tolerance failed

    Raises:
        ValueError: If the config is invalid (field-level messages)
    """
    from .. import __version__
    from ..experiments import get_handler

    if not isinstance(config, ExperimentConfig):
        config = validate_config(config)
    logger = get_context_logger(__name__, experiment=config.kind.value, seed=config.seed)
    logger.info("experiment started", workers=config.workers)

    start = time.perf_counter()
    handler = get_handler(config, BatchProcessor(config.workers))
    outcome = handler.run()
    elapsed = time.perf_counter() - start

    record = ResultRecord(
        digest=config.digest(),
        kind=config.kind,
        seed=config.seed,
        version=__version__,
        outputs=_plain(outcome.outputs),
        series=_plain(outcome.series),
        passed=not outcome.failures,
        failures=list(outcome.failures),
        wall_clock=elapsed,
    )
    # Fail early on outputs that cannot be serialized.
    json.dumps(record.payload())
    logger.info("experiment finished", passed=record.passed, failures=len(record.failures), seconds=round(elapsed, 3))
    return record
