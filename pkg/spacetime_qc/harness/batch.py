"""Seeded worker pool for independent trials."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, List, Optional

import numpy as np

from ..utils.logger import get_logger
from .schemas import KIND_IDS, ExperimentKind

logger = get_logger(__name__)

TRIAL_STREAM = 0
CHUNK_STREAM = 1
REFERENCE_STREAM = 2


def stream_rng(seed: int, kind: ExperimentKind, *keys: int) -> np.random.Generator:
    """
    Counter-based generator for (seed, kind, keys...).

    Each key tuple names an independent Philox stream, so a trial's
    randomness does not depend on which worker runs it or in what order.
    """
    sequence = np.random.SeedSequence(seed, spawn_key=(KIND_IDS[ExperimentKind(kind)],) + tuple(keys))
    return np.random.Generator(np.random.Philox(sequence))


def trial_rng(seed: int, kind: ExperimentKind, index: int) -> np.random.Generator:
    return stream_rng(seed, kind, TRIAL_STREAM, index)


def chunk_rng(seed: int, kind: ExperimentKind, trial: int, chunk: int) -> np.random.Generator:
    return stream_rng(seed, kind, CHUNK_STREAM, trial, chunk)


class TrialStatus(str, Enum):
    PENDING = "pending"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class TrialItem:
    """One trial of a batch."""

    index: int
    status: TrialStatus = TrialStatus.PENDING
    result: Any = None
    error: Optional[BaseException] = None


@dataclass
class TrialBatch:
    kind: ExperimentKind
    seed: int
    stream: int
    items: List[TrialItem] = field(default_factory=list)

    @property
    def failed_items(self) -> int:
        return sum(1 for item in self.items if item.status == TrialStatus.FAILED)

    @property
    def results(self) -> List[Any]:
        return [item.result for item in sorted(self.items, key=lambda i: i.index)]


class BatchProcessor:
    """Run seeded trials on a thread pool; results come back in index order."""

    def __init__(self, max_workers: int = 1):
        if max_workers < 1:
            raise ValueError(f"max_workers must be positive, got {max_workers}")
        self.max_workers = max_workers

    def run(
        self,
        kind: ExperimentKind,
        seed: int,
        count: int,
        fn: Callable[[int, np.random.Generator], Any],
        stream: int = TRIAL_STREAM,
    ) -> List[Any]:
        """
        Call ``fn(index, rng)`` for every index in ``range(count)``.

        ``rng`` is the Philox stream (seed, kind, stream, index).

        The first failing trial (lowest index) re-raises its exception once
        all trials have finished.
        """
        batch = TrialBatch(ExperimentKind(kind), seed, stream, [TrialItem(i) for i in range(count)])
        if self.max_workers == 1:
            for item in batch.items:
                self._process_item(batch, item, fn)
        else:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                list(executor.map(lambda item: self._process_item(batch, item, fn), batch.items))

        if batch.failed_items:
            first = min((i for i in batch.items if i.status == TrialStatus.FAILED), key=lambda i: i.index)
            logger.error("trial failed", kind=batch.kind.value, index=first.index, error=str(first.error))
            raise first.error
        return batch.results

    @staticmethod
    def _process_item(batch: TrialBatch, item: TrialItem, fn: Callable) -> None:
        try:
            item.result = fn(item.index, stream_rng(batch.seed, batch.kind, batch.stream, item.index))
            item.status = TrialStatus.COMPLETED
        except Exception as e:
            item.error = e
            item.status = TrialStatus.FAILED
