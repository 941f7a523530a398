"""Base experiment handler and registry."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Type

from ..harness.batch import BatchProcessor
from ..harness.schemas import ExperimentConfig, ExperimentKind
from ..utils.logger import get_context_logger


@dataclass
class ExperimentOutcome:
    """Outputs of one experiment before they are wrapped in a ResultRecord."""

    outputs: Dict[str, Any] = field(default_factory=dict)
    series: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    def check(self, ok: bool, message: str) -> None:
        """Record ``message`` as a failure unless ``ok``."""
        if not ok:
            self.failures.append(message)


class BaseExperimentHandler(ABC):
    """Abstract base class for all experiment handlers."""

    def __init__(self, config: ExperimentConfig, pool: BatchProcessor):
        """
        Initialize the handler.

        Args:
            config: Validated experiment configuration
            pool: Worker pool that hands each trial a private random stream
        """
        self.config = config
        self.pool = pool
        self.logger = get_context_logger(
            f"spacetime_qc.experiments.{config.kind.value}", experiment=config.kind.value, seed=config.seed
        )

    @property
    @abstractmethod
    def kind(self) -> ExperimentKind:
        """Return the experiment kind this handler runs."""
        pass

    @abstractmethod
    def run(self) -> ExperimentOutcome:
        """Run the experiment and collect outputs, series and failures."""
        pass

    def map_trials(self, count: int, fn: Callable) -> List[Any]:
        return self.pool.run(self.kind, self.config.seed, count, fn)


_handlers: Dict[ExperimentKind, Type[BaseExperimentHandler]] = {}


def register_handler(kind: ExperimentKind):
    """Decorator to register an experiment handler."""

    def decorator(cls: Type[BaseExperimentHandler]):
        _handlers[kind] = cls
        return cls

    return decorator


def get_handler(config: ExperimentConfig, pool: BatchProcessor) -> BaseExperimentHandler:
    """
    Get a handler instance for the config's experiment kind.

    Args:
        config: Validated experiment configuration
        pool: Worker pool

    Returns:
        Experiment handler instance
    """
    if config.kind not in _handlers:
        raise ValueError(f"No handler registered for experiment kind: {config.kind}")
    return _handlers[config.kind](config, pool)


def list_handlers() -> List[ExperimentKind]:
    """List all registered experiment kinds."""
    return list(_handlers.keys())
