"""Spacetime conversion, ancilla-assisted shadows and design diagnostics."""

__version__ = "0.1.0"


def __getattr__(name):
    """Lazy import for the simulation modules."""
    if name == "StateVector":
        from .core.statevector import StateVector
        return StateVector
    if name == "run":
        from .harness.runner import run
        return run
    if name == "ExperimentConfig":
        from .harness.schemas import ExperimentConfig
        return ExperimentConfig
    if name == "Config":
        from .config import Config
        return Config
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = ["StateVector", "run", "ExperimentConfig", "Config", "__version__"]
