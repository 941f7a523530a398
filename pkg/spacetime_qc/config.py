"""Centralized configuration management for the simulator and experiment harness."""

import os
from dataclasses import dataclass, field
from typing import Literal, Optional

try:
    from dotenv import load_dotenv
except ImportError:  # pragma: no cover
    load_dotenv = None


@dataclass
class SimulationConfig:
    """Dense simulation settings."""

    max_dense_qubits: int = 24  # soft ceiling for dense statevectors
    validate_gates: bool = True
    unitarity_tol: float = 1e-10
    norm_tol: float = 1e-10


@dataclass
class HarnessConfig:
    """Experiment harness settings."""

    workers: int = 1
    results_dir: str = "./results"
    sample_chunk: int = 4096  # shadow samples per rng sub-stream


@dataclass
class LoggingConfig:
    """Logging configuration settings."""

    level: str = "INFO"
    format: Literal["json", "text"] = "json"
    file_path: Optional[str] = None


@dataclass
class Config:
    """Main configuration container."""

    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    harness: HarnessConfig = field(default_factory=HarnessConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("1", "true", "yes")


def load_config(env_file: Optional[str] = None) -> Config:
    """Load configuration from environment variables (and a .env file if present)."""
    if load_dotenv is not None:
        load_dotenv(env_file, override=False)

    return Config(
        simulation=SimulationConfig(
            max_dense_qubits=int(os.getenv("QSIM_MAX_DENSE_QUBITS", "24")),
            validate_gates=_env_bool("QSIM_VALIDATE_GATES", "true"),
            unitarity_tol=float(os.getenv("QSIM_UNITARITY_TOL", "1e-10")),
            norm_tol=float(os.getenv("QSIM_NORM_TOL", "1e-10")),
        ),
        harness=HarnessConfig(
            workers=int(os.getenv("QSIM_WORKERS", "1")),
            results_dir=os.getenv("QSIM_RESULTS_DIR", "./results"),
            sample_chunk=int(os.getenv("QSIM_SAMPLE_CHUNK", "4096")),
        ),
        logging=LoggingConfig(
            level=os.getenv("LOG_LEVEL", "INFO"),
            format=os.getenv("LOG_FORMAT", "json"),
            file_path=os.getenv("LOG_FILE_PATH"),
        ),
    )


# Global config instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def reset_config() -> None:
    """Reset the global configuration (useful for testing)."""
    global _config
    _config = None


if __name__ == "__main__":
    print("=" * 60)
    print("CONFIG TEST")
    print("=" * 60)

    config = load_config()
    print(f"  Max dense qubits: {config.simulation.max_dense_qubits}")
    print(f"  Validate gates: {config.simulation.validate_gates}")
    print(f"  Unitarity tol: {config.simulation.unitarity_tol}")
    print(f"  Workers: {config.harness.workers}")
    print(f"  Results dir: {config.harness.results_dir}")
    print(f"  Log level: {config.logging.level}")

    print("=" * 60)
    print("TEST COMPLETE")
    print("=" * 60)
