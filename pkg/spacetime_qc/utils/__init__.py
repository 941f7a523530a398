"""Utility functions."""

from .logger import get_context_logger, get_logger, setup_logging
from .validators import (
    require,
    validate_bits,
    validate_density_matrix,
    validate_field,
    validate_hermitian,
    validate_qubit_indices,
    validate_unitary,
)

__all__ = [
    "get_logger",
    "get_context_logger",
    "setup_logging",
    "require",
    "validate_bits",
    "validate_density_matrix",
    "validate_field",
    "validate_hermitian",
    "validate_qubit_indices",
    "validate_unitary",
]
