"""Dense simulation kernels, ensembles, teleportation and Clifford tableaux."""

from .ensembles import BrickworkCircuit, EnsembleKind, EnsembleSpec, build_brickwork, prepare_epr
from .pauli import PauliString
from .statevector import DensityMatrix, GateMatrix, StateVector, apply_gate, fidelity
from .teleport import (
    BellOutcome,
    SpacetimeTrace,
    TeleportTrace,
    bell_measure,
    depth_budget,
    merge_choi,
    spacetime_convert_apply,
    spacetime_convert_state,
    teleport_gate,
)


def __getattr__(name):
    if name in ("CliffordCircuit", "CliffordTableau", "clifford_spacetime", "clifford_teleport"):
        from . import cliffordsim
        return getattr(cliffordsim, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    # State engine
    "StateVector",
    "DensityMatrix",
    "GateMatrix",
    "apply_gate",
    "fidelity",
    "PauliString",
    # Ensembles
    "EnsembleKind",
    "EnsembleSpec",
    "BrickworkCircuit",
    "build_brickwork",
    "prepare_epr",
    # Teleportation
    "BellOutcome",
    "TeleportTrace",
    "SpacetimeTrace",
    "bell_measure",
    "teleport_gate",
    "merge_choi",
    "depth_budget",
    "spacetime_convert_state",
    "spacetime_convert_apply",
    # Clifford
    "CliffordCircuit",
    "CliffordTableau",
    "clifford_teleport",
    "clifford_spacetime",
]
