"""Experiment configuration and result record models."""

import hashlib
import json
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.ensembles import EnsembleKind


class ExperimentKind(str, Enum):
    """Available experiment families."""

    TELEPORT_VERIFY = "teleport-verify"
    SPACETIME_RANDOM = "spacetime-random"
    SPACETIME_CLIFFORD = "spacetime-clifford"
    SHADOW_RUN = "shadow-run"
    DESIGN_CHECK = "design-check"
    ACCDIM = "accdim"
    BOUNDS_TABLE = "bounds-table"


# Stable numeric tags used when deriving random streams.
KIND_IDS: Dict[ExperimentKind, int] = {kind: i for i, kind in enumerate(ExperimentKind)}

LIST_FIELDS = ("ks", "ms", "ns", "ds", "observables")
SHADOW_ENSEMBLES = (EnsembleKind.STABILIZER_STATES, EnsembleKind.HAAR_STATES, EnsembleKind.LOCAL_STAB)


class ExperimentConfig(BaseModel):
    """One experiment run. Fields a kind does not use are ignored by it."""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    kind: ExperimentKind
    seed: int = Field(0, ge=0, lt=2**64, description="Master seed")
    workers: int = Field(1, ge=1, description="Worker threads")
    trials: int = Field(100, ge=1, description="Independent trials")
    tolerance: float = Field(1e-9, gt=0, description="Fidelity tolerance")

    n: int = Field(2, ge=1, description="Output qubits")
    m: Optional[int] = Field(None, ge=1, description="Total qubits (accdim)")
    d: int = Field(1, ge=0, description="Brickwork depth")
    t: int = Field(6, ge=0, description="Target circuit depth")
    k: int = Field(2, ge=2, description="Spacetime conversion factor")
    ks: List[int] = Field(default_factory=list, description="k sweep for the tradeoff series")
    ms: List[int] = Field(default_factory=list)
    ns: List[int] = Field(default_factory=list)
    ds: List[int] = Field(default_factory=list)
    random_input: bool = Field(False, description="Teleport a random input (odd k)")

    ensemble: EnsembleKind = EnsembleKind.STABILIZER_STATES
    observables: List[str] = Field(default_factory=lambda: ["ZI", "XX"])
    epsilon: float = Field(0.1, gt=0)
    delta: float = Field(0.01, gt=0, lt=1)
    repetitions: int = Field(1, ge=1, description="Shadow runs per unknown state")
    num_states: int = Field(1, ge=1, description="Random unknown states")
    state_rank: int = Field(1, ge=1, description="Rank of the random unknown state")
    sample_chunk: int = Field(4096, ge=1, description="Shadow samples per random stream")
    sample_log: Optional[str] = Field(None, description="NDJSON sample log path")
    replay_log: Optional[str] = Field(None, description="Estimate from this sample log instead of sampling")

    moment: int = Field(3, ge=1, description="Highest design order checked")
    num_points: int = Field(8, ge=1)

    @model_validator(mode="after")
    def _check_kind(self) -> "ExperimentConfig":
        kind = self.kind
        if kind == ExperimentKind.SPACETIME_RANDOM:
            if self.n < 2:
                raise ValueError("spacetime-random needs n >= 2")
            if self.t < 1:
                raise ValueError("spacetime-random needs t >= 1")
        if kind == ExperimentKind.SPACETIME_CLIFFORD and self.random_input and self.k % 2 == 0:
            raise ValueError("random_input needs odd k")
        if kind == ExperimentKind.SHADOW_RUN:
            if self.ensemble not in SHADOW_ENSEMBLES:
                raise ValueError(f"shadow-run ensemble must be one of {[e.value for e in SHADOW_ENSEMBLES]}")
            if not self.observables:
                raise ValueError("shadow-run needs at least one observable")
            bad = [o for o in self.observables if len(o.lstrip("+-")) != self.n]
            if bad:
                raise ValueError(f"observables {bad} do not act on n={self.n} qubits")
            if self.state_rank > 2**self.n:
                raise ValueError(f"state_rank {self.state_rank} exceeds 2^n")
        elif self.replay_log:
            raise ValueError("replay_log only applies to shadow-run")
        if kind == ExperimentKind.ACCDIM:
            m = self.m if self.m is not None else self.n
            if m < self.n:
                raise ValueError(f"accdim needs m >= n, got m={m}, n={self.n}")
        for k in self.ks:
            if k < 2:
                raise ValueError(f"ks entries must be >= 2, got {k}")
        return self

    # -- flat key = value format ------------------------------------------

    def to_text(self) -> str:
        """Serialize as sorted ``key = value`` lines, kind first."""
        data = self.model_dump(mode="json")
        lines = [f"kind = {data.pop('kind')}"]
        for key in sorted(data):
            value = data[key]
            if value is None:
                continue
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, overrides: Optional[Mapping[str, str]] = None) -> "ExperimentConfig":
        raw = parse_assignments(text.splitlines())
        raw.update(overrides or {})
        return config_from_assignments(raw)

    def digest(self) -> str:
        """SHA-256 of the serialized config; the worker count is left out."""
        return hashlib.sha256(self.model_copy(update={"workers": 1}).to_text().encode()).hexdigest()


def parse_assignments(lines: Iterable[str]) -> Dict[str, str]:
    """Parse ``key = value`` (or ``key=value``) lines; ``#`` starts a comment."""
    raw: Dict[str, str] = {}
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {number}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"line {number}: empty key")
        raw[key] = value
    return raw


def config_from_assignments(raw: Mapping[str, Any]) -> ExperimentConfig:
    """Validate parsed assignments; list fields are comma-separated."""
    data = dict(raw)
    for key in LIST_FIELDS:
        if isinstance(data.get(key), str):
            data[key] = [v.strip() for v in data[key].split(",") if v.strip()]
    return validate_config(data)


def validate_config(data: Mapping[str, Any]) -> ExperimentConfig:
    """Validate a mapping, turning pydantic errors into one ValueError."""
    try:
        return ExperimentConfig.model_validate(dict(data))
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ValueError(f"Invalid experiment config: {details}") from None


class ResultRecord(BaseModel):
    """Outcome of one run, serialized as a single JSON line."""

    digest: str
    kind: ExperimentKind
    seed: int
    version: str
    outputs: Dict[str, Any] = Field(default_factory=dict)
    series: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict)
    passed: bool = True
    failures: List[str] = Field(default_factory=list)
    wall_clock: float = 0.0

    def payload(self) -> Dict[str, Any]:
        """Everything except the wall-clock time."""
        return self.model_dump(mode="json", exclude={"wall_clock"})

    def payload_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True)

    def to_json_line(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True)

    @classmethod
    def from_json_line(cls, line: str) -> "ResultRecord":
        return cls.model_validate_json(line)
