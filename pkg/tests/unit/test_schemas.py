"""Unit tests for experiment configs and result records."""

import json

import pytest

from spacetime_qc.core.ensembles import EnsembleKind
from spacetime_qc.harness.schemas import (
    KIND_IDS,
    ExperimentConfig,
    ExperimentKind,
    ResultRecord,
    config_from_assignments,
    parse_assignments,
    validate_config,
)


@pytest.mark.unit
class TestExperimentConfig:
    """Tests for ExperimentConfig validation."""

    def test_defaults(self):
        """Test default field values."""
        config = ExperimentConfig(kind=ExperimentKind.TELEPORT_VERIFY)
        assert config.seed == 0
        assert config.workers == 1
        assert config.trials == 100
        assert config.k == 2
        assert config.ensemble == EnsembleKind.STABILIZER_STATES
        assert config.observables == ["ZI", "XX"]

    def test_kind_ids_are_distinct(self):
        """Test every kind has its own stream tag."""
        assert len(set(KIND_IDS.values())) == len(ExperimentKind)

    def test_unknown_key_rejected(self):
        """Test extra keys are forbidden."""
        with pytest.raises(ValueError, match="Invalid experiment config"):
            validate_config({"kind": "teleport-verify", "qubits": 3})

    def test_field_ranges(self):
        """Test numeric range checks."""
        with pytest.raises(ValueError, match="n"):
            validate_config({"kind": "teleport-verify", "n": 0})
        with pytest.raises(ValueError):
            validate_config({"kind": "teleport-verify", "k": 1})
        with pytest.raises(ValueError):
            validate_config({"kind": "shadow-run", "delta": 1.5})

    def test_unknown_kind(self):
        """Test the kind must be known."""
        with pytest.raises(ValueError, match="Invalid experiment config"):
            validate_config({"kind": "quantum-supremacy"})

    def test_spacetime_random_needs_two_qubits(self):
        """Test n >= 2 for random spacetime runs."""
        with pytest.raises(ValueError, match="needs n >= 2"):
            validate_config({"kind": "spacetime-random", "n": 1})

    def test_random_input_needs_odd_k(self):
        """Test random inputs require odd k."""
        with pytest.raises(ValueError, match="odd k"):
            validate_config({"kind": "spacetime-clifford", "n": 4, "k": 2, "random_input": True})
        config = validate_config({"kind": "spacetime-clifford", "n": 4, "k": 3, "random_input": True})
        assert config.random_input is True

    def test_shadow_observable_width(self):
        """Test observables must act on n qubits."""
        with pytest.raises(ValueError, match="do not act on n=3"):
            validate_config({"kind": "shadow-run", "n": 3, "observables": ["ZZ"]})
        config = validate_config({"kind": "shadow-run", "n": 2, "observables": ["-ZZ", "XY"]})
        assert config.observables == ["-ZZ", "XY"]

    def test_shadow_ensemble_and_rank(self):
        """Test shadow runs need a tomographic ensemble and a valid rank."""
        with pytest.raises(ValueError, match="ensemble must be one of"):
            validate_config({"kind": "shadow-run", "ensemble": "computational"})
        with pytest.raises(ValueError, match="exceeds 2\\^n"):
            validate_config({"kind": "shadow-run", "state_rank": 5})

    def test_replay_log_only_for_shadow_runs(self):
        """Test replay_log is rejected outside shadow runs."""
        with pytest.raises(ValueError, match="only applies to shadow-run"):
            validate_config({"kind": "accdim", "replay_log": "samples.ndjson"})
        assert validate_config({"kind": "shadow-run", "replay_log": "s.ndjson"}).replay_log == "s.ndjson"

    def test_accdim_needs_m_at_least_n(self):
        """Test m >= n for accessible dimension runs."""
        with pytest.raises(ValueError, match="m >= n"):
            validate_config({"kind": "accdim", "m": 2, "n": 3})
        assert validate_config({"kind": "accdim", "n": 2}).m is None

    def test_ks_entries(self):
        """Test sweep entries must be >= 2."""
        with pytest.raises(ValueError, match="ks entries"):
            validate_config({"kind": "spacetime-random", "ks": [2, 1]})


@pytest.mark.unit
class TestConfigText:
    """Tests for the key = value format."""

    def test_round_trip(self):
        """Test to_text and from_text agree."""
        config = ExperimentConfig(
            kind=ExperimentKind.SHADOW_RUN,
            seed=42,
            n=1,
            observables=["Z", "X"],
            epsilon=0.25,
            random_input=False,
            ensemble=EnsembleKind.LOCAL_STAB,
            ks=[2, 3],
            sample_log="samples.ndjson",
        )
        assert ExperimentConfig.from_text(config.to_text()) == config

    def test_kind_first_and_sorted(self):
        """Test the kind leads and remaining keys are sorted."""
        lines = ExperimentConfig(kind=ExperimentKind.ACCDIM).to_text().splitlines()
        assert lines[0] == "kind = accdim"
        keys = [line.split(" = ")[0] for line in lines[1:]]
        assert keys == sorted(keys)
        assert "m" not in keys

    def test_comments_and_overrides(self):
        """Test comments are skipped and overrides win."""
        text = "# run\nkind = bounds-table\nseed=3  # inline\n\nms = 4, 8\n"
        config = ExperimentConfig.from_text(text, overrides={"seed": "9"})
        assert config.kind == ExperimentKind.BOUNDS_TABLE
        assert config.seed == 9
        assert config.ms == [4, 8]

    def test_empty_list(self):
        """Test an empty list value parses to []."""
        config = config_from_assignments({"kind": "bounds-table", "ds": ""})
        assert config.ds == []

    def test_parse_errors(self):
        """Test malformed lines report their number."""
        with pytest.raises(ValueError, match="line 2: expected 'key = value'"):
            parse_assignments(["kind = accdim", "seed 3"])
        with pytest.raises(ValueError, match="line 1: empty key"):
            parse_assignments([" = 3"])


@pytest.mark.unit
class TestDigest:
    """Tests for config digests."""

    def test_workers_do_not_change_digest(self):
        """Test the worker count is excluded."""
        one = ExperimentConfig(kind=ExperimentKind.TELEPORT_VERIFY, workers=1)
        four = ExperimentConfig(kind=ExperimentKind.TELEPORT_VERIFY, workers=4)
        assert one.digest() == four.digest()
        assert len(one.digest()) == 64

    def test_seed_changes_digest(self):
        """Test other fields are included."""
        a = ExperimentConfig(kind=ExperimentKind.TELEPORT_VERIFY, seed=1)
        b = ExperimentConfig(kind=ExperimentKind.TELEPORT_VERIFY, seed=2)
        assert a.digest() != b.digest()


@pytest.mark.unit
class TestResultRecord:
    """Tests for ResultRecord serialization."""

    def _record(self, **kwargs):
        data = dict(
            digest="ab" * 32,
            kind=ExperimentKind.BOUNDS_TABLE,
            seed=5,
            version="1.0.0",
            outputs={"rows": 2},
            series={"bounds": [{"m": 4, "n": 4, "d": 160}]},
            wall_clock=1.25,
        )
        data.update(kwargs)
        return ResultRecord(**data)

    def test_json_line_round_trip(self):
        """Test one JSON line restores the record."""
        record = self._record(passed=False, failures=["fidelity below tolerance"])
        line = record.to_json_line()
        assert "\n" not in line
        assert ResultRecord.from_json_line(line) == record

    def test_payload_excludes_wall_clock(self):
        """Test the payload leaves out timing."""
        record = self._record()
        assert "wall_clock" not in record.payload()
        assert json.loads(record.payload_json())["kind"] == "bounds-table"
        assert self._record(wall_clock=9.0).payload_json() == record.payload_json()
