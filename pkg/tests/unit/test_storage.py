"""Unit tests for result and sample-log storage."""

import json

import numpy as np
import pytest

from spacetime_qc.analysis.shadow import ShadowDataset, sample_shadows
from spacetime_qc.core.ensembles import EnsembleSpec
from spacetime_qc.harness.schemas import ExperimentKind, ResultRecord
from spacetime_qc.harness.storage import (
    LocalStorage,
    append_record,
    load_records,
    read_sample_log,
    write_sample_log,
)


def _record(seed):
    return ResultRecord(
        digest="0" * 64,
        kind=ExperimentKind.TELEPORT_VERIFY,
        seed=seed,
        version="1.0.0",
        outputs={"min_fidelity": 1.0},
    )


@pytest.mark.unit
class TestLocalStorage:
    """Tests for LocalStorage."""

    def test_save_and_load(self, tmp_path):
        """Test bytes, strings and dicts are stored."""
        storage = LocalStorage(str(tmp_path / "store"))
        storage.save("a.bin", b"\x00\x01")
        storage.save("nested/b.txt", "hello")
        storage.save("c.json", {"z": 1, "a": 2})

        assert storage.load("a.bin") == b"\x00\x01"
        assert storage.load("nested/b.txt") == b"hello"
        assert json.loads(storage.load("c.json")) == {"a": 2, "z": 1}

    def test_missing_key(self, tmp_path):
        """Test loading a missing key returns None."""
        storage = LocalStorage(str(tmp_path))
        assert storage.load("nope") is None

    def test_append_lines(self, tmp_path):
        """Test appended lines are newline terminated."""
        storage = LocalStorage(str(tmp_path))
        storage.append_lines("log.ndjson", ["one", "two\n"])
        storage.append_lines("log.ndjson", ["three"])
        assert storage.load("log.ndjson").decode() == "one\ntwo\nthree\n"


@pytest.mark.unit
class TestResultFiles:
    """Tests for NDJSON result files."""

    def test_append_and_load(self, tmp_path):
        """Test records accumulate in order."""
        path = tmp_path / "out" / "results.ndjson"
        append_record(path, _record(1))
        append_record(path, _record(2))

        records = load_records(path)
        assert [r.seed for r in records] == [1, 2]
        assert len(path.read_text().splitlines()) == 2

    def test_missing_file(self, tmp_path):
        """Test a missing result file raises."""
        with pytest.raises(FileNotFoundError):
            load_records(tmp_path / "absent.ndjson")


@pytest.mark.unit
class TestSampleLog:
    """Tests for shadow sample logs."""

    def test_write_and_read(self, tmp_path, rng):
        """Test a logged dataset reads back with the same samples."""
        rho = np.eye(2) / 2
        dataset = sample_shadows(rho, EnsembleSpec.stabilizer_states(1), 5, rng)
        path = tmp_path / "samples.ndjson"
        write_sample_log(path, dataset)

        assert len(path.read_text().splitlines()) == 5
        restored = read_sample_log(path)
        assert isinstance(restored, ShadowDataset)
        assert len(restored) == 5
        assert restored.to_records() == dataset.to_records()

    def test_rewrite_replaces(self, tmp_path, rng):
        """Test writing again replaces the previous log."""
        rho = np.eye(2) / 2
        path = tmp_path / "samples.ndjson"
        write_sample_log(path, sample_shadows(rho, EnsembleSpec.stabilizer_states(1), 4, rng))
        write_sample_log(path, sample_shadows(rho, EnsembleSpec.stabilizer_states(1), 2, rng))
        assert len(read_sample_log(path)) == 2

    def test_missing_log(self, tmp_path):
        """Test a missing sample log raises."""
        with pytest.raises(FileNotFoundError, match="No sample log"):
            read_sample_log(tmp_path / "none.ndjson")
