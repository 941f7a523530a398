"""Unit tests for the seeded worker pool."""

import numpy as np
import pytest

from spacetime_qc.harness.batch import (
    CHUNK_STREAM,
    REFERENCE_STREAM,
    TRIAL_STREAM,
    BatchProcessor,
    TrialStatus,
    chunk_rng,
    stream_rng,
    trial_rng,
)
from spacetime_qc.harness.schemas import ExperimentKind

KIND = ExperimentKind.TELEPORT_VERIFY


def _draw(index, rng):
    return index, float(rng.random())


@pytest.mark.unit
class TestStreams:
    """Tests for counter-based random streams."""

    def test_reproducible(self):
        """Test the same key gives the same draws."""
        a = trial_rng(7, KIND, 3).random(5)
        b = trial_rng(7, KIND, 3).random(5)
        assert np.array_equal(a, b)

    def test_keys_separate_streams(self):
        """Test seed, kind, stream and index all matter."""
        base = stream_rng(7, KIND, TRIAL_STREAM, 0).random()
        assert stream_rng(8, KIND, TRIAL_STREAM, 0).random() != base
        assert stream_rng(7, ExperimentKind.ACCDIM, TRIAL_STREAM, 0).random() != base
        assert stream_rng(7, KIND, REFERENCE_STREAM, 0).random() != base
        assert stream_rng(7, KIND, TRIAL_STREAM, 1).random() != base

    def test_helpers_match_stream_rng(self):
        """Test trial and chunk helpers use their stream tags."""
        assert trial_rng(1, KIND, 2).random() == stream_rng(1, KIND, TRIAL_STREAM, 2).random()
        assert chunk_rng(1, KIND, 2, 3).random() == stream_rng(1, KIND, CHUNK_STREAM, 2, 3).random()


@pytest.mark.unit
class TestBatchProcessor:
    """Tests for BatchProcessor."""

    def test_results_in_index_order(self):
        """Test results come back sorted by index."""
        results = BatchProcessor(max_workers=3).run(KIND, 11, 20, _draw)
        assert [r[0] for r in results] == list(range(20))

    def test_worker_count_does_not_change_results(self):
        """Test one worker and four workers agree exactly."""
        serial = BatchProcessor(max_workers=1).run(KIND, 11, 16, _draw)
        parallel = BatchProcessor(max_workers=4).run(KIND, 11, 16, _draw)
        assert serial == parallel

    def test_rng_is_the_trial_stream(self):
        """Test fn receives the (seed, kind, stream, index) generator."""
        results = BatchProcessor().run(KIND, 5, 3, _draw, stream=REFERENCE_STREAM)
        expected = stream_rng(5, KIND, REFERENCE_STREAM, 2).random()
        assert results[2][1] == expected

    def test_empty_batch(self):
        """Test zero trials returns an empty list."""
        assert BatchProcessor(max_workers=2).run(KIND, 0, 0, _draw) == []

    def test_lowest_failing_index_is_raised(self):
        """Test the first failure by index is re-raised."""

        def flaky(index, rng):
            if index in (3, 7):
                raise RuntimeError(f"trial {index}")
            return index

        with pytest.raises(RuntimeError, match="trial 3"):
            BatchProcessor(max_workers=4).run(KIND, 0, 10, flaky)

    def test_invalid_worker_count(self):
        """Test max_workers must be positive."""
        with pytest.raises(ValueError, match="max_workers must be positive"):
            BatchProcessor(max_workers=0)

    def test_status_values(self):
        """Test status strings."""
        assert TrialStatus.COMPLETED.value == "completed"
        assert TrialStatus.FAILED == "failed"
