"""Unit tests for plot-data export."""

import pytest

from spacetime_qc.harness.export import SERIES_COLUMNS, emit_plot_data, export_to_tsv
from spacetime_qc.harness.schemas import ExperimentKind, ResultRecord


def _record(series):
    return ResultRecord(
        digest="f" * 64,
        kind=ExperimentKind.SPACETIME_RANDOM,
        seed=0,
        version="1.0.0",
        series=series,
    )


@pytest.mark.unit
class TestExportToTsv:
    """Tests for export_to_tsv."""

    def test_header_and_rows(self):
        """Test a header row followed by tab-separated values."""
        text = export_to_tsv([{"a": 1, "b": "x"}, {"a": 2, "b": "y"}])
        assert text == "a\tb\n1\tx\n2\ty\n"

    def test_column_order_and_missing(self):
        """Test explicit columns, missing keys and ignored extras."""
        text = export_to_tsv([{"b": 2, "c": 3}], columns=["a", "b"])
        assert text.splitlines() == ["a\tb", "\t2"]

    def test_floats_use_repr(self):
        """Test floats keep full precision."""
        text = export_to_tsv([{"x": 0.1 + 0.2}])
        assert text.splitlines()[1] == repr(0.1 + 0.2)

    def test_nested_values_are_json(self):
        """Test lists are JSON encoded."""
        text = export_to_tsv([{"ranks": [7, 7]}])
        assert text.splitlines()[1] == "[7, 7]"

    def test_empty(self):
        """Test empty data without columns gives a bare newline."""
        assert export_to_tsv([]) == "\n"


@pytest.mark.unit
class TestEmitPlotData:
    """Tests for emit_plot_data."""

    def test_tradeoff_series(self):
        """Test the tradeoff table columns."""
        record = _record({"tradeoff": [{"k": 2, "qubits": 8, "depth": 7}, {"k": 3, "qubits": 12, "depth": 6}]})
        lines = emit_plot_data(record, "tradeoff").splitlines()
        assert lines == ["k\tqubits\tdepth", "2\t8\t7", "3\t12\t6"]

    def test_header_only_when_missing(self):
        """Test a missing series or record yields just the header."""
        assert emit_plot_data(_record({}), "convergence") == "N\tabs_error\n"
        assert emit_plot_data(None, "ranks") == "\t".join(SERIES_COLUMNS["ranks"]) + "\n"

    def test_unknown_series(self):
        """Test unknown series names raise."""
        with pytest.raises(ValueError, match="Unknown series"):
            emit_plot_data(_record({}), "histogram")
