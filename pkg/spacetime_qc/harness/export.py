"""Plot-data export as tab-separated tables."""

import csv
import io
import json
from typing import Any, Dict, List, Optional

from .schemas import ResultRecord

# Column order of every series a record can carry.
SERIES_COLUMNS: Dict[str, List[str]] = {
    "tradeoff": ["k", "qubits", "depth"],
    "convergence": ["N", "abs_error"],
    "ranks": ["d", "max_rank", "stable_fraction", "lower_bound"],
    "bounds": ["m", "n", "d", "thm1_bound", "L", "in_domain", "swap_layers", "lower_bound"],
}


def export_to_tsv(data: List[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
    """
    Export records to a tab-separated string with a header row.

    Args:
        data: List of records to export
        columns: Column order (default: keys of the first record)

    Returns:
        TSV string; header only when ``data`` is empty
    """
    if columns is None:
        columns = list(data[0].keys()) if data else []

    output = io.StringIO()
    writer = csv.DictWriter(
        output, fieldnames=columns, delimiter="\t", lineterminator="\n", extrasaction="ignore"
    )
    writer.writeheader()
    for row in data:
        flat_row = {}
        for key in columns:
            value = row.get(key, "")
            if isinstance(value, (dict, list)):
                value = json.dumps(value)
            elif isinstance(value, float):
                value = repr(value)
            flat_row[key] = value
        writer.writerow(flat_row)
    return output.getvalue()


def emit_plot_data(record: Optional[ResultRecord], series: str) -> str:
    """Columnar table of one series of a record."""
    if series not in SERIES_COLUMNS:
        raise ValueError(f"Unknown series: {series!r}. Available: {sorted(SERIES_COLUMNS)}")
    rows = record.series.get(series, []) if record is not None else []
    return export_to_tsv(rows, SERIES_COLUMNS[series])
