"""
Report view for the gadget toolkit.
Renders result tables and summaries as CSV and JSON text.
"""
import json

import numpy as np

CSV_FLOAT_FORMAT = "%.12g"


def _jsonable(value):
    """
    Convert numpy scalars and arrays for json.dumps.
    """
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _clean(value):
    # NaN and infinities are not valid JSON
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (float, np.floating)) and not np.isfinite(value):
        return None
    return value


class ReportView:
    """
    View for experiment results.
    """

    def __init__(self, provenance):
        """
        Initialize the report view.

        Args:
            provenance: Mapping written as the CSV comment header
        """
        self.provenance = dict(provenance)

    def render_header(self):
        """
        '#'-prefixed provenance lines, in sorted key order.
        """
        return "".join(f"# {key}: {self.provenance[key]}\n" for key in sorted(self.provenance))

    def render_csv(self, table):
        """
        Render a result table with its provenance header.

        Args:
            table: pandas DataFrame

        Returns:
            CSV text with '.' decimals and ',' separators
        """
        body = table.to_csv(index=False, sep=",", lineterminator="\n", float_format=CSV_FLOAT_FORMAT)
        return self.render_header() + body

    def render_summary(self, summary):
        """
        Render a run summary as indented JSON.
        """
        return json.dumps(_clean(summary), indent=2, sort_keys=True, default=_jsonable) + "\n"

    @staticmethod
    def render_error(error):
        """
        One-line JSON for a toolkit error.
        """
        return json.dumps(error.to_dict(), sort_keys=True)
