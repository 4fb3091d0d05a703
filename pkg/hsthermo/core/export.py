"""
Result Export Functionality for hsthermo

Sweep tables and check reports are written as CSV or JSON through pandas.
CSV floats use scientific notation with 12 significant digits.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from .types import CheckReport, OutputFormat, SweepResult

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.11e"
REPORT_COLUMNS = ["name", "lhs", "rhs", "passed", "detail"]


class ResultExporter:
    """Writes sweep results and check reports to files"""

    def __init__(self, output_format: Union[OutputFormat, str] = OutputFormat.CSV):
        """
        Initialize ResultExporter

        Args:
            output_format: OutputFormat or its string value ("csv" / "json")
        """
        self.output_format = OutputFormat(output_format)

    def sweep_dataframe(self, result: SweepResult) -> pd.DataFrame:
        """
        Create pandas DataFrame from a SweepResult

        Args:
            result: rows in grid order

        Returns:
            DataFrame with the result's columns in their fixed order
        """
        records = [row.to_dict() for row in result.rows]
        return pd.DataFrame.from_records(records, columns=list(result.columns))

    def report_dataframe(self, report: CheckReport) -> pd.DataFrame:
        records = [row.to_dict() for row in report.rows]
        return pd.DataFrame.from_records(records, columns=REPORT_COLUMNS)

    def render(self, payload: Union[SweepResult, CheckReport]) -> str:
        """Serialized text of a result in the exporter's format"""
        if self.output_format is OutputFormat.JSON:
            return payload.to_json() + "\n"
        if isinstance(payload, SweepResult):
            frame = self.sweep_dataframe(payload)
        else:
            frame = self.report_dataframe(payload)
        return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")

    def export_frame(self, frame: pd.DataFrame, path: Optional[str], metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Write a plain DataFrame (for example an N_max table) to path

        Args:
            frame: table to write, column order preserved
            path: destination file
            metadata: stored alongside the rows in JSON output

        Returns:
            Dictionary with export result information
        """
        if self.output_format is OutputFormat.JSON:
            payload = {"metadata": dict(metadata or {}), "rows": frame.to_dict(orient="records")}
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        else:
            text = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
        return self._write(text, path, len(frame), list(frame.columns))

    def export(self, payload: Union[SweepResult, CheckReport], path: Optional[str]) -> Dict[str, Any]:
        """
        Write a result to path

        Args:
            payload: SweepResult or CheckReport
            path: destination file; parent directories are created

        Returns:
            Dictionary with export result information
        """
        columns = list(payload.columns) if isinstance(payload, SweepResult) else list(REPORT_COLUMNS)
        return self._write(self.render(payload), path, len(payload.rows), columns)

    def _write(self, text: str, path: Optional[str], row_count: int, columns: List[str]) -> Dict[str, Any]:
        if not path:
            return {"success": False, "error": "No output path given", "file_path": None}
        try:
            file_path = Path(path)
            file_path.parent.mkdir(parents=True, exist_ok=True)
            file_path.write_text(text, encoding="utf-8")
        except OSError as exc:
            logger.error(f"Export to {path} failed: {exc}")
            return {"success": False, "error": f"Export failed: {exc}", "file_path": None}

        logger.info(f"Wrote {row_count} rows to {file_path}")
        return {
            "success": True,
            "file_path": str(file_path),
            "format": self.output_format.value,
            "row_count": row_count,
            "columns": columns,
        }
