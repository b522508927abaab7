"""
Report tables

Every cell is an exact string from the field printer, so a text report and
its JSON sidecar are byte-identical between runs on the same input.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

logger = logging.getLogger(__name__)

MAX_ROWS = 1000


def make_table(rows: Sequence[Dict[str, str]], columns: Optional[List[str]] = None) -> pd.DataFrame:
    """DataFrame of string cells; `columns` fixes the order (and the header of an empty table)."""
    df = pd.DataFrame(list(rows), columns=columns)
    return df.fillna("").astype(str) if len(df) else df


def with_source(df: pd.DataFrame, source: str) -> pd.DataFrame:
    """Add the `expected_source` provenance column."""
    df = df.copy()
    df["expected_source"] = source
    return df


def df_to_json_string(df: pd.DataFrame, title: str = "", max_rows: int = MAX_ROWS) -> str:
    """
    Convert a report table to the JSON sidecar format.

    Args:
        df: table to convert
        title: report title
        max_rows: maximum rows to include

    Returns:
        JSON object with title, shape, columns and data, keys sorted
    """
    result = {
        "title": title,
        "shape": {"rows": len(df), "columns": len(df.columns)},
        "columns": list(df.columns),
        "data": df.head(max_rows).to_dict(orient="records"),
    }
    if len(df) > max_rows:
        result["warning"] = f"Result truncated to {max_rows} rows (total: {len(df)} rows)"
    return json.dumps(result, indent=2, sort_keys=True, default=str)


@dataclass
class Report:
    """A titled table with an overall pass flag."""

    title: str
    table: pd.DataFrame
    passed: bool = True
    notes: List[str] = field(default_factory=list)

    def to_text(self) -> str:
        body = self.table.to_string(index=False) if len(self.table) else "(no rows)"
        lines = [self.title, body] + self.notes
        return "\n".join(lines) + "\n"

    def to_json(self, max_rows: int = MAX_ROWS) -> str:
        return df_to_json_string(self.table, self.title, max_rows)

    def write(self, output: Optional[Path] = None) -> str:
        """
        Text of the report; with `output`, also write it there and the JSON
        sidecar next to it with suffix `.json`.
        """
        text = self.to_text()
        if output is not None:
            output = Path(output)
            output.write_text(text)
            sidecar = output.with_suffix(".json")
            sidecar.write_text(self.to_json() + "\n")
            logger.info("wrote %s and %s", output, sidecar)
        return text
