"""
CSV and JSON serialization of result tables and reports
"""

import io
import json
import math
import sys
from typing import Any, Iterable, List, Optional, Tuple

import pandas as pd
from pydantic import BaseModel

FLOAT_FORMAT = "%.17g"


def _plain(value: Any) -> Any:
    """JSON-ready copy: NaN becomes null, numpy scalars become Python numbers"""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ExportService:
    """Service for writing tables and reports"""

    @staticmethod
    def table_to_csv(table: pd.DataFrame, notes: Iterable[str] = ()) -> str:
        """CSV with 17 significant digits; notes become leading '# ' comment lines"""
        buffer = io.StringIO()
        for note in notes:
            buffer.write(f"# {note}\n")
        table.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return buffer.getvalue()

    @staticmethod
    def table_to_json(table: pd.DataFrame, notes: Iterable[str] = ()) -> str:
        records = _plain(table.to_dict(orient="records"))
        return json.dumps({"notes": list(notes), "rows": records}, indent=2, allow_nan=False)

    @staticmethod
    def to_json(payload: Any) -> str:
        """Reports and plain mappings as JSON with full double precision"""
        if isinstance(payload, BaseModel):
            payload = payload.flat() if hasattr(payload, "flat") else payload.model_dump()
        return json.dumps(_plain(payload), indent=2, allow_nan=False)

    @staticmethod
    def render(table: pd.DataFrame, fmt: str, notes: Iterable[str] = ()) -> str:
        if fmt == "json":
            return ExportService.table_to_json(table, notes)
        return ExportService.table_to_csv(table, notes)

    @staticmethod
    def read_csv(text: str) -> Tuple[pd.DataFrame, List[str]]:
        """Parse our own CSV back, returning the table and its comment notes"""
        notes = [line[2:] for line in text.splitlines() if line.startswith("# ")]
        table = pd.read_csv(io.StringIO(text), comment="#", float_precision="round_trip",
                            keep_default_na=True)
        return table, notes

    @staticmethod
    def write(text: str, path: Optional[str] = None) -> None:
        """Write to a file, or to stdout when no path is given"""
        if path is None:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")
            return
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")
