"""Result files: CSV with ``#`` metadata lines, or JSON with a metadata block.

See docs/schemas.md for the column layouts. Floats are written with 12
significant digits in CSV; JSON keeps LLR columns as exact decimal strings.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

SCHEMA_VERSION = "1"
LLR_COLUMNS = frozenset({"L_U", "L_E", "L_R", "L_N", "L_R_final", "L_N_final", "L_U_final", "L_E_final"})


def fmt_number(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(v)


def _parse_cell(text: str) -> Any:
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


@dataclass
class ResultTable:
    columns: list
    rows: list
    metadata: dict

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def render_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA_VERSION}\n")
    buf.write("# metadata: " + json.dumps(table.metadata, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([fmt_number(v) for v in r])
    return buf.getvalue()


def _json_cell(col: str, v: Any) -> Any:
    if isinstance(v, float):
        if col in LLR_COLUMNS or not math.isfinite(v):
            return repr(v)
        return v
    return v


def render_json(table: ResultTable) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "metadata": table.metadata,
        "columns": table.columns,
        "rows": [[_json_cell(c, v) for c, v in zip(table.columns, r)] for r in table.rows],
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def write_table(table: ResultTable, path, fmt: str = "csv") -> None:
    text = render_json(table) if fmt == "json" else render_csv(table)
    Path(path).write_text(text)


def read_table(path) -> ResultTable:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        cols = doc["columns"]
        rows = []
        for r in doc["rows"]:
            rows.append([float(v) if c in LLR_COLUMNS and isinstance(v, str) else v for c, v in zip(cols, r)])
        return ResultTable(cols, rows, doc["metadata"])
    meta: dict = {}
    lines = []
    for line in text.splitlines():
        if line.startswith("# metadata: "):
            meta = json.loads(line[len("# metadata: "):])
        elif line.startswith("#"):
            continue
        else:
            lines.append(line)
    reader = csv.reader(lines)
    cols = next(reader)
    rows = [[_parse_cell(c) for c in r] for r in reader]
    return ResultTable(cols, rows, meta)


def aggregate(table: ResultTable, skip: Sequence[str] = ()) -> dict:
    """Per-column count, sum and mean of numeric cells, used for round-trip checks."""
    out = {}
    for j, c in enumerate(table.columns):
        if c in skip:
            continue
        vals = [r[j] for r in table.rows if isinstance(r[j], (int, float)) and not isinstance(r[j], bool)]
        if vals:
            s = math.fsum(vals)
            out[c] = (len(vals), s, s / len(vals))
    return out
