"""CSV/JSON writers with a reproducibility header, and matching readers.

Floats are written with 17 significant digits so every value re-parses to
the identical double. Missing values are written as empty CSV cells and
JSON ``null``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__

TOOL = "eda-lab"


def metadata(config_sha256: str, seed: int | None, **extra) -> dict:
    meta = {"tool": TOOL, "version": __version__, "config_sha256": config_sha256, "seed": seed}
    meta.update(extra)
    return meta


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        text = format(v, ".17g")
        return text if any(c in text for c in ".e") else text + ".0"
    return str(v)


def parse_value(s: str) -> Any:
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def render_csv(rows: Iterable[dict], columns: Sequence[str], meta: dict) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={format_value(v)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def render_json(payload: dict, meta: dict) -> str:
    return json.dumps(_jsonable({"metadata": meta, **payload}), indent=2, sort_keys=False) + "\n"


def write_table(path: Path, rows: list[dict], columns: Sequence[str], meta: dict, fmt: str) -> Path:
    """Write ``rows`` as CSV, or as JSON under a ``rows`` key, depending on ``fmt``."""
    path = Path(path).with_suffix("." + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path.write_text(render_csv(rows, columns, meta))
    else:
        table = [{c: row.get(c) for c in columns} for row in rows]
        path.write_text(render_json({"columns": list(columns), "rows": table}, meta))
    return path


def write_json(path: Path, payload: dict, meta: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_json(payload, meta))
    return path


def read_csv(path: Path) -> tuple[dict, list[dict]]:
    """Return ``(metadata, rows)`` with values parsed back to int/float/None."""
    meta, body = {}, []
    for line in Path(path).read_text().splitlines(keepends=True):
        if line.startswith("# "):
            key, _, val = line[2:].rstrip("\n").partition("=")
            meta[key] = parse_value(val)
        else:
            body.append(line)
    reader = csv.reader(body)
    try:
        header = next(reader)
    except StopIteration:
        return meta, []
    rows = [dict(zip(header, map(parse_value, rec))) for rec in reader]
    return meta, rows


def read_table(path: Path) -> tuple[dict, list[dict]]:
    path = Path(path)
    if path.suffix == ".json":
        data = json.loads(path.read_text())
        return data["metadata"], data["rows"]
    return read_csv(path)
