"""
Deterministic writers for figure data: CSV with `# key=value` header lines,
JSON documents, and JSON-lines trajectory dumps.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)


@dataclass
class Records:
    name: str
    records: list[dict] = field(default_factory=list)


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _plain(value):
    if isinstance(value, float):
        return float(format(value, ".17g"))
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def write_csv(path: Path, header: dict, table: Table) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        for key, value in header.items():
            handle.write(f"# {key}={format_value(value)}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_value(value) for value in row])
    return path


def write_json(path: Path, header: dict, table: Table) -> Path:
    document = {
        "header": _plain(header),
        "columns": table.columns,
        "rows": [_plain(list(row)) for row in table.rows],
    }
    path.write_text(json.dumps(document, sort_keys=False) + "\n", encoding="utf-8")
    return path


def write_json_lines(path: Path, header: dict, records: Records) -> Path:
    with path.open("w", encoding="utf-8") as handle:
        handle.write(json.dumps({"header": _plain(header)}) + "\n")
        for record in records.records:
            handle.write(json.dumps(_plain(record)) + "\n")
    return path


def write_panel(directory: Path, stem: str, header: dict, panel: Table | Records, output_format: str) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    if isinstance(panel, Records):
        path = write_json_lines(directory / f"{stem}.jsonl", header, panel)
    elif output_format == "json":
        path = write_json(directory / f"{stem}.json", header, panel)
    else:
        path = write_csv(directory / f"{stem}.csv", header, panel)
    logger.info("wrote %s", path)
    return path
