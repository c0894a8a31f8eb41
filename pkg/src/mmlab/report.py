"""CSV and JSON emission of experiment reports.

Output is a pure function of the report contents: floats are written with
``repr``, keys in a fixed order, and wall-clock time only on request.  Emitting
the same report twice therefore gives byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .errors import InvalidArgument
from .suites import ExperimentReport

__all__ = ["emit_report", "report_from_dict", "report_to_dict", "render_report"]


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_to_dict(report: ExperimentReport, include_timing: bool = False) -> dict:
    out = {
        "suite": report.suite,
        "anchor": report.anchor,
        "seed": report.seed,
        "config": report.config,
        "columns": list(report.columns),
        "rows": [list(r) for r in report.rows],
        "aggregates": report.aggregates,
        "notes": list(report.notes),
    }
    if include_timing:
        out["wall_clock"] = report.wall_clock
    return out


def report_from_dict(data: dict) -> ExperimentReport:
    return ExperimentReport(
        suite=data["suite"],
        config=data["config"],
        columns=tuple(data["columns"]),
        rows=[tuple(r) for r in data["rows"]],
        aggregates=data["aggregates"],
        seed=int(data["seed"]),
        notes=tuple(data.get("notes", ())),
        anchor=data.get("anchor", ""),
        wall_clock=float(data.get("wall_clock", 0.0)),
    )


def render_report(report: ExperimentReport, fmt: str = "csv", include_timing: bool = False) -> str:
    if fmt == "json":
        return json.dumps(report_to_dict(report, include_timing), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()
    raise InvalidArgument(f"unknown report format {fmt!r}")


def emit_report(report: ExperimentReport, fmt: str, path=None, include_timing: bool = False) -> str:
    """Render ``report`` and write it to ``path`` (if given); returns the text."""
    text = render_report(report, fmt, include_timing)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return text
