"""Machine-readable run reports: JSON documents plus CSV value tables.

The JSON report is deterministic for a fixed scenario, resolutions, and seed;
wall-clock timings are confined to the `timings` section so consumers can
compare reports byte-for-byte after dropping that one key.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

REPORT_SCHEMA_VERSION = 1


def new_report(kind: str, scenario_doc: dict, seed: int | None = None) -> dict:
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": kind,
        "scenario": scenario_doc,
        "checks": [],
        "pass": True,
        "outputs": {"csv": [], "figures": []},
        "timings": {},
    }
    if seed is not None:
        report["seed"] = seed
    return report


def add_check(report: dict, name: str, value, tolerance, passed: bool | None = None,
              comparison: str = "<="):
    """Record one pass/fail check; by default value <= tolerance must hold."""
    if passed is None:
        passed = (value <= tolerance) if comparison == "<=" else (value >= tolerance)
    report["checks"].append({
        "name": name,
        "value": None if value is None else float(value),
        "tolerance": None if tolerance is None else float(tolerance),
        "comparison": comparison,
        "pass": bool(passed),
    })
    if not passed:
        report["pass"] = False
    return passed


def write_report(report: dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return path


def strip_timings(report: dict) -> dict:
    out = dict(report)
    out.pop("timings", None)
    return out


def write_csv(path: Path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    return path
