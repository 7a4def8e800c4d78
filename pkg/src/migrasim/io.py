"""Result files: monthly series CSV, JSON summary, per-worker state CSV.

Floats are written with ``repr`` (shortest round-trip decimal); lines end in LF.
"""

from __future__ import annotations

import csv
import io
import json
import os

from .config import SCHEMA_VERSION, to_dict
from .engine import SimResult, lattice_coordinates

SERIES_COLUMNS = ("t_days", "N_u", "v", "bv", "spread", "inflow", "outflow")
WORKER_COLUMNS = ("worker", "row", "col", "initial_sector", "final_sector", "hukou", "final_x")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def series_csv(result: SimResult) -> str:
    rows = (
        (float(r.t_days), r.n_urban, r.v, r.bv, float(r.spread), r.inflow, r.outflow)
        for r in result.series
    )
    return _csv_text(SERIES_COLUMNS, rows)


def workers_csv(result: SimResult) -> str:
    coords = lattice_coordinates(result.config.n_workers)
    sector = {True: "urban", False: "rural"}
    rows = (
        (
            i,
            int(coords[i, 0]),
            int(coords[i, 1]),
            sector[bool(result.initial_roster.urban[i])],
            sector[bool(result.roster.urban[i])],
            bool(result.roster.hukou[i]),
            float(result.state.x[i]),
        )
        for i in range(result.config.n_workers)
    )
    return _csv_text(WORKER_COLUMNS, rows)


def summary_dict(result: SimResult) -> dict:
    v = result.verdict
    return {
        "schema_version": SCHEMA_VERSION,
        "config": to_dict(result.config),
        "status": result.status,
        "diverged": result.diverged,
        "verdict": {
            "has_spanning_tree": v.has_spanning_tree,
            "lambda2_re": v.lambda2_re,
            "consensus_predicted": v.consensus_predicted,
        },
        "summary": result.summary,
    }


def summary_json(result: SimResult) -> str:
    return json.dumps(summary_dict(result), indent=2) + "\n"


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_result(result: SimResult, out_dir, fmt="both", prefix="") -> list[str]:
    """Write the requested files into ``out_dir``; returns their paths."""
    if fmt not in ("csv", "json", "both"):
        raise ValueError(f"format must be csv, json or both, got {fmt!r}")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        for name, text in (("series.csv", series_csv(result)), ("workers.csv", workers_csv(result))):
            path = os.path.join(out_dir, prefix + name)
            _write(path, text)
            written.append(path)
    if fmt in ("json", "both"):
        path = os.path.join(out_dir, prefix + "summary.json")
        _write(path, summary_json(result))
        written.append(path)
    return written
