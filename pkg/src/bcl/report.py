"""Report writers: versioned JSON, fixed-column CSV, and a one-line SVG chart.

Payload files never contain timestamps, so reruns with the same inputs and
seed are byte-identical; run metadata goes to a ``<name>.meta.json`` sidecar.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import time
from pathlib import Path

import numpy as np

SCHEMA = "bcl/1"
CSV_COLUMNS = ("suite", "param", "lhs", "rhs", "slack", "status")


class ReportError(OSError):
    """The report could not be written (unwritable path and the like)."""


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def estimate_rows(estimates, suite: str = "compute") -> list[dict]:
    """One CSV row per estimate; ``lhs`` holds the value, ``rhs``/``slack`` are empty."""
    return [{"suite": suite, "param": f"{e.kind} N={e.N}" if e.N is not None else e.kind, "lhs": e.value,
             "rhs": "", "slack": "", "status": e.bound_side} for e in estimates]


def report_rows(reports) -> list[dict]:
    rows = []
    for rep in reports:
        for r in rep.rows:
            rows.append({"suite": rep.suite, "param": r.param, "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack,
                         "status": r.status})
    return rows


def render_json(kind: str, payload) -> str:
    doc = {"schema": SCHEMA, "kind": kind, "payload": _clean(payload)}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()})
    return buf.getvalue()


def render_svg(xs, ys, xlabel: str, ylabel: str, width: int = 480, height: int = 320) -> str:
    """Single polyline with labeled axes; one vertex per (x, y) pair."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size == 0:
        raise ValueError("need matching, nonempty x and y columns")
    pad = 50

    def scale(v, lo, hi, a, b):
        return (a + b) / 2 if hi == lo else a + (v - lo) * (b - a) / (hi - lo)

    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    pts = " ".join(f"{scale(x, x0, x1, pad, width - pad):.2f},{scale(y, y0, y1, height - pad, pad):.2f}"
                   for x, y in zip(xs, ys))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'  <line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>\n'
        f'  <line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>\n'
        f'  <text x="{width / 2}" y="{height - 12}" text-anchor="middle">{xlabel}</text>\n'
        f'  <text x="14" y="{height / 2}" text-anchor="middle" transform="rotate(-90 14 {height / 2})">{ylabel}</text>\n'
        f'  <text x="{pad}" y="{height - pad + 16}" text-anchor="middle">{x0:.3g}</text>\n'
        f'  <text x="{width - pad}" y="{height - pad + 16}" text-anchor="middle">{x1:.3g}</text>\n'
        f'  <text x="{pad - 6}" y="{height - pad}" text-anchor="end">{y0:.3g}</text>\n'
        f'  <text x="{pad - 6}" y="{pad}" text-anchor="end">{y1:.3g}</text>\n'
        f'  <polyline fill="none" stroke="steelblue" stroke-width="2" points="{pts}"/>\n'
        "</svg>\n"
    )


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
    return path


def emit_report(out: str | Path, kind: str, payload, rows, fmt: str = "json", svg=None,
                meta: dict | None = None) -> list[Path]:
    """Write ``out`` (``.json`` or ``.csv`` per ``fmt``), an optional SVG and the metadata sidecar.

    ``svg`` is ``(xs, ys, xlabel, ylabel)`` or None.
    """
    if fmt not in ("json", "csv"):
        raise ValueError(f"format must be json or csv, got {fmt!r}")
    base = Path(out)
    if base.suffix in (".json", ".csv"):
        base = base.with_suffix("")
    written = []
    if fmt == "json":
        written.append(_write(base.with_suffix(".json"), render_json(kind, payload)))
    else:
        written.append(_write(base.with_suffix(".csv"), render_csv(rows)))
    if svg is not None:
        written.append(_write(base.with_suffix(".svg"), render_svg(*svg)))
    info = {"schema": SCHEMA, "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "python": platform.python_version()}
    info.update(meta or {})
    written.append(_write(Path(f"{base}.meta.json"), json.dumps(_clean(info), indent=2) + "\n"))
    return written
