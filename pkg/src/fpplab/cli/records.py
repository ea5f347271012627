"""Experiment records: JSON lines as the source of truth, TSV/CSV derived."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


def _clean(v):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "item"):  # numpy scalars
        return _clean(v.item())
    return v


def _unclean(v):
    if v in ("nan", "inf", "-inf"):
        return float(v)
    return v


@dataclass
class ExperimentRecord:
    experiment: str
    config_hash: str
    d: int
    dist: str
    seed: int
    point: dict  # grid point, e.g. {"n": 16} or {"lambda": -0.5}
    statistic: str
    value: float
    stderr: float | None = None
    ci: tuple[float, float] | None = None
    aux: dict = field(default_factory=dict)
    certified: bool = True
    timestamp: float = 0.0

    def payload(self) -> dict:
        out = _clean(asdict(self))
        out.pop("timestamp")
        return out

    def payload_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True)

    def to_json(self) -> str:
        out = self.payload()
        out["timestamp"] = self.timestamp
        return json.dumps(out, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "ExperimentRecord":
        data = json.loads(line)
        data["value"] = _unclean(data["value"])
        if data.get("stderr") is not None:
            data["stderr"] = _unclean(data["stderr"])
        if data.get("ci") is not None:
            data["ci"] = tuple(_unclean(c) for c in data["ci"])
        return cls(**data)


def stamp(records: Iterable[ExperimentRecord]) -> list[ExperimentRecord]:
    now = time.time()
    out = list(records)
    for r in out:
        r.timestamp = now
    return out


def write_jsonl(records: Iterable[ExperimentRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def read_jsonl(path) -> list[ExperimentRecord]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [ExperimentRecord.from_json(line) for line in lines if line.strip()]


# ---------------------------------------------------------------------------
# plot exports
# ---------------------------------------------------------------------------

PLOT_COLUMNS = {
    "tail": ("t", "t_squared", "log_p", "ci_lo", "ci_hi"),
    "shape": ("angle", "t", "radius"),
    "generic": ("experiment", "statistic", "point", "value", "stderr"),
}


class PlotError(ValueError):
    pass


def _num(v) -> str:
    if v is None:
        return "nan"
    return repr(float(v))


def plot_rows(records: Sequence[ExperimentRecord], kind: str) -> list[tuple]:
    if kind not in PLOT_COLUMNS:
        raise PlotError(f"unknown plot kind {kind!r}; choose from {', '.join(PLOT_COLUMNS)}")
    names = {r.experiment for r in records}
    if len(names) > 1:
        raise PlotError(f"records mix experiments: {sorted(names)}")
    rows = []
    for r in records:
        if kind == "tail":
            if r.statistic != "tail":
                continue
            t = float(r.point["t"])
            p = float(r.value)
            lo, hi = r.ci if r.ci else (math.nan, math.nan)
            rows.append((t, t * t, math.log(p) if p > 0 else -math.inf, lo, hi))
        elif kind == "shape":
            if r.statistic != "outer_radius":
                continue
            rows.append((float(r.aux["angle"]), float(r.point["t"]), float(r.value)))
        else:
            point = ";".join(f"{k}={v}" for k, v in sorted(r.point.items()))
            rows.append((r.experiment, r.statistic, point, r.value, r.stderr))
    return rows


def emit_plot_data(records: Sequence[ExperimentRecord], kind: str, path=None, sep: str = "\t") -> str:
    """Write a header line plus one row per plotted record; returns the text."""
    cols = PLOT_COLUMNS.get(kind)
    rows = plot_rows(records, kind)
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=sep, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([x if isinstance(x, str) else _num(x) for x in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def parse_plot_data(text: str, sep: str = "\t") -> tuple[tuple[str, ...], list[tuple]]:
    reader = csv.reader(io.StringIO(text), delimiter=sep)
    header = tuple(next(reader))
    rows = []
    for raw in reader:
        rows.append(tuple(_parse_cell(c) for c in raw))
    return header, rows


def _parse_cell(c: str):
    try:
        return float(c)
    except ValueError:
        return c
