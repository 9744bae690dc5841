"""On-disk run artifacts: CSV tables, PGM images, summary files.

All writes go through a temp file in the destination directory followed
by an atomic rename, so rerunning a command never leaves partial files.
Float formatting uses shortest round-trip repr, which keeps identical
runs byte-identical.
"""

from __future__ import annotations

import math
import os
import tempfile

import numpy as np

from .analysis import Autocorrelogram, RateMap
from .controller import EpisodeLog

TRAJECTORY_FORMAT = "mazecells.trajectory.v1"
RATEMAP_FORMAT = "mazecells.ratemap.v1"
AUTOCORR_FORMAT = "mazecells.autocorr.v1"
SWEEP_FORMAT = "mazecells.sweep.v1"
SUMMARY_FORMAT = "mazecells.summary.v1"

TRAJECTORY_COLUMNS = "tick,x,y,heading,vibration,x_color,y_out,w_color"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isnan(f):
            return "nan"
        return repr(f)
    return str(v)


def atomic_write_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_trajectory_csv(path: str, log: EpisodeLog) -> None:
    lines = [f"# {TRAJECTORY_FORMAT} {TRAJECTORY_COLUMNS}", TRAJECTORY_COLUMNS]
    for t in range(len(log)):
        lines.append(
            ",".join(
                (
                    str(int(log.ticks[t])),
                    _fmt(log.xs[t]),
                    _fmt(log.ys[t]),
                    _fmt(log.headings[t]),
                    _fmt(log.vibration[t]),
                    _fmt(log.x_color[t]),
                    str(int(log.y_out[t])),
                    _fmt(log.w_color[t]),
                )
            )
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def _write_matrix_csv(path: str, format_id: str, header_meta: str, values: np.ndarray) -> None:
    lines = [f"# {format_id} {header_meta}"]
    for row in values:
        lines.append(",".join(_fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_ratemap_csv(path: str, rm: RateMap) -> None:
    meta = (
        f"rows={rm.values.shape[0]} cols={rm.values.shape[1]} "
        f"bin_size={_fmt(rm.bin_size)} origin_x={_fmt(rm.origin_x)} origin_y={_fmt(rm.origin_y)}"
    )
    _write_matrix_csv(path, RATEMAP_FORMAT, meta, rm.values)


def write_autocorr_csv(path: str, ac: Autocorrelogram) -> None:
    meta = (
        f"rows={ac.values.shape[0]} cols={ac.values.shape[1]} "
        f"bin_size={_fmt(ac.bin_size)}"
    )
    _write_matrix_csv(path, AUTOCORR_FORMAT, meta, ac.values)


def write_pgm(path: str, values: np.ndarray) -> None:
    """8-bit ASCII portable graymap; NaN renders as 0, the rest scaled to 1..255."""
    v = np.asarray(values, dtype=np.float64)
    finite = np.isfinite(v)
    out = np.zeros(v.shape, dtype=np.int64)
    if finite.any():
        lo = float(v[finite].min())
        hi = float(v[finite].max())
        span = hi - lo
        if span <= 0.0:
            out[finite] = 255
        else:
            out[finite] = 1 + np.rint(254.0 * (v[finite] - lo) / span).astype(np.int64)
    lines = ["P2", f"{v.shape[1]} {v.shape[0]}", "255"]
    for row in out:
        lines.append(" ".join(str(int(x)) for x in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_sweep_csv(path: str, param_names: list[str], rows: list[dict]) -> None:
    metric_names = ["gridness", "peak_to_mean", "halfmax_area_bins", "coverage"]
    columns = ["index", "seed"] + list(param_names) + metric_names
    lines = [f"# {SWEEP_FORMAT} {','.join(columns)}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_summary(path: str, entries: dict) -> None:
    lines = [f"# {SUMMARY_FORMAT}"]
    for k, v in entries.items():
        lines.append(f"{k} = {_fmt(v)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_summary(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


def read_matrix_csv(path: str) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(v) for v in line.split(",")])
    return np.asarray(rows, dtype=np.float64)
