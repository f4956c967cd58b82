"""File formats: dataset CSV + JSON sidecar, curve CSV, metrics rows, models.

Every CSV may start with ``#`` comment lines carrying the resolved run
configuration; readers skip them. Floats are written with 6 decimals.
Files are written to a temporary sibling and renamed into place.
"""

import json
import os
import re
import tempfile
from pathlib import Path

import numpy as np

from .channel import ChannelParams, Dataset
from .errors import InvalidParameterError
from .metrics import CSV_HEADER


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def comment_block(config):
    """``#``-prefixed lines holding ``config`` as canonical JSON."""
    if not config:
        return ""
    body = json.dumps(config, sort_keys=True, indent=1)
    return "".join(f"# {line}\n" for line in body.splitlines())


def read_comment_config(path):
    """Parse the JSON comment header written by :func:`comment_block`."""
    lines = []
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            lines.append(line[2:] if line.startswith("# ") else line[1:])
    return json.loads("".join(lines)) if lines else {}


def dataset_header(n_bs):
    cols = ["idx", "label", "x_c", "y_c"]
    cols += [f"u_{i}" for i in range(1, n_bs + 1)]
    cols += [f"y_{i}" for i in range(1, n_bs + 1)]
    return ",".join(cols)


def dataset_csv(dataset, config=None, extra_columns=None):
    """Render a dataset as CSV text; ``extra_columns`` maps name -> int array."""
    extra_columns = extra_columns or {}
    header = dataset_header(dataset.n_bs)
    if extra_columns:
        header += "," + ",".join(extra_columns)
    out = [comment_block(config), header, "\n"]
    for i in range(len(dataset)):
        row = [str(i), str(int(dataset.labels[i]))]
        row += [f"{v:.6f}" for v in dataset.claimed_xy[i]]
        row += [f"{v:.6f}" for v in dataset.claimed_toa[i]]
        row += [f"{v:.6f}" for v in dataset.observed_toa[i]]
        row += [str(int(col[i])) for col in extra_columns.values()]
        out.append(",".join(row))
        out.append("\n")
    return "".join(out)


def dataset_metadata(dataset):
    return {
        "seed": dataset.seed,
        "n": len(dataset),
        "malicious_fraction": dataset.malicious_fraction,
        "thermal_noise_std_ns": dataset.params.thermal_noise_std,
        "nlos_std_ns": dataset.params.nlos_std,
        "n_bs": dataset.n_bs,
    }


def sidecar_path(csv_path):
    return Path(csv_path).with_suffix(".json")


def write_dataset(path, dataset, config=None, extra_columns=None):
    """Write ``<path>`` and its ``.json`` metadata sidecar."""
    path = atomic_write(path, dataset_csv(dataset, config, extra_columns))
    atomic_write(sidecar_path(path), json.dumps(dataset_metadata(dataset), sort_keys=True, indent=2) + "\n")
    return path


def read_dataset(path):
    """Load a dataset CSV (and its sidecar, if present)."""
    path = Path(path)
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    if not lines:
        raise InvalidParameterError(f"{path}: no header row")
    header = lines[0].strip().split(",")
    u_cols = [i for i, c in enumerate(header) if re.fullmatch(r"u_\d+", c)]
    y_cols = [i for i, c in enumerate(header) if re.fullmatch(r"y_\d+", c)]
    if header[:4] != ["idx", "label", "x_c", "y_c"] or not u_cols or len(u_cols) != len(y_cols):
        raise InvalidParameterError(f"{path}: not a dataset CSV (header {header[:4]})")
    rows = np.array([ln.strip().split(",") for ln in lines[1:] if ln.strip()], dtype=float)
    rows = rows.reshape(-1, len(header))

    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
    params = ChannelParams(
        thermal_noise_std=meta.get("thermal_noise_std_ns") or 300.0,
        nlos_std=meta.get("nlos_std_ns") or 0.0,
    )
    return Dataset(
        claimed_xy=rows[:, 2:4],
        claimed_toa=rows[:, u_cols],
        observed_toa=rows[:, y_cols],
        labels=rows[:, 1].astype(np.int64),
        params=params,
        seed=meta.get("seed"),
        malicious_fraction=meta.get("malicious_fraction"),
    )


CURVE_HEADER = "second,total_error,alpha,beta"


def _f6(value):
    return "nan" if value is None else f"{value:.6f}"


def curve_csv(curve, config=None):
    out = [comment_block(config), CURVE_HEADER, "\n"]
    for p in curve.points:
        out.append(f"{p.second},{_f6(p.total_error)},{_f6(p.alpha)},{_f6(p.beta)}\n")
    return "".join(out)


def read_curve(path):
    """Rows of ``(second, total_error, alpha, beta)`` as a float array."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return np.array([ln.strip().split(",") for ln in lines[1:] if ln.strip()], dtype=float)


def metrics_csv(rows, config=None):
    """``rows`` are strings produced by :meth:`MetricsReport.csv_row`."""
    return comment_block(config) + CSV_HEADER + "\n" + "".join(r + "\n" for r in rows)


def read_metrics(path):
    """List of dicts, one per metrics row."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if not ln.startswith("#") and ln.strip()]
    keys = lines[0].split(",")
    out = []
    for ln in lines[1:]:
        rec = dict(zip(keys, ln.split(",")))
        for k in keys[1:]:
            rec[k] = float(rec[k])
        out.append(rec)
    return out
