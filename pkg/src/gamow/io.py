"""CSV / JSON emission and the matching readers.

Floats are written with 17 significant digits, so a write-read cycle
returns the same doubles.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .analysis import DecayFit, DecaySeries
from .model import Channel
from .spectral import SpectralAmplitude, WaveState

FMT = "{:.17g}"


def _fmt(v) -> str:
    return FMT.format(float(v))


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if not isinstance(v, str) else v for v in r])
    return path


def _read_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {h: np.array([float(r[i]) for r in body]) for i, h in enumerate(header)}
    return header, cols


def write_wave(path, state: WaveState, t: float | None = None):
    """Columns x, re, im, abs2 (one line of header).  ``t`` and the parity
    tag go into the header names only through a companion manifest."""
    x, s = state.x, state.samples
    return _write_rows(path, ["x", "re", "im", "abs2"],
                       zip(x, s.real, s.imag, np.abs(s) ** 2))


def read_wave(path, parity_tag: str = "mixed") -> WaveState:
    _, c = _read_columns(path)
    x = c["x"]
    return WaveState(float(x[0]), float(x[-1]), c["re"] + 1j * c["im"], parity_tag)


def write_amplitude(path, amp: SpectralAmplitude):
    return _write_rows(path, ["k", "re", "im", "weight"],
                       zip(amp.k_grid, amp.values.real, amp.values.imag, amp.weights))


def read_amplitude(path, channel: Channel = Channel.SYMMETRIC) -> SpectralAmplitude:
    _, c = _read_columns(path)
    return SpectralAmplitude(c["k"], c["re"] + 1j * c["im"], channel, c["weight"])


def write_series(path, series: DecaySeries):
    if np.iscomplexobj(series.values):
        v = series.values
        return _write_rows(path, ["t", "re", "im"], zip(series.times, v.real, v.imag))
    return _write_rows(path, ["t", "value"], zip(series.times, series.values))


def read_series(path, kind: str | None = None) -> DecaySeries:
    header, c = _read_columns(path)
    if "re" in header:
        return DecaySeries(c["t"], c["re"] + 1j * c["im"], kind or "amplitude")
    return DecaySeries(c["t"], c["value"], kind or "probability")


def write_table(path, header, rows):
    return _write_rows(path, header, rows)


def read_table(path):
    return _read_columns(path)


def fit_to_dict(fit: DecayFit) -> dict:
    return {"gamma_fit": fit.gamma_fit, "amplitude": fit.amplitude,
            "window": list(fit.window), "rms_log_residual": fit.rms_log_residual,
            "n_points": fit.n_points}


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default)
    path.write_text(text + "\n")
    return path


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def read_json(path):
    return json.loads(Path(path).read_text())


def read_fit(path) -> DecayFit:
    d = read_json(path)
    return DecayFit(d["gamma_fit"], d["amplitude"], tuple(d["window"]),
                    d["rms_log_residual"], d.get("n_points", 0))
