"""Decay observables: survival amplitude, non-escape probability,
exponential fits and the short/long-time diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyWindow, InsufficientTail, NonpositiveValues
from .model import PotentialParams
from .propagator import PER_PERIOD, endpoint_correction, propagate
from .quadrature import k_panels, x_panels
from .spectral import SpectralAmplitude, WaveState, _simpson


@dataclass
class DecaySeries:
    times: np.ndarray
    values: np.ndarray
    kind: str = "probability"  # probability | amplitude | generic

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        cplx = np.iscomplexobj(self.values)
        self.values = np.asarray(self.values, dtype=complex if cplx else float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.kind == "probability":
            if cplx:
                raise ValueError("a probability series must be real")
            if np.any(self.values < -1e-12) or np.any(self.values > 1 + 1e-3):
                raise ValueError("probabilities must lie in [0, 1 + 1e-3]")

    def __len__(self):
        return self.times.size

    def probability(self) -> "DecaySeries":
        if self.kind != "amplitude":
            return self
        return DecaySeries(self.times, np.abs(self.values) ** 2, "probability")


@dataclass
class DecayFit:
    gamma_fit: float
    amplitude: float
    window: tuple
    rms_log_residual: float
    n_points: int = 0
    residuals: np.ndarray = field(default=None, repr=False)

    def predict(self, t):
        return self.amplitude * np.exp(-self.gamma_fit * np.asarray(t, dtype=float))


def survival_amplitude(psi0: WaveState | None, psihat: SpectralAmplitude, times,
                       params: PotentialParams | None = None, chunk: int = 4096,
                       per_period: float = PER_PERIOD) -> DecaySeries:
    """A(t) = int |psihat(k)|^2 exp(-ik^2 t/2) dk.

    ``psi0`` is accepted for symmetry with the x-space definition but the
    computation is purely spectral.  The k-grid resolves the phase up to
    max|t|; it is refined from ``psihat``'s evaluator when one is attached.
    """
    times = np.asarray(times, dtype=float)
    t_max = float(np.max(np.abs(times))) if times.size else 0.0
    if params is not None and psihat.evaluator is not None:
        grid = k_panels(params, k_max=psihat.k_max, t_max=t_max, x_extent=-params.a,
                        per_period=per_period)
        k, w, v = grid.nodes, grid.weights, psihat.on(grid)
        K = grid.hi
    else:
        k, w, v = psihat.k_grid, psihat.weights, psihat.values
        K = psihat.k_max
    dens = w * np.abs(v) ** 2
    out = np.zeros(times.size, dtype=complex)
    for s in range(0, k.size, chunk):
        kk = k[s:s + chunk]
        out += np.exp(-0.5j * np.outer(times, kk * kk)) @ dens[s:s + chunk]
    gK = abs(psihat.on_point(K)) ** 2
    out += endpoint_correction(np.complex128(gK), K, times)
    return DecaySeries(times, out, "amplitude")


def survival_probability(psihat: SpectralAmplitude, times, params: PotentialParams | None = None):
    amp = survival_amplitude(None, psihat, times, params)
    p = np.abs(amp.values) ** 2
    return DecaySeries(amp.times, np.minimum(p, 1 + 1e-3), "probability")


def nonescape_probability(states, params: PotentialParams) -> DecaySeries:
    """int_{-a}^{a} |psi(x, t)|^2 dx for a sequence of EvolutionResults.

    The states must be sampled on uniform grids that contain x = -a and
    x = a as grid points (Simpson's rule on the enclosed samples).
    """
    a = params.a
    ts, vs = [], []
    for r in states:
        s = r.state
        x = s.x
        i0 = int(round((-a - x[0]) / s.dx))
        i1 = int(round((a - x[0]) / s.dx))
        if i0 < 0 or i1 >= x.size or abs(x[i0] + a) > 1e-9 or abs(x[i1] - a) > 1e-9:
            raise ValueError("state grid must contain -a and a")
        ts.append(r.t)
        vs.append(_simpson(np.abs(s.samples[i0:i1 + 1]) ** 2, s.dx))
    order = np.argsort(ts)
    return DecaySeries(np.array(ts)[order], np.clip(np.array(vs)[order], 0.0, 1 + 1e-3))


def nonescape_series(psihat: SpectralAmplitude, times, params: PotentialParams,
                     x_panels_k: float = 20.0) -> DecaySeries:
    """Non-escape probability straight from the spectral integral, with the
    x-integral done by Gauss-Legendre on [-a, a]."""
    a = params.a
    xg = x_panels(-a, a, x_panels_k)
    times = np.asarray(times, dtype=float)
    psi = propagate(psihat, times, xg.nodes, params)
    vals = (np.abs(psi) ** 2) @ xg.weights
    return DecaySeries(times, np.clip(vals, 0.0, 1 + 1e-3))


def fit_decay(series: DecaySeries, gamma_hint: float, N: float = 5,
              window: tuple | None = None) -> DecayFit:
    """Least squares of log(values) against t on [1/gamma_hint, N/gamma_hint].

    ``window`` = (lo, hi) in units of gamma_hint * t overrides the default
    (1, N).
    """
    if gamma_hint <= 0:
        raise ValueError("gamma_hint must be positive")
    lo, hi = (1.0, float(N)) if window is None else map(float, window)
    if window is None and N < 2:
        raise ValueError("N must be >= 2")
    t0, t1 = lo / gamma_hint, hi / gamma_hint
    t = series.times
    v = series.values.real if np.iscomplexobj(series.values) else series.values
    sel = (t >= t0 * (1 - 1e-12)) & (t <= t1 * (1 + 1e-12))
    if sel.sum() < 2:
        raise EmptyWindow(f"fewer than two samples in [{t0:g}, {t1:g}]")
    tv, vv = t[sel], v[sel]
    if np.any(vv <= 0):
        raise NonpositiveValues("log fit needs strictly positive values")
    y = np.log(vv)
    slope, icpt = np.polyfit(tv, y, 1)
    res = y - (slope * tv + icpt)
    return DecayFit(float(-slope), float(math.exp(icpt)), (float(tv[0]), float(tv[-1])),
                    float(np.sqrt(np.mean(res ** 2))), int(sel.sum()), res)


def short_time_check(series: DecaySeries, h: float | None = None):
    """(dP/dt(0), quadratic coefficient) from samples at 0, +-h, +-2h.

    dP/dt(0) is the fourth-order central difference
    (P(-2h) - 8P(-h) + 8P(h) - P(2h)) / (12h); the quadratic coefficient is
    (P(h) - 2P(0) + P(-h)) / (2h^2).
    """
    p = series.probability()
    t, v = p.times, np.asarray(p.values, dtype=float)
    if h is None:
        pos = t[t > 0]
        if pos.size == 0:
            raise ValueError("series has no positive times")
        h = float(pos.min())
    vals = {}
    for m in (-2, -1, 0, 1, 2):
        idx = np.flatnonzero(np.isclose(t, m * h, rtol=0, atol=1e-9 * max(h, 1e-300)))
        if idx.size == 0:
            raise ValueError(f"series lacks a sample at t = {m * h:g}")
        vals[m] = v[idx[0]]
    d = (vals[-2] - 8 * vals[-1] + 8 * vals[1] - vals[2]) / (12 * h)
    quad = (vals[1] - 2 * vals[0] + vals[-1]) / (2 * h * h)
    return float(d), float(quad)


def one_sided_derivative(series: DecaySeries, h: float) -> float:
    """(-3P(0) + 4P(h) - P(2h)) / (2h): uses t >= 0 only, so unlike the
    central formula it does not inherit P(t) = P(-t)."""
    p = series.probability()
    t, v = p.times, np.asarray(p.values, dtype=float)
    pick = lambda s: v[np.flatnonzero(np.isclose(t, s, rtol=0, atol=1e-9 * h))[0]]
    return float((-3 * pick(0.0) + 4 * pick(h) - pick(2 * h)) / (2 * h))


def tail_diagnostic(series: DecaySeries, gamma: float, window=(10.0, 100.0),
                    fit: DecayFit | None = None, factor: float = 2.0):
    """Log-log slope of the series over gamma t in ``window`` and the
    crossover time after which the series exceeds the exponential
    prediction by ``factor`` (a non-exponential tail of comparable size).

    Returns (slope, crossover); crossover is None when no sample in the
    window gets there.  The exponential prediction is ``fit`` when given,
    otherwise a line through the first window sample with rate ``gamma``.
    """
    if factor <= 1:
        raise ValueError("factor must exceed 1")
    p = series.probability() if series.kind == "amplitude" else series
    t = p.times
    v = np.abs(np.asarray(p.values))
    lo, hi = window
    sel = (t * gamma >= lo * (1 - 1e-12)) & (t * gamma <= hi * (1 + 1e-12))
    if sel.sum() < 4 or t[sel][-1] * gamma < 0.9 * hi or t[sel][0] * gamma > 1.1 * lo:
        raise InsufficientTail(f"series must cover gamma t in [{lo}, {hi}]")
    tv, vv = t[sel], v[sel]
    if np.any(vv <= 0):
        raise NonpositiveValues("tail contains non-positive values")
    slope, _ = np.polyfit(np.log(tv), np.log(vv), 1)
    pred = fit.predict(tv) if fit is not None else vv[0] * np.exp(-gamma * (tv - tv[0]))
    f = np.log(vv / pred) - math.log(factor)
    above = np.flatnonzero(f > 0)
    cross = None
    if above.size:
        j = above[0]
        cross = float(tv[j])
        if j > 0:
            # interpolate log(data/pred) to the threshold between samples
            cross = float(tv[j - 1] + (tv[j] - tv[j - 1]) * f[j - 1] / (f[j - 1] - f[j]))
    return float(slope), cross
