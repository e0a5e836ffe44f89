"""Composite Gauss-Legendre rules on graded panels.

The k-axis integrands are peaked (Lorentzians of width |Im z_n| around every
resonance) and oscillate like exp(-i k^2 t / 2).  Panels are bisected until
they are small compared with the distance to every resonance pole and
short enough to hold a fixed number of nodes per oscillation period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureBudgetExceeded
from .model import PotentialParams

PANEL_ORDER = 16
MAX_NODES = 6_000_000


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


@lru_cache(maxsize=None)
def _legendre_analysis(order: int):
    # maps node values to Legendre coefficients of the interpolant
    x, w = gauss_legendre(order)
    v = np.polynomial.legendre.legvander(x, order - 1)
    norms = (2 * np.arange(order) + 1) / 2.0
    return (v * w[:, None]).T * norms[:, None]


@dataclass(frozen=True)
class PanelGrid:
    """Nodes and weights of a composite Gauss-Legendre rule."""

    breakpoints: np.ndarray
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_breakpoints(cls, breakpoints, order: int = PANEL_ORDER) -> "PanelGrid":
        b = np.asarray(breakpoints, dtype=float)
        if b.ndim != 1 or b.size < 2 or np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        x, w = gauss_legendre(order)
        half = 0.5 * np.diff(b)
        mid = 0.5 * (b[1:] + b[:-1])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        return cls(b, order, nodes, weights)

    @property
    def lo(self) -> float:
        return float(self.breakpoints[0])

    @property
    def hi(self) -> float:
        return float(self.breakpoints[-1])

    def __len__(self):
        return self.nodes.size

    def integrate(self, values, axis: int = -1):
        return np.tensordot(values, self.weights, axes=([axis], [0]))

    def error_estimate(self, values) -> float:
        """Sum over panels of the two highest Legendre coefficients of the
        interpolant, scaled by panel length (a truncation-error proxy)."""
        vals = np.asarray(values).reshape(-1, self.order)
        coef = vals @ _legendre_analysis(self.order).T
        tail = np.abs(coef[:, -2:]).sum(axis=1)
        return float(np.sum(tail * np.diff(self.breakpoints)))


def uniform_panels(lo: float, hi: float, n_panels: int, order: int = PANEL_ORDER) -> PanelGrid:
    return PanelGrid.from_breakpoints(np.linspace(lo, hi, n_panels + 1), order)


def resonance_poles(params: PotentialParams) -> np.ndarray:
    """All fixed-point resonances (both parities) as complex numbers."""
    from .resonances import admissible_indices, solve_resonance
    if params.lam <= 0:
        return np.empty(0, dtype=complex)
    n_gamow, _ = admissible_indices(params)
    return np.array([solve_resonance(n, params).z for n in range(1, n_gamow + 1)])


def default_k_max(params: PotentialParams) -> float:
    return max(4.0 * params.k_threshold, 30.0 / params.a)


def k_panels(params: PotentialParams, k_max: float | None = None, t_max: float = 0.0,
             x_extent: float | None = None, k_min: float = 0.0,
             per_period: float = 16.0, pole_ratio: float = 0.75,
             max_width: float | None = None, order: int = PANEL_ORDER,
             extra_poles=(), max_nodes: int = MAX_NODES) -> PanelGrid:
    """Graded k-grid on [k_min, k_max].

    A panel [k0, k1] is accepted when

    * (k1 - k0) <= pole_ratio * |mid - z| for every resonance z, and
    * it spans at most order/per_period periods of the phase
      k^2 t/2 + k (x_extent + a), i.e. >= per_period nodes per period.
    """
    a = params.a
    k_max = default_k_max(params) if k_max is None else float(k_max)
    x_extent = a if x_extent is None else float(x_extent)
    max_width = min(0.25, 1.0 / a) if max_width is None else max_width
    poles = np.concatenate([resonance_poles(params), np.asarray(extra_poles, dtype=complex)])
    b = [k_min, k_max]
    if params.lam > 0 and k_min < params.k_threshold < k_max:
        b.insert(1, params.k_threshold)
    for z in poles:
        if k_min < z.real < k_max:
            b.append(z.real)
    b = np.unique(np.asarray(b, dtype=float))
    span = x_extent + a
    budget = max_nodes // order
    while True:
        w = np.diff(b)
        mid = 0.5 * (b[1:] + b[:-1])
        limit = np.full_like(w, max_width)
        if poles.size:
            dist = np.min(np.abs(mid[:, None] - poles[None, :]), axis=1)
            limit = np.minimum(limit, pole_ratio * dist)
        if t_max > 0 or span > 0:
            rate = b[1:] * t_max + span  # phase derivative at the right end
            limit = np.minimum(limit, (order / per_period) * 2.0 * math.pi / rate)
        bad = w > limit
        if not bad.any():
            break
        if b.size + bad.sum() > budget:
            raise QuadratureBudgetExceeded(
                f"k-grid needs more than {max_nodes} nodes (t_max={t_max}, k_max={k_max})")
        b = np.sort(np.concatenate([b, mid[bad]]))
    return PanelGrid.from_breakpoints(b, order)


def x_panels(lo: float, hi: float, k_max: float, order: int = 32) -> PanelGrid:
    """Gauss-Legendre panels on [lo, hi]; panel count grows with k_max*(hi-lo)."""
    n = max(1, math.ceil(k_max * (hi - lo) / (2.0 * math.pi) / 3.0))
    return uniform_panels(lo, hi, n, order)
