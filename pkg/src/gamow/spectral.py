"""Generalized Fourier transform of the square-barrier Hamiltonian.

    psihat(k) = int psi(x) conj(phi(k, x)) dx,      k > 0

plus the closed-form transform of the Dirichlet bound states
psi_n = cos(q x) / sqrt(a) on [-a, a], q = (2n-1) pi / (2a).  Carrying out
the x-integral gives

    psihat_n(k) = c_n exp(ika) cos(kt a) / (Fbar(k) (z'^2 - k^2)),
    c_n = (-1)^(n+1) 2 q / sqrt(pi a),

where z'^2 - k^2 = q^2 - kt^2.  Since cos(q a) = 0 the ratio
cos(kt a)/(q^2 - kt^2) equals sin(q a) a sinc((kt - q) a)/(q + kt), which
is how it is evaluated (no cancellation near k = z').
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .eigenfunctions import NORM, jost_reflected, phi, phi_interior
from .errors import ChannelMismatch
from .model import Channel, PotentialParams, ktilde
from .quadrature import PanelGrid, default_k_max, k_panels, x_panels
from .resonances import gamow_eval, solve_resonance

PARITY_TAGS = ("symmetric", "antisymmetric", "mixed")


@dataclass
class WaveState:
    """Wave function sampled on a uniform grid of [x_min, x_max].

    ``func`` (optional) evaluates the state at arbitrary points; it is kept
    for analytically known states so that quadratures need not interpolate.
    ``support`` is the interval outside of which the state vanishes.
    """

    x_min: float
    x_max: float
    samples: np.ndarray
    parity_tag: str = "mixed"
    func: Optional[Callable] = field(default=None, repr=False, compare=False)
    support: Optional[tuple] = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.parity_tag not in PARITY_TAGS:
            raise ValueError(f"unknown parity tag {self.parity_tag!r}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise ValueError("samples must be a 1-d array with >= 2 points")
        if self.support is None:
            self.support = (self.x_min, self.x_max)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.samples.size)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.samples.size - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.func is not None:
            return np.asarray(self.func(x), dtype=complex)
        spline = CubicSpline(self.x, self.samples)
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi) & (x >= self.x_min) & (x <= self.x_max)
        return np.where(inside, spline(np.clip(x, self.x_min, self.x_max)), 0.0)

    def norm(self) -> float:
        return math.sqrt(_simpson(np.abs(self.samples) ** 2, self.dx))

    def asymmetry(self) -> float:
        s = self.samples
        return float(np.max(np.abs(s - s[::-1])))

    @classmethod
    def from_function(cls, f, x_min, x_max, n_points=801, parity_tag="mixed",
                      support=None, normalize=False) -> "WaveState":
        """Sample ``f`` and keep it for exact evaluation.  With ``normalize``
        the L2 norm is computed by Gauss-Legendre on the support."""
        scale = 1.0
        if normalize:
            lo, hi = support if support is not None else (x_min, x_max)
            g = x_panels(lo, hi, 50.0)
            scale = 1.0 / math.sqrt(g.integrate(np.abs(f(g.nodes)) ** 2))
        func = (lambda x: scale * f(x)) if scale != 1.0 else f
        x = np.linspace(x_min, x_max, n_points)
        return cls(x_min, x_max, func(x), parity_tag, func, support)


def _simpson(y, dx):
    # composite Simpson with a trapezoid patch for an even number of intervals
    n = y.size - 1
    if n % 2 == 0:
        return float(dx / 3.0 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))
    return _simpson(y[:-1], dx) + 0.5 * dx * float(y[-2] + y[-1])


@dataclass
class SpectralAmplitude:
    """psihat tabulated on a k-grid.

    ``weights`` are quadrature weights for the grid (Gauss-Legendre panels
    when the grid came from :func:`default_k_grid`).  ``evaluator`` recomputes
    psihat on another grid; it is used when a finer grid is required.
    """

    k_grid: np.ndarray
    values: np.ndarray
    channel: Channel
    weights: Optional[np.ndarray] = None
    evaluator: Optional[Callable] = field(default=None, repr=False, compare=False)
    grid: Optional[PanelGrid] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.k_grid = np.asarray(self.k_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.k_grid.shape != self.values.shape:
            raise ValueError("k_grid and values differ in shape")
        if np.any(self.k_grid <= 0) or np.any(np.diff(self.k_grid) <= 0):
            raise ValueError("k_grid must be positive and strictly increasing")
        if self.weights is None:
            self.weights = _trapezoid_weights(self.k_grid)

    @property
    def k_max(self) -> float:
        return float(self.k_grid[-1])

    def norm(self) -> float:
        return math.sqrt(float(np.sum(self.weights * np.abs(self.values) ** 2)))

    def on(self, grid: PanelGrid) -> np.ndarray:
        """Values on the nodes of ``grid``."""
        if self.grid is not None and np.array_equal(grid.breakpoints, self.grid.breakpoints) \
                and grid.order == self.grid.order:
            return self.values
        if self.evaluator is not None:
            return np.asarray(self.evaluator(grid.nodes), dtype=complex)
        re = CubicSpline(self.k_grid, self.values.real)(grid.nodes)
        im = CubicSpline(self.k_grid, self.values.imag)(grid.nodes)
        out = re + 1j * im
        return np.where(grid.nodes <= self.k_max, out, 0.0)

    def on_point(self, k: float) -> complex:
        """psihat at one wavenumber; without an evaluator the last tabulated
        value stands in for points at or beyond the grid end."""
        if self.evaluator is not None:
            return complex(np.asarray(self.evaluator(np.array([k])))[0])
        return complex(self.values[-1])

    def resampled(self, grid: PanelGrid) -> "SpectralAmplitude":
        return SpectralAmplitude(grid.nodes, self.on(grid), self.channel,
                                 grid.weights, self.evaluator, grid)


def _trapezoid_weights(k):
    w = np.zeros_like(k)
    d = np.diff(k)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def _channel_tag(channel: Channel) -> str:
    return channel.value


def dirichlet_q(n: int, params: PotentialParams, channel: Channel = Channel.SYMMETRIC) -> float:
    """Interior wavenumber of the n-th Dirichlet state on [-a, a]."""
    if channel is Channel.SYMMETRIC:
        return (2 * n - 1) * math.pi / (2.0 * params.a)
    return n * math.pi / params.a


def bound_state(n: int, params: PotentialParams, n_points: int = 801,
                channel: Channel = Channel.SYMMETRIC) -> WaveState:
    """Normalized Dirichlet state cos(q x)/sqrt(a) (or sin) on [-a, a]."""
    if n < 1:
        raise ValueError("bound state index must be >= 1")
    a = params.a
    q = dirichlet_q(n, params, channel)
    amp = 1.0 / math.sqrt(a)
    trig = np.cos if channel is Channel.SYMMETRIC else np.sin

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= a, amp * trig(q * x), 0.0).astype(complex)

    x = np.linspace(-a, a, n_points)
    samples = f(x)
    samples[0] = samples[-1] = 0.0  # exact Dirichlet values
    return WaveState(-a, a, samples, _channel_tag(channel), f, (-a, a))


def truncated_gamow(n: int, params: PotentialParams, n_points: int = 801) -> WaveState:
    """chi_a G_{2n-1}, normalized in L2[-a, a]."""
    res = solve_resonance(2 * n - 1, params)
    a = params.a
    g = x_panels(-a, a, 20.0)
    scale = 1.0 / math.sqrt(g.integrate(np.abs(gamow_eval(res, g.nodes)) ** 2))

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= a, scale * gamow_eval(res, np.clip(x, -a, a)), 0.0)

    x = np.linspace(-a, a, n_points)
    return WaveState(-a, a, f(x), "symmetric", f, (-a, a))


def _sinc(u):
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    return np.where(small, 1.0 - u * u / 6.0 + u ** 4 / 120.0, np.sin(safe) / safe)


def bound_constant(n: int, params: PotentialParams) -> float:
    q = dirichlet_q(n, params)
    return (-1) ** (n + 1) * 2.0 * q / math.sqrt(math.pi * params.a)


def bound_transform_closed(n: int, k, params: PotentialParams):
    """Closed-form transform of :func:`bound_state` (symmetric channel).

    Defined for complex k by the same formula (analytic continuation).
    """
    k = np.asarray(k, dtype=complex)
    a = params.a
    q = dirichlet_q(n, params)
    kt = ktilde(k, params)
    sq = math.sin(q * a)
    ratio = sq * a * _sinc((kt - q) * a) / (q + kt)
    out = bound_constant(n, params) * np.exp(1j * k * a) * ratio \
        / jost_reflected(k, Channel.SYMMETRIC, params)
    return out[()] if out.ndim == 0 else out


def tail_k_max(evaluator, params: PotentialParams, tol: float = 1e-8,
               start: float | None = None, growth: float = 1.25, limit: float = 1e4) -> float:
    """Smallest K (on a geometric ladder) with int_K^inf |psihat|^2 dk < tol.

    The tail is bounded with the k^-4 envelope of the bound-state transform:
    with M the peak of |psihat|^2 over [K/growth, K], the tail is <= M K / 3.
    """
    K = start or default_k_max(params)
    while K < limit:
        k = np.linspace(K / growth, K, 400)
        m = float(np.max(np.abs(evaluator(k)) ** 2))
        if m * K / 3.0 < tol:
            return K
        K *= growth
    return limit


def default_k_grid(params: PotentialParams, k_max: float | None = None, **kw) -> PanelGrid:
    return k_panels(params, k_max=k_max or default_k_max(params), **kw)


def _transform_values(psi: WaveState, k, channel: Channel, params: PotentialParams):
    lo, hi = psi.support
    a = params.a
    k = np.asarray(k, dtype=float)
    kmax = float(np.max(k)) if k.size else 1.0
    # split the support at +-a so each panel sees a smooth integrand
    cuts = sorted({lo, hi, *[c for c in (-a, a) if lo < c < hi]})
    total = np.zeros(k.shape, dtype=complex)
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        g = x_panels(x0, x1, kmax + params.k_threshold)
        vals = psi(g.nodes)
        if x0 >= -a and x1 <= a:
            ph = phi_interior(k[:, None], g.nodes[None, :], channel, params)
        else:
            ph = phi(k[:, None], g.nodes[None, :], channel, params)
        total += (np.conj(ph) * vals[None, :]) @ g.weights
    return total


def forward_transform(psi: WaveState, k_grid, channel: Channel,
                      params: PotentialParams, chunk: int = 4096) -> SpectralAmplitude:
    """psihat(k) by Gauss-Legendre quadrature over the support of ``psi``.

    ``k_grid`` is either a PanelGrid (weights kept for norms and evolution)
    or an array of positive, increasing wavenumbers.
    """
    if psi.parity_tag != "mixed" and psi.parity_tag != channel.value:
        raise ChannelMismatch(f"state is {psi.parity_tag}, channel is {channel.value}")
    grid = k_grid if isinstance(k_grid, PanelGrid) else None
    k = grid.nodes if grid is not None else np.asarray(k_grid, dtype=float)

    def evaluator(kk):
        kk = np.asarray(kk, dtype=float)
        out = np.empty(kk.shape, dtype=complex)
        for s in range(0, kk.size, chunk):
            out[s:s + chunk] = _transform_values(psi, kk[s:s + chunk], channel, params)
        return out

    weights = grid.weights if grid is not None else None
    return SpectralAmplitude(k, evaluator(k), channel, weights, evaluator, grid)


def closed_amplitude(n: int, params: PotentialParams, grid: PanelGrid | None = None) -> SpectralAmplitude:
    """Spectral amplitude of bound_state(n) from the closed form."""
    grid = grid or default_k_grid(params)
    f = lambda kk: bound_transform_closed(n, kk, params)
    return SpectralAmplitude(grid.nodes, f(grid.nodes), Channel.SYMMETRIC,
                             grid.weights, f, grid)


def inverse_transform(psihat: SpectralAmplitude, x, params: PotentialParams, chunk: int = 2048):
    """psi(x) = int psihat(k) phi(k, x) dk over the tabulated grid."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(x.shape, dtype=complex)
    k, v, w = psihat.k_grid, psihat.values, psihat.weights
    for s in range(0, k.size, chunk):
        sl = slice(s, s + chunk)
        ph = phi(k[sl, None], x[None, :], psihat.channel, params)
        out += (w[sl] * v[sl]) @ ph
    return out


def bound_coefficient(psi0: WaveState, n: int, params: PotentialParams | None = None) -> complex:
    """<psi_n, psi0> against the symmetric Dirichlet basis on the support."""
    lo, hi = psi0.support
    a = -lo if params is None else params.a
    g = x_panels(-a, a, (2 * n + 1) * math.pi / a + 10.0)
    q = (2 * n - 1) * math.pi / (2.0 * a)
    basis = np.cos(q * g.nodes) / math.sqrt(a)
    return complex(g.integrate(basis * psi0(g.nodes)))


def series_coefficients(psi0: WaveState, N_max: int, params: PotentialParams | None = None):
    """(coefficients a_1..a_N, tail estimate C1^2/N).

    C1 bounds |n a_n|; it is estimated as max_n n |a_n| over the computed
    coefficients, so sum_{n>N} |a_n|^2 <= C1^2/N.
    """
    if psi0.parity_tag == "antisymmetric":
        raise ChannelMismatch("series_coefficients expects a symmetric state")
    coeffs = np.array([bound_coefficient(psi0, n, params) for n in range(1, N_max + 1)])
    c1 = float(np.max(np.arange(1, N_max + 1) * np.abs(coeffs))) if N_max else 0.0
    return coeffs, c1 * c1 / max(N_max, 1)
