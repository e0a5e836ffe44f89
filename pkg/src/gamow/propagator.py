"""Time evolution by eigenfunction expansion and its resonance decomposition.

    psi(x, t) = int_0^inf psihat(k) phi(k, x) exp(-i k^2 t / 2) dk

Near a symmetric resonance phi(k, x) ~ eta_n(k) G_n(x) on [-a, a].  The
part carried by eta_n is split with the residue theorem: the real half-line
is rotated onto the ray k = r exp(-i pi/4), picking up the pole z_n,

    int_0^inf psihat_n eta_n e^{-ik^2 t/2} dk = c e^{-i z^2 t/2} + r(t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigenfunctions import LaurentData, eta, laurent_expand, phi
from .errors import NonpositiveTime, OutOfLaurentRange
from .model import Channel, PotentialParams
from .quadrature import PanelGrid, default_k_max, k_panels, uniform_panels, x_panels
from .resonances import admissible_indices, gamow_eval, solve_resonance
from .spectral import (SpectralAmplitude, WaveState, bound_transform_closed,
                       closed_amplitude, default_k_grid, series_coefficients)

PER_PERIOD = 8.0
ROT = np.exp(-0.25j * math.pi)


@dataclass
class EvolutionResult:
    t: float
    state: WaveState
    quadrature_error_estimate: float


@dataclass(frozen=True)
class MainTerm:
    """Residue contribution c exp(-i z^2 t / 2)."""

    n: int
    c: complex
    z: complex

    @property
    def gamma(self) -> float:
        return -(self.z * self.z).imag

    def value(self, t):
        return self.c * np.exp(-0.5j * self.z * self.z * np.asarray(t, dtype=float))


def evolution_grid(psihat: SpectralAmplitude, t_max: float, x_extent: float,
                   params: PotentialParams, per_period: float = PER_PERIOD,
                   max_nodes: int | None = None) -> PanelGrid:
    """k-panels resolving the phase k^2 t/2 + k x for |t| <= t_max, |x| <= x_extent."""
    kw = {} if max_nodes is None else {"max_nodes": max_nodes}
    return k_panels(params, k_max=psihat.k_max, t_max=abs(t_max), x_extent=x_extent,
                    per_period=per_period, **kw)


def propagate(psihat: SpectralAmplitude, times, x, params: PotentialParams,
              grid: PanelGrid | None = None, chunk: int = 2048, with_error: bool = False):
    """psi(x, t) for every t in ``times`` (rows) and x (columns).

    The k-integrand psihat phi is formed once per chunk of nodes and reused
    for all times.  With ``with_error`` an a-posteriori estimate per time is
    returned too: the magnitude of the two highest Legendre coefficients of
    the integrand on each panel, summed (see PanelGrid.error_estimate).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if grid is None:
        grid = evolution_grid(psihat, np.max(np.abs(times)), float(np.max(np.abs(x))), params)
    vals = psihat.on(grid)
    k, w = grid.nodes, grid.weights
    out = np.zeros((times.size, x.size), dtype=complex)
    err = np.zeros(times.size)
    order = grid.order
    chunk = max(order, chunk - chunk % order)  # whole panels per chunk
    if with_error:
        from .quadrature import _legendre_analysis
        ana = _legendre_analysis(order)[-2:]
        widths = np.diff(grid.breakpoints)
    for s in range(0, k.size, chunk):
        sl = slice(s, s + chunk)
        kk = k[sl]
        m = vals[sl, None] * phi(kk[:, None], x[None, :], psihat.channel, params)
        e = np.exp(-0.5j * np.outer(times, kk * kk))
        out += e @ (w[sl, None] * m)
        if with_error:
            p0 = s // order
            npan = kk.size // order
            for i in range(times.size):
                f = (e[i][:, None] * m).reshape(npan, order, x.size)
                tail = np.abs(np.einsum("mj,pjx->pmx", ana, f)).sum(axis=1)
                err[i] += float(np.max(tail.T @ widths[p0:p0 + npan]))
    g_end = psihat.on_point(grid.hi) * phi(grid.hi, x, psihat.channel, params)
    out += endpoint_correction(g_end, grid.hi, times)
    if with_error:
        return out, err + _truncation_estimate(g_end, grid.hi, times)
    return out


def endpoint_correction(g_end, K: float, times):
    """Leading integration-by-parts value of int_K^inf g exp(-ik^2 t/2) dk,

        g(K) exp(-iK^2 t/2) / (i K t),

    applied where at least ten periods of the phase fit into [K, 2K]; the
    cut-off would otherwise leave an artifact decaying only like 1/t.
    ``g_end`` has the shape of one output row.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    g_end = np.asarray(g_end, dtype=complex)
    out = np.zeros((times.size,) + g_end.shape, dtype=complex)
    on = 1.5 * K * K * np.abs(times) >= 20.0 * math.pi
    tt = times[on]
    fac = np.exp(-0.5j * K * K * tt) / (1j * K * tt)
    out[on] = fac.reshape((-1,) + (1,) * g_end.ndim) * g_end
    return out


def _truncation_estimate(g_end, K, times):
    # without the endpoint term the tail is ~ K |g(K)| (k^-2 envelope); with
    # it, the next integration-by-parts term ~ |g(K)| / (K t)^2 remains
    g = float(np.max(np.abs(g_end)))
    times = np.abs(np.atleast_1d(times))
    on = 1.5 * K * K * times >= 20.0 * math.pi
    safe = np.where(on, times, 1.0)
    return np.where(on, g / (K * safe) ** 2, K * g)


def evolve(psihat: SpectralAmplitude, t: float, x_grid, params: PotentialParams,
           max_nodes: int | None = None) -> EvolutionResult:
    """psi(., t) on a uniform x_grid.

    Raises QuadratureBudgetExceeded when resolving the phase needs more
    than ``max_nodes`` k-nodes.
    """
    return evolve_many(psihat, [t], x_grid, params, max_nodes=max_nodes)[0]


def evolve_many(psihat: SpectralAmplitude, times, x_grid, params: PotentialParams,
                max_nodes: int | None = None, with_error: bool = True):
    x = np.asarray(x_grid, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    grid = evolution_grid(psihat, float(np.max(np.abs(times))), float(np.max(np.abs(x))),
                          params, max_nodes=max_nodes)
    if with_error:
        vals, errs = propagate(psihat, times, x, params, grid, with_error=True)
    else:
        vals = propagate(psihat, times, x, params, grid)
        errs = np.full(times.size, np.nan)
    tag = psihat.channel.value
    return [EvolutionResult(float(t), WaveState(x[0], x[-1], v, tag), float(e))
            for t, v, e in zip(times, vals, errs)]


def main_term(n: int, ld: LaurentData, params: PotentialParams | None = None) -> MainTerm:
    """c = -2 pi i a_{-1} psihat_n(z) exp(-i a z) for the bound state psi_n."""
    params = params or ld.params
    _, n_laurent = admissible_indices(params)
    if n < 1 or n > n_laurent:
        raise OutOfLaurentRange(f"n={n} outside 1..{n_laurent}")
    z = ld.z
    ph = bound_transform_closed(n, z, params)
    c = -2j * math.pi * ld.residue_scalar * ph * np.exp(-1j * params.a * z)
    return MainTerm(n, complex(c), z)


def _ray_integrand(n, r, ld, params, t, psihat_fn=None):
    k = r * ROT
    f = psihat_fn(k) if psihat_fn is not None else bound_transform_closed(n, k, params)
    return f * eta(ld.n, k, ld) * np.exp(-0.5 * t * r * r) * ROT


def ray_term(n: int, t: float, ld: LaurentData, params: PotentialParams | None = None,
             nodes: int = 200, psihat_fn=None, return_error: bool = False):
    """Contribution of the rotated ray k = r exp(-i pi/4), r >= 0.

    With u = r sqrt(t/2) the weight is exp(-u^2); u is integrated over
    [0, 7] with ``nodes`` Gauss-Legendre points (20-point panels), and the
    result compared with twice as many nodes.
    """
    if t <= 0:
        raise NonpositiveTime(f"t must be > 0, got {t}")
    params = params or ld.params

    def rule(m):
        g = uniform_panels(0.0, 7.0, max(1, m // 20), order=20)
        s = math.sqrt(2.0 / t)
        return complex(g.integrate(_ray_integrand(n, s * g.nodes, ld, params, t, psihat_fn)) * s)

    val = rule(nodes)
    if return_error:
        return val, abs(rule(2 * nodes) - val)
    return val


def resonance_integral(n: int, t: float, ld: LaurentData, params: PotentialParams | None = None,
                       k_max: float | None = None, psihat_fn=None, per_period: float = 16.0):
    """Direct real-axis quadrature of int_0^inf psihat_n eta_n exp(-ik^2 t/2) dk.

    The truncated tail is added from one integration by parts:
    int_K^inf g e^{-ik^2 t/2} dk ~ g(K) e^{-iK^2 t/2} / (i K t).
    """
    params = params or ld.params
    fn = psihat_fn or (lambda k: bound_transform_closed(n, k, params))
    K = k_max or default_k_max(params)
    grid = k_panels(params, k_max=K, t_max=abs(t), x_extent=-params.a, per_period=per_period)
    k = grid.nodes
    g = fn(k) * eta(ld.n, k, ld)
    val = complex(grid.integrate(g * np.exp(-0.5j * t * k * k)))
    gK = complex(fn(K) * eta(ld.n, K, ld))
    return val + complex(endpoint_correction(gK, K, [t])[0])


def error_norm(n: int, t: float, params: PotentialParams, ld: LaurentData,
               psihat: SpectralAmplitude | None = None, grid: PanelGrid | None = None) -> float:
    """L2[-a, a] norm of psi(., t) - (main + ray)(t) G_n."""
    if t <= 0:
        raise NonpositiveTime(f"t must be > 0, got {t}")
    return float(error_norms(n, [t], params, ld, psihat)[0])


def error_norms(n, times, params, ld, psihat=None):
    a = params.a
    times = np.atleast_1d(np.asarray(times, dtype=float))
    psihat = psihat or closed_amplitude(n, params)
    xg = x_panels(-a, a, 40.0)
    psi = propagate(psihat, times, xg.nodes, params)
    mt = main_term(n, ld, params)
    res = ld.resonance
    g = gamow_eval(res, xg.nodes)
    out = []
    for i, t in enumerate(times):
        ct = mt.value(t) + ray_term(n, t, ld, params)
        d = psi[i] - ct * g
        out.append(math.sqrt(xg.integrate(np.abs(d) ** 2)))
    return np.array(out)


def multi_resonance_evolve(psi0: WaveState, t: float, N: int, params: PotentialParams,
                           x_points: int = 201):
    """Sum_{n<=N} a_n C_n(t) G_n on [-a, a], C_n(t) = main_n(t) + r_n(t).

    Returns the summed state and the array of C_n(t).
    """
    _, n_laurent = admissible_indices(params)
    if N < 1 or N > n_laurent:
        raise OutOfLaurentRange(f"N={N} outside 1..{n_laurent}")
    if t <= 0:
        raise NonpositiveTime(f"t must be > 0, got {t}")
    a = params.a
    coeffs, _ = series_coefficients(psi0, N, params)
    x = np.linspace(-a, a, x_points)
    total = np.zeros_like(x, dtype=complex)
    cs = []
    for n in range(1, N + 1):
        ld = laurent_expand(n, params, x[:1])
        cn = main_term(n, ld, params).value(t) + ray_term(n, t, ld, params)
        cs.append(cn)
        total += coeffs[n - 1] * cn * gamow_eval(ld.resonance, x)
    return WaveState(-a, a, total, "symmetric"), np.array(cs)
