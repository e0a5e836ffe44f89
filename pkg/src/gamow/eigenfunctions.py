"""Generalized eigenfunctions, Jost functions and the Laurent expansion
of the symmetric eigenfunctions about a resonance."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivisionAtZero, OutOfLaurentRange, OutOfWindow
from .model import Channel, PotentialParams, ktilde
from .resonances import (Resonance, admissible_indices, real_part_below,
                         solve_resonance)

NORM = 1.0 / math.sqrt(4.0 * math.pi)


def _check_nonzero(k):
    if np.any(k == 0):
        raise DivisionAtZero("Jost functions are singular at k = 0")


def jost(k, channel: Channel, params: PotentialParams):
    """F(k) = cos(kt a) - i (kt/k) sin(kt a) or J(k) = (kt/k) cos(kt a) - i sin(kt a).

    F is even in kt and J is odd, so S = Jbar/J and the eigenfunctions do
    not depend on the branch of the square root.  Valid for complex k
    (analytic continuation).
    """
    k = np.asarray(k, dtype=complex)
    _check_nonzero(k)
    kt = ktilde(k, params)
    c, s = np.cos(kt * params.a), np.sin(kt * params.a)
    if channel is Channel.SYMMETRIC:
        out = c - 1j * (kt / k) * s
    else:
        out = (kt / k) * c - 1j * s
    return out[()] if out.ndim == 0 else out


def jost_reflected(k, channel: Channel, params: PotentialParams):
    """The barred Jost function: sign of the i-term flipped.  For real k above
    threshold this is conj(H(k)); below threshold J-bar is -conj(J)."""
    k = np.asarray(k, dtype=complex)
    _check_nonzero(k)
    kt = ktilde(k, params)
    c, s = np.cos(kt * params.a), np.sin(kt * params.a)
    if channel is Channel.SYMMETRIC:
        out = c + 1j * (kt / k) * s
    else:
        out = (kt / k) * c + 1j * s
    return out[()] if out.ndim == 0 else out


def s_matrix(k, channel: Channel, params: PotentialParams):
    return jost_reflected(k, channel, params) / jost(k, channel, params)


def phi(k, x, channel: Channel, params: PotentialParams):
    """Generalized eigenfunction phi(k, x), normalised to delta(k - k').

    ``k`` and ``x`` broadcast against each other.
    """
    k = np.asarray(k, dtype=complex)
    x = np.asarray(x, dtype=float)
    a = params.a
    kt = ktilde(k, params)
    h = jost(k, channel, params)
    s = jost_reflected(k, channel, params) / h
    pre = NORM * np.exp(-1j * k * a)
    xr = x - a
    xl = x + a
    if channel is Channel.SYMMETRIC:
        inner = 2.0 * np.cos(kt * x) / h
        right = np.exp(-1j * k * xr) + s * np.exp(1j * k * xr)
        left = np.exp(1j * k * xl) + s * np.exp(-1j * k * xl)
    else:
        inner = 2j * np.sin(kt * x) / h
        right = -np.exp(-1j * k * xr) + s * np.exp(1j * k * xr)
        left = np.exp(1j * k * xl) - s * np.exp(-1j * k * xl)
    inside = np.abs(x) <= a
    out = pre * np.where(inside, inner, np.where(x > 0, right, left))
    return out[()] if out.ndim == 0 else out


def phi_interior(k, x, channel: Channel, params: PotentialParams):
    """phi restricted to |x| <= a, without the piecewise selection."""
    k = np.asarray(k, dtype=complex)
    kt = ktilde(k, params)
    pre = NORM * np.exp(-1j * k * params.a) / jost(k, channel, params)
    if channel is Channel.SYMMETRIC:
        return pre * 2.0 * np.cos(kt * x)
    return pre * 2j * np.sin(kt * x)


@dataclass
class LaurentData:
    """Laurent data of exp(ika) phi(k, x), |x| <= a, about z_{2n-1}.

    ``residue_scalar`` is Res 1/(sqrt(pi) F) at the resonance, so that
    a_{-1}(x) = residue_scalar * cos(ztilde x).
    """

    n: int
    resonance: Resonance
    residue_scalar: complex
    x_grid: np.ndarray
    a_minus1_x: np.ndarray
    a0_x: np.ndarray
    radius: float
    contour_points: int
    convergence: float
    _nodes: np.ndarray = field(repr=False, default=None)

    @property
    def z(self) -> complex:
        return self.resonance.z

    @property
    def params(self) -> PotentialParams:
        return self.resonance.params

    def coefficient(self, m: int, x):
        """a_m(x) on arbitrary points from the stored contour nodes."""
        return _contour_coefficient(self._nodes, self.resonance, m, x)


def _contour_coefficient(nodes, res: Resonance, m: int, x):
    # trapezoid rule: a_m = mean_j f(z_j) (z_j - z_n)^(-m)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    params = res.params
    offs = nodes - res.z
    kt = ktilde(nodes, params)
    f = np.cos(np.outer(x, kt)) / (math.sqrt(math.pi) * jost(nodes, Channel.SYMMETRIC, params))
    return (f * offs ** (-m)).mean(axis=1)


def laurent_radius(n: int, params: PotentialParams) -> float:
    """Contour radius Re z_{2n-1} - Re z_{2n-2} (neighbour from the other parity)."""
    m = 2 * n - 1
    res = solve_resonance(m, params)
    return res.z.real - real_part_below(m, params)


def laurent_expand(n: int, params: PotentialParams, x_grid,
                   contour_points: int = 256, radius: float | None = None) -> LaurentData:
    """Coefficients a_{-1}, a_0 by trapezoid quadrature on a circle about z_{2n-1}."""
    _, n_laurent = admissible_indices(params)
    if n < 1 or n > n_laurent:
        raise OutOfLaurentRange(f"n={n} outside 1..{n_laurent}")
    if contour_points < 64:
        raise ValueError("contour_points must be >= 64")
    res = solve_resonance(2 * n - 1, params)
    r = laurent_radius(n, params) if radius is None else float(radius)
    theta = 2.0 * math.pi * np.arange(contour_points) / contour_points
    nodes = res.z + r * np.exp(1j * theta)
    offs = nodes - res.z
    g = offs / (math.sqrt(math.pi) * jost(nodes, Channel.SYMMETRIC, params))
    residue = g.mean()
    coarse = g[::2].mean()
    x_grid = np.asarray(x_grid, dtype=float)
    return LaurentData(
        n=n, resonance=res, residue_scalar=complex(residue), x_grid=x_grid,
        a_minus1_x=_contour_coefficient(nodes, res, -1, x_grid),
        a0_x=_contour_coefficient(nodes, res, 0, x_grid),
        radius=r, contour_points=contour_points,
        convergence=abs(residue - coarse), _nodes=nodes)


def eta(n: int, k, ld: LaurentData):
    """Principal-part amplitude exp(-ika) a_{-1}/(k - z_{2n-1})."""
    if n != ld.n:
        raise ValueError(f"Laurent data is for n={ld.n}, not n={n}")
    k = np.asarray(k, dtype=complex)
    return np.exp(-1j * k * ld.params.a) * ld.residue_scalar / (k - ld.z)


def laurent_window(ld: LaurentData) -> tuple[float, float]:
    """Interval [Re z - delta, Re z + delta], delta half the gap to Re z_{2n-2}."""
    m = 2 * ld.n - 1
    zr = ld.z.real
    delta = 0.5 * (zr - real_part_below(m, ld.params))
    return zr - delta, zr + delta


def remainder_sup(n: int, k: float, ld: LaurentData, x_grid=None) -> float:
    """sup_x |exp(ika) phi(k,x) - a_{-1}(x)/(k - z) - a_0(x)| over |x| <= a."""
    lo, hi = laurent_window(ld)
    if not lo <= k <= hi:
        raise OutOfWindow(f"k={k} outside [{lo}, {hi}]")
    if n != ld.n:
        raise ValueError(f"Laurent data is for n={ld.n}, not n={n}")
    if x_grid is None:
        x, am1, a0 = ld.x_grid, ld.a_minus1_x, ld.a0_x
    else:
        x = np.asarray(x_grid, dtype=float)
        am1, a0 = ld.coefficient(-1, x), ld.coefficient(0, x)
    params = ld.params
    val = np.exp(1j * k * params.a) * phi_interior(k, x, Channel.SYMMETRIC, params)
    rem = val - am1 / (k - ld.z) - a0
    return float(np.max(np.abs(rem)))


def verify_annulus(c: float, d: float, samples: int = 10_000, slack: float = 1e-12) -> bool:
    """Check that sqrt(c + d e^{i phi}) stays in the annulus about sqrt(c)
    with radii sqrt(c+d) - sqrt(c) and sqrt(c) - sqrt(c-d)."""
    if not 0 <= d <= c:
        raise ValueError("need 0 <= d <= c")
    f = annulus_distance(c, d, samples)
    r_in = math.sqrt(c + d) - math.sqrt(c)
    r_out = math.sqrt(c) - math.sqrt(c - d)
    return bool(np.all(f >= r_in - slack) and np.all(f <= r_out + slack))


def annulus_distance(c: float, d: float, samples: int):
    ph = 2.0 * math.pi * np.arange(samples) / samples
    return np.abs(np.sqrt(c + d * np.exp(1j * ph)) - math.sqrt(c))


def contour_annulus_parameters(n: int, params: PotentialParams) -> tuple[float, float]:
    """(c, d) of the interior-wavenumber image of the Laurent contour:
    c = ztilde'^2_{2n-1}, d = ztilde'^2_{2n-1} - ztilde'^2_{2n-2}."""
    m = 2 * n - 1
    q = lambda j: j * math.pi / (2.0 * params.a)
    c = q(m) ** 2
    return c, c - q(m - 1) ** 2
