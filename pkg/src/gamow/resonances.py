"""Resonance wavenumbers of the square barrier and their Gamow functions.

Resonances are located by iterating the contraction

    kappa <- n*pi/(2 a s) - i*log(kappa + sqrt(kappa^2 + 1))/(a s),   s = sqrt(2 lam)

from kappa = 0, where kappa = ztilde/s.  Odd ``n`` are roots of the
symmetric Jost function F, even ``n`` roots of J.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotContractive
from .model import Channel, PotentialParams, branch_sqrt


@dataclass(frozen=True)
class Resonance:
    n: int
    z: complex
    ztilde: complex
    params: PotentialParams
    iterations: int = 0
    residual: float = float("nan")

    @property
    def parity(self) -> str:
        return "odd" if self.n % 2 == 1 else "even"

    @property
    def channel(self) -> Channel:
        return Channel.for_index(self.n)

    @property
    def energy(self) -> float:
        return 0.5 * (self.z * self.z).real

    @property
    def gamma(self) -> float:
        """Decay rate -Im(z^2); the complex energy is z^2/2 = E - i gamma/2."""
        return -(self.z * self.z).imag


def admissible_indices(params: PotentialParams) -> tuple[int, int]:
    """Largest resonance index with a contractive fixed-point map, and the
    largest symmetric index for which the Laurent expansion converges."""
    a, lam = params.a, params.lam
    g = 2.0 * a * a * lam - 1.0
    n_gamow = _largest_below((2.0 / math.pi) * math.sqrt(g)) if g > 0 else 0
    h = lam / 2.0 - math.sqrt(2.0 * lam)
    n_laurent = _largest_below(math.sqrt(h)) if h > 0 else 0
    return n_gamow, n_laurent


def _largest_below(bound: float) -> int:
    # strict inequality n < bound
    return max(math.ceil(bound) - 1, 0)


def _fixed_point_map(n: int, params: PotentialParams):
    s = math.sqrt(2.0 * params.lam)
    offset = n * math.pi / (2.0 * params.a * s)
    scale = 1.0 / (params.a * s)

    def f(kappa: complex) -> complex:
        return offset - 1j * scale * np.log(kappa + np.sqrt(kappa * kappa + 1.0))

    return f


def solve_resonance(n: int, params: PotentialParams, tol: float = 1e-12,
                    max_iter: int = 200) -> Resonance:
    """Resonance ``z_n`` by Banach iteration of the fixed-point map.

    Raises NotContractive unless 1 <= n <= n_gamow, NoConvergence when the
    defect |kappa - F_n(kappa)| stays above ``tol`` after ``max_iter`` steps.
    """
    n_gamow, _ = admissible_indices(params) if params.lam > 0 else (0, 0)
    if n < 1 or n > n_gamow:
        raise NotContractive(
            f"index n={n} outside 1..{n_gamow} for a={params.a}, lam={params.lam}")
    f = _fixed_point_map(n, params)
    kappa = 0j
    defect = math.inf
    it = 0
    while it < max_iter:
        new = complex(f(kappa))
        defect = abs(new - kappa)
        kappa = new
        it += 1
        if defect <= tol:
            break
    else:
        raise NoConvergence(f"n={n}: defect {defect:.3e} after {max_iter} iterations")
    # a few extra sweeps squeeze the defect to rounding level
    for _ in range(5):
        new = complex(f(kappa))
        d = abs(new - kappa)
        if d >= defect:
            break
        kappa, defect = new, d
        it += 1
    residual = abs(kappa - complex(f(kappa)))
    s = math.sqrt(2.0 * params.lam)
    zt = s * kappa
    z = complex(branch_sqrt(zt * zt + 2.0 * params.lam))
    return Resonance(n, z, zt, params, iterations=it, residual=residual)


def asymptotic_resonance(n: int, params: PotentialParams) -> Resonance:
    """Two-term large-lam expansion of ``z_n`` and ``ztilde_n``."""
    if n < 1:
        raise ValueError("resonance index must be >= 1")
    a, lam = params.a, params.lam
    s = math.sqrt(2.0 * lam)
    q2 = (n * math.pi / (2.0 * a)) ** 2
    zr = math.sqrt(2.0 * lam + q2)
    zi = -(n * n * math.pi ** 2 / (4.0 * a ** 3 * s)) / zr
    zt = complex(n * math.pi / (2.0 * a), -n * math.pi / (2.0 * a * a * s))
    return Resonance(n, complex(zr, zi), zt, params)


def real_part_below(n: int, params: PotentialParams) -> float:
    """Re z_{n-1} from the asymptotic formula, with Re z_0 = sqrt(2 lam)."""
    if n - 1 == 0:
        return params.k_threshold
    return asymptotic_resonance(n - 1, params).z.real


def gamow_eval(res: Resonance, x, params: PotentialParams | None = None):
    """Gamow function G_n with the normalisation B = 1/2.

    Inside the barrier this is cos(ztilde x) (odd n) or i sin(ztilde x)
    (even n); outside it is an outgoing exponential.
    """
    params = params or res.params
    a = params.a
    x = np.asarray(x, dtype=float)
    z, zt = res.z, res.ztilde
    amp = zt / (zt + z) * np.exp(1j * zt * a)
    outer = amp * np.exp(1j * z * (np.abs(x) - a))
    if res.n % 2 == 1:
        inner = np.cos(zt * x)
    else:
        inner = 1j * np.sin(zt * x)
        outer = np.where(x < 0, -outer, outer)
    g = np.where(np.abs(x) <= a, inner, outer)
    return g[()] if g.ndim == 0 else g


def verify_quantization(res: Resonance) -> float:
    """|exp(2 i a zt)(zt - z)/(zt + z) - (+1 odd / -1 even)|."""
    a = res.params.a
    z, zt = res.z, res.ztilde
    target = 1.0 if res.n % 2 == 1 else -1.0
    return abs(np.exp(2j * a * zt) * (zt - z) / (zt + z) - target)
