"""Square barrier potential and branch-consistent complex helpers."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PotentialParams:
    """Barrier V(x) = lam on [-a, a], zero elsewhere (units hbar = m = 1)."""

    a: float
    lam: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"barrier half-width must be positive, got a={self.a}")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError(f"barrier height must be >= 0, got lam={self.lam}")

    @property
    def k_threshold(self) -> float:
        """Wavenumber at which the kinetic energy equals the barrier height."""
        return math.sqrt(2.0 * self.lam)


class Channel(enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"

    @classmethod
    def for_index(cls, n: int) -> "Channel":
        # odd resonance indices are roots of F (symmetric), even ones of J
        return cls.SYMMETRIC if n % 2 == 1 else cls.ANTISYMMETRIC


def branch_sqrt(w):
    """Square root with Re > 0 off the negative real axis.

    On the cut (real w < 0, either sign of zero imaginary part) the value
    +i*sqrt(|w|) is returned.  Scalars in, scalars out.
    """
    w = np.asarray(w, dtype=complex)
    on_cut = (w.imag == 0) & (w.real < 0)
    r = np.where(on_cut, 1j * np.sqrt(np.abs(w.real)), np.sqrt(w))
    return r[()] if r.ndim == 0 else r


def ktilde(k, params: PotentialParams):
    """Interior wavenumber sqrt(k^2 - 2 lam) on the branch of :func:`branch_sqrt`."""
    k = np.asarray(k, dtype=complex)
    return branch_sqrt(k * k - 2.0 * params.lam)


def potential_value(x, params: PotentialParams):
    x = np.asarray(x, dtype=float)
    v = np.where(np.abs(x) <= params.a, params.lam, 0.0)
    return v[()] if v.ndim == 0 else v
