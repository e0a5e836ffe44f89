import math

import numpy as np
import pytest

from gamow import Channel, WaveState, bound_state, closed_amplitude, forward_transform, inverse_transform
from gamow.errors import ChannelMismatch
from gamow.quadrature import default_k_max
from gamow.spectral import (bound_transform_closed, default_k_grid, series_coefficients,
                            tail_k_max, truncated_gamow)


def gaussian(sigma, L=9.0):
    f = lambda x: np.exp(-np.asarray(x, dtype=float) ** 2 / (2 * sigma ** 2))
    return WaveState.from_function(f, -L, L, 1201, "symmetric", normalize=True)


def test_bound_state_normalized(p30):
    psi = bound_state(1, p30)
    assert psi.norm() == pytest.approx(1.0, abs=1e-9)
    assert psi.asymmetry() < 1e-14
    assert psi(np.array([2.5]))[0] == 0


def test_closed_form_matches_quadrature(p30):
    k = np.linspace(0.3, 40, 150)
    num = forward_transform(bound_state(1, p30), k, Channel.SYMMETRIC, p30).values
    ref = bound_transform_closed(1, k, p30)
    assert np.max(np.abs(num - ref)) < 1e-9 * np.max(np.abs(ref))


def test_closed_form_removable_point(p30):
    # cos(kt a) vanishes with kt = q; the value stays finite and continuous there
    q = math.pi / (2 * p30.a)
    kz = math.sqrt(q * q + 60.0)
    vals = bound_transform_closed(1, kz + np.array([-1e-10, 0.0, 1e-10]), p30)
    assert np.all(np.isfinite(vals))
    assert abs(vals[0] - vals[1]) < 1e-5 * abs(vals[1])


def test_plancherel_random_states(p30, rng):
    grid = default_k_grid(p30, k_max=60.0)
    for sigma in rng.uniform(0.5, 1.3, 5):
        psi = gaussian(sigma)
        amp = forward_transform(psi, grid, Channel.SYMMETRIC, p30)
        assert amp.norm() == pytest.approx(psi.norm(), abs=1e-3)


def test_parseval_bound_state(p30):
    assert closed_amplitude(1, p30).norm() == pytest.approx(1.0, abs=1e-3)


def test_reconstruction_with_tail_rule(p30):
    f = lambda k: bound_transform_closed(1, k, p30)
    K = tail_k_max(f, p30)
    assert K > default_k_max(p30)
    amp = closed_amplitude(1, p30, default_k_grid(p30, k_max=K))
    x = np.linspace(-2, 2, 401)
    err = inverse_transform(amp, x, p30) - bound_state(1, p30)(x)
    l2 = math.sqrt(np.trapezoid(np.abs(err) ** 2, x))
    assert l2 < 1e-3


def test_linearity(p30, rng):
    k = np.linspace(0.5, 30, 60)
    a, b = gaussian(0.7), gaussian(1.1)
    c1, c2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    mix = WaveState.from_function(lambda x: c1 * a(x) + c2 * b(x), -9, 9, 1201, "symmetric")
    lhs = forward_transform(mix, k, Channel.SYMMETRIC, p30).values
    rhs = c1 * forward_transform(a, k, Channel.SYMMETRIC, p30).values \
        + c2 * forward_transform(b, k, Channel.SYMMETRIC, p30).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(np.abs(lhs))


def test_channel_mismatch(p30):
    with pytest.raises(ChannelMismatch):
        forward_transform(bound_state(1, p30), [1.0], Channel.ANTISYMMETRIC, p30)


def test_bad_k_grid(p30):
    with pytest.raises(ValueError):
        forward_transform(bound_state(1, p30), [2.0, 1.0], Channel.SYMMETRIC, p30)


def test_truncated_gamow_close_to_bound_state(p30):
    g = truncated_gamow(1, p30)
    b = bound_state(1, p30)
    x = np.linspace(-2, 2, 801)
    overlap = abs(np.trapezoid(np.conj(b(x)) * g(x), x))
    assert g.norm() == pytest.approx(1.0, abs=1e-6)
    assert overlap > 0.95


def test_series_coefficients(p30):
    coeffs, tail = series_coefficients(bound_state(2, p30), 4, p30)
    assert abs(coeffs[1]) == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.abs(np.delete(coeffs, 1)) < 1e-9)
    assert tail >= 0
