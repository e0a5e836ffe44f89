import numpy as np
import pytest

from gamow import (Channel, GridConfig, PotentialParams, WaveState, bound_state, cn_evolve, compare,
                   default_config, evolve, forward_transform)
from gamow.errors import GridMismatch, ReflectionRisk
from gamow.oracle import cn_evolve_many, discrete_norm
from gamow.spectral import default_k_grid


def gaussian(sigma, L=6.0):
    f = lambda x: np.exp(-np.asarray(x, dtype=float) ** 2 / (2 * sigma ** 2))
    return WaveState.from_function(f, -L, L, 1201, "symmetric", normalize=True)


def test_config_checks(p30):
    GridConfig(10.0, 0.01, 1e-3).check(p30)
    with pytest.raises(ValueError):
        GridConfig(1.0, 0.01, 1e-3).check(p30)
    with pytest.raises(ValueError):
        GridConfig(10.0, 0.05, 1e-3).check(p30)
    with pytest.raises(ValueError):
        GridConfig(10.0, 0.0115, 1e-3).check(p30)
    with pytest.raises(ValueError):
        GridConfig(10.0, 0.01, 0.0)


def test_default_config(p30):
    c = default_config(p30, 10.0)
    assert c.dx == pytest.approx(0.01)
    assert c.dt == pytest.approx(1e-3)
    assert c.guard_ok(p30, 10.0, 7.8)
    c.check(p30)


def test_reflection_warning(p30):
    with pytest.warns(ReflectionRisk):
        cn_evolve(bound_state(1, p30), 0.1, GridConfig(4.0, 0.01, 1e-3), p30)


def test_unitary_and_parity(p30):
    psi = bound_state(1, p30)
    c = default_config(p30, 0.5)
    states = cn_evolve_many(psi, [0.0, 0.25, 0.5], c, p30)
    n0 = discrete_norm(states[0])
    for s in states:
        assert discrete_norm(s) == pytest.approx(n0, rel=1e-10)
        assert s.asymmetry() < 1e-9


def test_richardson_smooth_state(p30):
    psi = gaussian(0.4)
    amp = forward_transform(psi, default_k_grid(p30, k_max=40.0), Channel.SYMMETRIC, p30)
    x = np.linspace(-2, 2, 401)
    ref = evolve(amp, 0.5, x, p30).state
    errs = []
    for dx, dt in ((0.02, 4e-3), (0.01, 2e-3), (0.005, 1e-3)):
        s = cn_evolve(psi, 0.5, default_config(p30, 0.5, dx=dx, dt=dt), p30)
        errs.append(compare(ref, s, (-2, 2)))
    assert errs[0] / errs[1] >= 3.0 and errs[1] / errs[2] >= 3.0
    assert errs[-1] < 1e-4


def test_compare_validation(p30):
    a = WaveState(-1.0, 1.0, np.ones(21))
    b = WaveState(-3.0, 3.0, np.ones(61))
    assert compare(b, b, (-2, 2)) == 0.0
    with pytest.raises(GridMismatch):
        compare(a, b, (-2, 2))
    with pytest.raises(GridMismatch):
        compare(b, b, (1, 1))
