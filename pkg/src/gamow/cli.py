"""Command-line driver.

    gamow-lab resonances --config run.json
    gamow-lab evolve --config run.json --state dirichlet --oracle --out out/
    gamow-lab decay --config run.json --n 1
    gamow-lab laurent --config run.json --n 1
    gamow-lab compare --config run.json

Exit codes: 0 success, 1 configuration error, 2 no admissible resonance,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .analysis import (fit_decay, nonescape_series, short_time_check,
                       survival_probability)
from .eigenfunctions import laurent_expand
from .errors import ConfigError, GamowError, NotContractive, OutOfLaurentRange, ReflectionRisk
from .model import Channel, PotentialParams
from .oracle import cn_evolve_many, compare, default_config
from .propagator import evolve_many, main_term, propagate, ray_term
from .resonances import admissible_indices, gamow_eval, solve_resonance
from .spectral import (_simpson, bound_state, closed_amplitude, default_k_grid,
                       forward_transform, truncated_gamow)

EXIT_OK, EXIT_CONFIG, EXIT_NO_RESONANCE, EXIT_NUMERICAL = 0, 1, 2, 3

DEFAULT_TOLERANCES = {"resonance": 1e-12, "max_iter": 200, "contour_points": 256,
                      "short_time_h": 1e-3}


@dataclass
class RunConfig:
    a: float
    lam: float
    n: int = 1
    k_max: float | None = None
    k_points: int | None = None
    x_points: int = 201
    times: list | None = None
    t_max: float | None = None
    steps: int = 10
    fit_N: float = 5.0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_dir: str = "out"
    oracle_dx: float | None = None
    oracle_dt: float | None = None

    @property
    def params(self) -> PotentialParams:
        return PotentialParams(self.a, self.lam)


def _positive(d, key, kind=float, allow_zero=False, required=False, default=None):
    if key not in d:
        if required:
            raise ConfigError(key, "missing required field")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {v!r}")
    if kind is int and float(v) != int(v):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if not math.isfinite(v) or v < 0 or (v == 0 and not allow_zero):
        raise ConfigError(key, f"must be {'non-negative' if allow_zero else 'positive'}, got {v!r}")
    return kind(v)


KNOWN = {"a", "lambda", "n", "k_max", "k_points", "x_points", "times", "tolerances",
         "output_dir", "fit_N", "oracle_dx", "oracle_dt"}


def parse_config(d: dict) -> RunConfig:
    """Validate a config mapping; raises ConfigError naming the bad field."""
    if not isinstance(d, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    unknown = sorted(set(d) - KNOWN)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    cfg = RunConfig(a=_positive(d, "a", required=True),
                    lam=_positive(d, "lambda", required=True, allow_zero=True))
    cfg.n = _positive(d, "n", int, default=1)
    cfg.k_max = _positive(d, "k_max")
    cfg.k_points = _positive(d, "k_points", int)
    cfg.x_points = _positive(d, "x_points", int, default=201)
    if cfg.x_points < 3:
        raise ConfigError("x_points", "need at least 3 points")
    cfg.fit_N = _positive(d, "fit_N", default=5.0)
    cfg.oracle_dx = _positive(d, "oracle_dx")
    cfg.oracle_dt = _positive(d, "oracle_dt")
    t = d.get("times")
    if isinstance(t, list):
        if not t or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                            and math.isfinite(v) and v >= 0 for v in t):
            raise ConfigError("times", "expected a non-empty list of non-negative numbers")
        cfg.times = sorted(float(v) for v in t)
    elif isinstance(t, dict):
        cfg.t_max = _positive(t, "t_max", required=True)
        cfg.steps = _positive(t, "steps", int, required=True)
    elif t is not None:
        raise ConfigError("times", "expected a list or {t_max, steps}")
    tol = d.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("tolerances", "expected an object")
    for key in tol:
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"tolerances.{key}", "unknown tolerance")
        cfg.tolerances[key] = _positive(tol, key, type(DEFAULT_TOLERANCES[key]))
    out = d.get("output_dir", "out")
    if not isinstance(out, str) or not out:
        raise ConfigError("output_dir", "expected a non-empty path string")
    cfg.output_dir = out
    return cfg


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError("--config", f"file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError("--config", f"invalid JSON: {e}") from None
    return parse_config(raw)


# ---------------------------------------------------------------- helpers

def _gamma1(cfg: RunConfig) -> float:
    return solve_resonance(2 * cfg.n - 1, cfg.params).gamma


def _times(cfg: RunConfig, default_span: float) -> np.ndarray:
    if cfg.times is not None:
        return np.array(cfg.times)
    t_max = cfg.t_max if cfg.t_max is not None else default_span
    return np.linspace(0.0, t_max, cfg.steps)


def _state(cfg: RunConfig, spec: str):
    """(initial WaveState, SpectralAmplitude)."""
    p = cfg.params
    grid = default_k_grid(p, k_max=cfg.k_max)
    if spec == "dirichlet":
        return bound_state(cfg.n, p), closed_amplitude(cfg.n, p, grid)
    if spec == "gamow":
        psi = truncated_gamow(cfg.n, p)
        return psi, forward_transform(psi, grid, Channel.SYMMETRIC, p)
    if spec.startswith("custom:"):
        path = spec[len("custom:"):]
        try:
            psi = io.read_wave(path)
        except (OSError, KeyError, ValueError) as e:
            raise ConfigError("--state", f"cannot read {path}: {e}") from None
        scale = max(1.0, float(np.max(np.abs(psi.samples))))
        if abs(psi.x_min + psi.x_max) > 1e-12 or psi.asymmetry() > 1e-9 * scale:
            raise ConfigError("--state", "custom states must be even on a symmetric grid")
        psi.parity_tag = "symmetric"
        return psi, forward_transform(psi, grid, Channel.SYMMETRIC, p)
    raise ConfigError("--state", f"expected dirichlet, gamow or custom:PATH, got {spec!r}")


def _out(cfg: RunConfig, args) -> Path:
    return Path(args.out or cfg.output_dir)


# --------------------------------------------------------------- commands

def cmd_resonances(cfg: RunConfig, args) -> int:
    p = cfg.params
    n_gamow, n_laurent = admissible_indices(p) if p.lam > 0 else (0, 0)
    if n_gamow == 0:
        print(f"no resonances admissible for a={p.a}, lambda={p.lam}", file=sys.stderr)
        return EXIT_NO_RESONANCE
    rows = []
    tol, it = cfg.tolerances["resonance"], cfg.tolerances["max_iter"]
    for n in range(1, n_gamow + 1):
        r = solve_resonance(n, p, tol=tol, max_iter=it)
        rows.append([n, r.z.real, r.z.imag, r.ztilde.real, r.ztilde.imag,
                     r.energy, r.gamma, r.iterations, r.residual])
    header = ["n", "z_re", "z_im", "ztilde_re", "ztilde_im", "E", "Gamma",
              "iterations", "residual"]
    print(f"# a={p.a} lambda={p.lam} n_gamow={n_gamow} n_laurent={n_laurent}")
    print("  ".join(f"{h:>12s}" for h in header))
    for r in rows:
        print("  ".join(f"{v:12d}" if isinstance(v, int) else f"{v:12.6g}" for v in r))
    io.write_table(_out(cfg, args) / "resonances.csv", header, rows)
    return EXIT_OK


def _oracle_table(cfg, psi, results, times, out: Path):
    p = cfg.params
    t_max = float(np.max(times))
    gc = default_config(p, t_max, dx=cfg.oracle_dx, dt=cfg.oracle_dt)
    # compare at whole numbers of CN steps
    snapped = np.rint(times / gc.dt) * gc.dt
    if not np.allclose(snapped, times, rtol=0, atol=1e-12):
        raise ConfigError("times", f"oracle needs times that are multiples of dt={gc.dt:g}")
    grids = cn_evolve_many(psi, times, gc, p)
    a = p.a
    rows = [[t, compare(r.state, g, (-a, a))] for t, r, g in zip(times, results, grids)]
    io.write_table(out / "comparison.csv", ["t", "l2_difference"], rows)
    for t, d in rows:
        print(f"t={t:.6g}  |spectral - crank-nicolson|_L2[-a,a] = {d:.3e}")
    return rows


def cmd_evolve(cfg: RunConfig, args) -> int:
    p = cfg.params
    psi, amp = _state(cfg, args.state)
    times = _times(cfg, 2.0 / _gamma1(cfg))
    if args.oracle and cfg.times is None:
        gc = default_config(p, float(times.max()), dx=cfg.oracle_dx, dt=cfg.oracle_dt)
        times = np.rint(times / gc.dt) * gc.dt
    x = np.linspace(-p.a, p.a, cfg.x_points)
    results = evolve_many(amp, times, x, p)
    out = _out(cfg, args)
    manifest = {"a": p.a, "lambda": p.lam, "n": cfg.n, "state": args.state, "slices": []}
    for i, r in enumerate(results):
        name = f"slice_{i:03d}.csv"
        io.write_wave(out / name, r.state)
        manifest["slices"].append({"file": name, "t": r.t,
                                   "quadrature_error_estimate": r.quadrature_error_estimate})
    if args.oracle:
        rows = _oracle_table(cfg, psi, results, times, out)
        manifest["comparison"] = "comparison.csv"
        manifest["max_l2_difference"] = max(d for _, d in rows)
    io.write_json(out / "manifest.json", manifest)
    print(f"wrote {len(results)} slices to {out}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig, args) -> int:
    p = cfg.params
    psi, amp = _state(cfg, args.state)
    g = _gamma1(cfg)
    times = np.array(cfg.times) if cfg.times is not None else np.array([0.5, 1.0, 2.0]) / g
    gc = default_config(p, float(times.max()), dx=cfg.oracle_dx, dt=cfg.oracle_dt)
    times = np.rint(times / gc.dt) * gc.dt
    x = np.linspace(-p.a, p.a, cfg.x_points)
    results = evolve_many(amp, times, x, p)
    _oracle_table(cfg, psi, results, times, _out(cfg, args))
    return EXIT_OK


def cmd_decay(cfg: RunConfig, args) -> int:
    p = cfg.params
    n = cfg.n
    res = solve_resonance(2 * n - 1, p)
    gamma = res.gamma
    psi, amp = _state(cfg, args.state)
    N = cfg.fit_N
    times = np.array(cfg.times) if cfg.times is not None else np.linspace(0, (N + 1) / gamma, 121)
    series = nonescape_series(amp, times, p)
    fit = fit_decay(series, gamma, N)
    out = _out(cfg, args)
    io.write_series(out / "decay_series.csv", series)
    h = cfg.tolerances["short_time_h"]
    st = survival_probability(amp, np.array([-2, -1, 0, 1, 2]) * h, p)
    dp0, quad = short_time_check(st)
    summary = io.fit_to_dict(fit)
    summary.update({"gamma_resonance": gamma, "relative_error": abs(fit.gamma_fit - gamma) / gamma,
                    "short_time": {"h": h, "dP0": dp0, "quadratic_coeff": quad}})
    _, n_laurent = admissible_indices(p)
    if args.state == "dirichlet" and 1 <= n <= n_laurent:
        ld = laurent_expand(n, p, np.array([0.0]))
        mt = main_term(n, ld, p)
        tw = times[(times * gamma >= 1 - 1e-12) & (times * gamma <= N + 1e-12)]
        xg = np.linspace(-p.a, p.a, 2 * (cfg.x_points // 2) + 1)
        psi_t = propagate(amp, tw, xg, p)
        g = gamow_eval(res, xg)
        rows = []
        for i, t in enumerate(tw):
            r = ray_term(n, t, ld, p)
            d = psi_t[i] - (mt.value(t) + r) * g
            en = math.sqrt(_simpson(np.abs(d) ** 2, xg[1] - xg[0]))
            rows.append([t, abs(mt.c) * math.exp(-0.5 * gamma * t), abs(r), en])
        io.write_table(out / "decomposition.csv",
                       ["t", "main_abs", "ray_abs", "error_norm"], rows)
        summary["main_term_abs_c"] = abs(mt.c)
        summary["ray_below_main"] = bool(all(r[2] < r[1] for r in rows))
    io.write_json(out / "fit.json", summary)
    print(f"gamma_fit={fit.gamma_fit:.6g} (resonance {gamma:.6g}, "
          f"rel. error {summary['relative_error']:.2%}), rms log residual {fit.rms_log_residual:.3g}")
    print(f"short time: dP/dt(0) = {dp0:.3e}, quadratic coefficient = {quad:.4g}")
    return EXIT_OK


def cmd_laurent(cfg: RunConfig, args) -> int:
    p = cfg.params
    _, n_laurent = admissible_indices(p) if p.lam > 0 else (0, 0)
    if n_laurent == 0:
        print(f"no resonance admits a Laurent expansion for a={p.a}, lambda={p.lam}",
              file=sys.stderr)
        return EXIT_NO_RESONANCE
    x = np.linspace(-p.a, p.a, cfg.x_points)
    ld = laurent_expand(cfg.n, p, x, contour_points=cfg.tolerances["contour_points"])
    out = _out(cfg, args)
    io.write_table(out / "laurent.csv", ["x", "am1_re", "am1_im", "a0_re", "a0_im"],
                   zip(x, ld.a_minus1_x.real, ld.a_minus1_x.imag, ld.a0_x.real, ld.a0_x.imag))
    info = {"n": cfg.n, "z": ld.z, "residue_scalar": ld.residue_scalar, "radius": ld.radius,
            "contour_points": ld.contour_points, "convergence": ld.convergence}
    io.write_json(out / "laurent.json", info)
    print(f"n={cfg.n} z={ld.z:.8g} residue={ld.residue_scalar:.8g} radius={ld.radius:.6g}")
    return EXIT_OK


COMMANDS = {"resonances": cmd_resonances, "evolve": cmd_evolve, "decay": cmd_decay,
            "laurent": cmd_laurent, "compare": cmd_compare}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gamow-lab", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--a", type=float, help="override barrier half-width")
    ap.add_argument("--lambda", dest="lam", type=float, help="override barrier height")
    ap.add_argument("--state", default="dirichlet",
                    help="dirichlet | gamow | custom:PATH (CSV with x,re,im)")
    ap.add_argument("--n", type=int, help="resonance / bound-state index")
    ap.add_argument("--oracle", action="store_true", help="also run Crank-Nicolson")
    ap.add_argument("--out", help="output directory")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = {}
        if args.config:
            try:
                raw = json.loads(Path(args.config).read_text())
            except FileNotFoundError:
                raise ConfigError("--config", f"file not found: {args.config}") from None
            except json.JSONDecodeError as e:
                raise ConfigError("--config", f"invalid JSON: {e}") from None
            if not isinstance(raw, dict):
                raise ConfigError("<root>", "config must be a JSON object")
        if args.a is not None:
            raw["a"] = args.a
        if args.lam is not None:
            raw["lambda"] = args.lam
        if args.n is not None:
            raw["n"] = args.n
        cfg = parse_config(raw)
        with warnings.catch_warnings():
            warnings.simplefilter("error", ReflectionRisk)
            return COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotContractive, OutOfLaurentRange) as e:
        print(f"no admissible resonance: {e}", file=sys.stderr)
        return EXIT_NO_RESONANCE
    except ReflectionRisk as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (GamowError, ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
