"""Command-line driver: CSV parameter sweeps, Monte Carlo validation and a
self-test command.

Subcommands: ``surface``, ``compare``, ``esd``, ``mc-validate``,
``selftest``.  Options may also be supplied as a JSON object via
``--config``; explicit flags override file values.  Exit codes: 0 on
success or PASS, 1 on validation FAIL, 2 on bad configuration.
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import entangle, evolve, noise, selftest
from .errors import DephasingError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

_MODE_MAP = {"exact": "exact", "markov": "markov", "short": "short_time"}

_MC_MIN_TRAJ_FOR_VERDICT = 1000


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.12e}"


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else _fmt(cell)
                             for cell in row])


def _merge_config(args: argparse.Namespace, defaults: dict) -> dict:
    """Layer config: parser None values <- JSON file <- explicit flags."""
    cfg = dict(defaults)
    file_values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                file_values = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(file_values) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg.update(file_values)
    for key in defaults:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            cfg[key] = flag_value
    return cfg


def _require_positive(cfg: dict, *keys: str) -> None:
    for key in keys:
        value = cfg[key]
        if value is None or not np.isfinite(value) or value <= 0:
            raise ConfigError(f"{key} must be positive and finite, got {value!r}")


def _time_grid(cfg: dict, include_zero: bool = True) -> np.ndarray:
    _require_positive(cfg, "t_max", "t_step")
    n = int(round(cfg["t_max"] / cfg["t_step"]))
    if n < 1:
        raise ConfigError("time range is empty; increase t_max or lower t_step")
    ts = cfg["t_step"] * np.arange(0 if include_zero else 1, n + 1)
    return ts


def _resolve_gamma(cfg: dict, default_ratio: float | None = None) -> noise.NoiseParams:
    if cfg.get("gamma") is not None and cfg.get("ratio") is not None:
        raise ConfigError("give either --gamma or --ratio, not both")
    big = cfg["gamma_big"]
    if cfg.get("gamma") is not None:
        small = cfg["gamma"]
    elif cfg.get("ratio") is not None:
        small = cfg["ratio"] * big
    elif default_ratio is not None:
        small = default_ratio * big
    else:
        raise ConfigError("one of --gamma or --ratio is required")
    try:
        return noise.NoiseParams(Gamma=big, gamma=small)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _mode(cfg: dict) -> str:
    return _MODE_MAP[cfg["mode"]]


# ---------------------------------------------------------------------------
# surface: concurrence of the alpha state over (gamma/Gamma, Gamma*t)
# ---------------------------------------------------------------------------

def run_surface(cfg: dict) -> int:
    _require_positive(cfg, "gamma_big", "ratio_min", "ratio_max")
    if cfg["ratio_count"] < 1:
        raise ConfigError("ratio_count must be >= 1")
    if cfg["ratio_min"] > cfg["ratio_max"]:
        raise ConfigError("ratio_min must not exceed ratio_max")
    big = cfg["gamma_big"]
    if cfg["t_max"] is None:
        cfg["t_max"] = 4.0 / big
    if cfg["t_step"] is None:
        cfg["t_step"] = 0.02 / big
    alpha = entangle.AlphaState(cfg["alpha"])
    mode = _mode(cfg)
    ts = _time_grid(cfg)
    ratios = np.logspace(math.log10(cfg["ratio_min"]), math.log10(cfg["ratio_max"]),
                         cfg["ratio_count"])

    rows = []
    for ratio in ratios:
        params = noise.NoiseParams(Gamma=big, gamma=ratio * big)
        q = entangle.q_alpha_values(params, alpha, ts, mode)
        for t, qv in zip(ts, q):
            rows.append([float(ratio), big * t, max(0.0, float(qv))])
    _write_csv(cfg["out"], ["gamma_over_Gamma", "Gamma_t", "concurrence"], rows)
    print(f"surface: wrote {len(rows)} rows to {cfg['out']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare: exact vs markov vs short-time concurrence curves
# ---------------------------------------------------------------------------

def run_compare(cfg: dict) -> int:
    _require_positive(cfg, "gamma_big")
    big = cfg["gamma_big"]
    if cfg["t_max"] is None:
        cfg["t_max"] = 4.0 / big
    if cfg["t_step"] is None:
        cfg["t_step"] = 0.02 / big
    alpha = entangle.AlphaState(cfg["alpha"])
    ts = _time_grid(cfg)
    ratios = cfg["ratio"] if isinstance(cfg["ratio"], list) else [cfg["ratio"]]
    for ratio in ratios:
        if ratio is None or ratio <= 0:
            raise ConfigError(f"ratio must be positive, got {ratio!r}")

    out = Path(cfg["out"])
    for ratio in ratios:
        params = noise.NoiseParams(Gamma=big, gamma=ratio * big)
        columns = {
            mode: np.maximum(0.0, entangle.q_alpha_values(params, alpha, ts, mode))
            for mode in ("exact", "markov", "short_time")
        }
        rows = [[t, columns["exact"][i], columns["markov"][i],
                 columns["short_time"][i]] for i, t in enumerate(ts)]
        if len(ratios) == 1:
            path = out
        else:
            path = out.with_name(f"{out.stem}_ratio{ratio:g}{out.suffix}")
        _write_csv(str(path), ["t", "C_exact", "C_markov", "C_short_time"], rows)
        print(f"compare: ratio {ratio:g}, wrote {len(rows)} rows to {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# esd: sudden-death times over (alpha, gamma/Gamma)
# ---------------------------------------------------------------------------

def run_esd_table(cfg: dict) -> int:
    _require_positive(cfg, "gamma_big")
    big = cfg["gamma_big"]
    alphas = cfg["alpha"] if isinstance(cfg["alpha"], list) else [cfg["alpha"]]
    ratios = cfg["ratio"] if isinstance(cfg["ratio"], list) else [cfg["ratio"]]
    for ratio in ratios:
        if ratio is None or ratio <= 0:
            raise ConfigError(f"ratio must be positive, got {ratio!r}")

    rows = []
    for alpha_value in alphas:
        alpha = entangle.AlphaState(alpha_value)
        for ratio in ratios:
            params = noise.NoiseParams(Gamma=big, gamma=ratio * big)
            rows.append([
                alpha_value,
                float(ratio),
                entangle.esd_time(params, alpha, "exact"),
                entangle.esd_time(params, alpha, "markov"),
                entangle.esd_time(params, alpha, "short_time"),
            ])
    _write_csv(cfg["out"],
               ["alpha", "gamma_over_Gamma", "t_esd_exact", "t_esd_markov",
                "t_esd_short"], rows)
    print(f"esd: wrote {len(rows)} rows to {cfg['out']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# mc-validate: Monte Carlo engine against the closed-form solution
# ---------------------------------------------------------------------------

def run_mc_validate(cfg: dict) -> int:
    _require_positive(cfg, "gamma_big", "dt")
    if cfg["n_traj"] < 2:
        raise ConfigError(f"n_traj must be >= 2, got {cfg['n_traj']}")
    if cfg["workers"] < 1:
        raise ConfigError(f"workers must be >= 1, got {cfg['workers']}")
    params = _resolve_gamma(cfg, default_ratio=1.0)
    if cfg["t_max"] is not None or cfg["t_step"] is not None:
        if cfg["t_max"] is None or cfg["t_step"] is None:
            raise ConfigError("t_max and t_step must be given together")
        t_grid = _time_grid(cfg, include_zero=False)
    else:
        t_grid = np.array([0.5, 1.0, 2.0]) / params.Gamma

    rho0 = entangle.bell_phi_plus().to_density()
    result = evolve.mc_average(rho0, params, t_grid, cfg["n_traj"], cfg["dt"],
                               cfg["seed"], n_workers=cfg["workers"])

    rows = []
    n_scored = 0
    n_outliers = 0
    for i, t in enumerate(t_grid):
        analytic = evolve.propagate_analytic(rho0, params, float(t), check=False)
        for j in range(4):
            for k in range(j, 4):
                for part, attr in (("re", "real"), ("im", "imag")):
                    ana = getattr(analytic[j, k], attr)
                    mc = getattr(result.rho_mean[i, j, k], attr)
                    se = getattr(result.rho_stderr[i, j, k], attr)
                    if se > 0.0:
                        z = (mc - ana) / se
                        n_scored += 1
                        if abs(z) > 3.0:
                            n_outliers += 1
                    else:
                        z = 0.0 if abs(mc - ana) <= 1e-12 else math.inf
                        if math.isinf(z):
                            n_scored += 1
                            n_outliers += 1
                    rows.append([float(t), f"rho{j + 1}{k + 1}_{part}",
                                 float(ana), float(mc), float(se), float(z)])
    _write_csv(cfg["out"],
               ["t", "element", "analytic", "mc_mean", "mc_stderr", "z_score"],
               rows)
    print(f"mc-validate: wrote {len(rows)} rows to {cfg['out']}")

    if cfg["n_traj"] < _MC_MIN_TRAJ_FOR_VERDICT:
        print(f"mc-validate: WARNING insufficient statistics "
              f"(n_traj={cfg['n_traj']} < {_MC_MIN_TRAJ_FOR_VERDICT}); "
              f"no PASS/FAIL verdict")
        return EXIT_OK
    fraction = n_outliers / n_scored if n_scored else 0.0
    verdict = "PASS" if fraction < 0.01 else "FAIL"
    print(f"mc-validate: {verdict} ({n_outliers}/{n_scored} z-scores beyond 3)")
    return EXIT_OK if verdict == "PASS" else EXIT_FAIL


def run_selftest(flip_master_sign: bool = False) -> int:
    results = selftest.run_suites(flip_master_sign=flip_master_sign)
    print(selftest.format_report(results))
    return EXIT_OK if all(res.passed for res in results) else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _base_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--gamma-big", dest="gamma_big", type=float,
                        help="long-time dephasing rate Gamma (default 1.0)")
    parent.add_argument("--t-max", dest="t_max", type=float,
                        help="end of the time grid")
    parent.add_argument("--t-step", dest="t_step", type=float,
                        help="time grid spacing")
    parent.add_argument("--seed", type=int, help="master RNG seed")
    parent.add_argument("--out", help="output CSV path")
    parent.add_argument("--config", help="JSON file with option values")
    parent.add_argument("--mode", choices=sorted(_MODE_MAP),
                        help="dephasing exponent mode (default exact)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oudephase",
        description="Two-qubit entanglement decay under Ornstein-Uhlenbeck "
                    "dephasing noise")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _base_parent()

    p_surface = sub.add_parser(
        "surface", parents=[parent],
        help="concurrence over a (gamma/Gamma, Gamma*t) grid")
    p_surface.add_argument("--alpha", type=float, help="state parameter in [0, 1]")
    p_surface.add_argument("--ratio-min", dest="ratio_min", type=float)
    p_surface.add_argument("--ratio-max", dest="ratio_max", type=float)
    p_surface.add_argument("--ratio-count", dest="ratio_count", type=int)

    p_compare = sub.add_parser(
        "compare", parents=[parent],
        help="exact vs markov vs short-time concurrence curves")
    p_compare.add_argument("--alpha", type=float)
    p_compare.add_argument("--ratio", action="append", type=float,
                           help="gamma/Gamma; repeat for several files")

    p_esd = sub.add_parser(
        "esd", parents=[parent], help="sudden-death time table")
    p_esd.add_argument("--alpha", action="append", type=float,
                       help="state parameter; repeatable")
    p_esd.add_argument("--ratio", action="append", type=float,
                       help="gamma/Gamma; repeatable")

    p_mc = sub.add_parser(
        "mc-validate", parents=[parent],
        help="Monte Carlo engine vs closed form on a Bell state")
    p_mc.add_argument("--gamma", type=float, help="noise bandwidth gamma")
    p_mc.add_argument("--ratio", type=float, help="gamma/Gamma")
    p_mc.add_argument("--n-traj", dest="n_traj", type=int)
    p_mc.add_argument("--dt", type=float)
    p_mc.add_argument("--workers", type=int)

    p_self = sub.add_parser("selftest", help="run the built-in invariant suites")
    p_self.add_argument("--debug-flip-master-sign", dest="flip_sign",
                        action="store_true", help=argparse.SUPPRESS)
    return parser


_SURFACE_DEFAULTS = dict(gamma_big=1.0, alpha=1.0 / 3.0, t_max=None, t_step=None,
                         ratio_min=0.05, ratio_max=5.0, ratio_count=60,
                         seed=12345, out="surface.csv", mode="exact")
_COMPARE_DEFAULTS = dict(gamma_big=1.0, alpha=1.0 / 3.0, t_max=None, t_step=None,
                         ratio=[0.5, 5.0], seed=12345, out="compare.csv",
                         mode="exact")
_ESD_DEFAULTS = dict(gamma_big=1.0,
                     alpha=[0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5, 2.0 / 3.0,
                            5.0 / 6.0, 1.0],
                     ratio=[0.05, 0.5, 5.0, 500.0],
                     t_max=None, t_step=None, seed=12345, out="esd.csv",
                     mode="exact")
_MC_DEFAULTS = dict(gamma_big=1.0, gamma=None, ratio=None, n_traj=100000,
                    dt=5e-3, t_max=None, t_step=None, seed=12345,
                    out="mc_validate.csv", mode="exact", workers=1)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "surface":
            return run_surface(_merge_config(args, _SURFACE_DEFAULTS))
        if args.command == "compare":
            return run_compare(_merge_config(args, _COMPARE_DEFAULTS))
        if args.command == "esd":
            return run_esd_table(_merge_config(args, _ESD_DEFAULTS))
        if args.command == "mc-validate":
            return run_mc_validate(_merge_config(args, _MC_DEFAULTS))
        if args.command == "selftest":
            return run_selftest(flip_master_sign=args.flip_sign)
    except (ConfigError, DephasingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
